#pragma once

#include <limits>
#include <string>
#include <vector>

#include "kgl/geometry.hpp"

namespace kgl {

inline constexpr double kInfiniteEnergy = std::numeric_limits<double>::infinity();

enum class PotentialKind { zero, square_well, triangle, hardcore_square_well, lennard_jones };

/// Radial pair potential phi(|x|) from a fixed menu; all members have compact
/// support [0, R] and analytically known stability constants.
class PairPotential {
public:
  PairPotential() = default;

  static PairPotential zero();
  /// phi = J for r < R.
  static PairPotential square_well(double J, double R);
  /// phi = J (1 - r/R) for r < R.
  static PairPotential triangle(double J, double R);
  /// phi = +inf for r < r_hc, J for r_hc <= r < R.
  static PairPotential hardcore_square_well(double r_hc, double J, double R);
  /// 4 eps_lj ((sigma/r)^12 - (sigma/r)^6) for r < R, truncated (not shifted).
  static PairPotential lennard_jones(double sigma, double eps_lj, double R);

  PotentialKind kind() const { return kind_; }
  double range() const { return range_; }
  double strength() const { return J_; }
  double core() const { return r_hc_; }
  double sigma() const { return sigma_; }

  /// phi at distance r; +inf inside a hard core.
  double at(double r) const;
  double operator()(const Point &disp, int dim) const { return at(norm(disp, dim)); }

  /// phi(x) >= 0 everywhere.
  bool positive() const;
  bool is_zero() const { return kind_ == PotentialKind::zero; }

  /// Stability constant B: sum over pairs of phi >= -B |gamma|.
  ///
  /// Zero for positive potentials. Hard-core wells with J < 0 use the packing
  /// bound on the number of neighbours within R. The truncated Lennard-Jones
  /// constant uses the same packing bound with core diameter sigma.
  double stability_constant(int dim) const;

  /// Radii at which phi is discontinuous or has a kink; used as quadrature
  /// breakpoints. Always includes 0 when phi has a cusp there.
  std::vector<double> breakpoints() const;

  /// Canonical text form, used for hashing and reports.
  std::string describe() const;

private:
  PotentialKind kind_ = PotentialKind::zero;
  double J_ = 0.0;
  double range_ = 0.0;
  double r_hc_ = 0.0;
  double sigma_ = 0.0;
};

} // namespace kgl
