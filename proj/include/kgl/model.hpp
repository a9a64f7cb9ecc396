#pragma once

#include <optional>
#include <string>

#include "kgl/configuration.hpp"
#include "kgl/geometry.hpp"
#include "kgl/kernel.hpp"
#include "kgl/potential.hpp"

namespace kgl {

/// Everything that defines one model: box, interaction, activity, jump
/// kernel with its scale eps, and the rate-family parameter s in [0, 1].
struct ModelSpec {
  TorusDomain domain;
  PairPotential phi;
  double z = 0.1;
  JumpKernel kernel;
  double eps = 1.0;
  double s = 0.0;
  /// Bound M on the energy factor of every rate; required unless phi is
  /// positive and s = 0 (then M = 1).
  std::optional<double> rate_cap;

  /// Throws ConfigError naming the field ("z", "eps", "potential.R", ...).
  void validate() const;

  /// Thinning bound on the energy factor.
  double energy_cap() const;

  Configuration empty_configuration() const { return {domain, phi.range()}; }
  Configuration make_configuration(const PointSet &pts) const {
    return {domain, phi.range(), pts};
  }

  ModelSpec with_eps(double e) const {
    ModelSpec m = *this;
    m.eps = e;
    return m;
  }

  /// Canonical one-line description; stable across runs.
  std::string describe() const;
  /// 16-hex-digit FNV-1a hash of describe().
  std::string hash() const;
};

/// E(x, gamma) = sum over y in gamma of phi(x - y); +inf on hard-core overlap.
/// `exclude` skips one id (pass the id of x to get E(x, gamma \ x)).
double relative_energy(const Point &x, const Configuration &gamma, const PairPotential &phi,
                       std::optional<std::size_t> exclude = std::nullopt);

/// U(gamma), the sum over unordered pairs.
double total_energy(const Configuration &gamma, const PairPotential &phi);

/// All-pairs reference for U(gamma) without the cell list.
double total_energy_direct(const PointSet &pts, const TorusDomain &dom, const PairPotential &phi);

/// Energy factor exp[s E(x) - (1-s) E(y)] of the hop rate, with both
/// energies taken against gamma \ x. Zero when E(y) is infinite.
double kawasaki_energy_factor(double e_from, double e_to, double s);

/// c(x, y, gamma \ x) = a_eps(x - y) exp[s E(x, gamma\x) - (1-s) E(y, gamma\x)].
/// `x_id` is the id of x in `gamma`.
double kawasaki_rate(std::size_t x_id, const Point &y, const Configuration &gamma,
                     const ModelSpec &m);

struct GlauberRates {
  double death = 0.0;
  double birth_density = 0.0;
};

/// Death rate alpha exp[s E(x, gamma \ x)] for a point x of gamma (x_id) and
/// birth density alpha z exp[-(1-s) E(x, gamma)] for a point not in gamma.
double glauber_death_rate(std::size_t x_id, const Configuration &gamma, const ModelSpec &m,
                          double alpha);
double glauber_birth_density(const Point &x, const Configuration &gamma, const ModelSpec &m,
                             double alpha);

/// alpha = k1 ||a||_1 / z.
double alpha_from_k1(double k1, double z, const JumpKernel &a);

struct LahtCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
  double quad_error = 0.0;
};

/// lhs = z * integral |exp(-phi) - 1| over R^d, rhs = 1 / (2 e^{1 + 2B}).
LahtCheck lahht_check(const ModelSpec &m);

/// integral over R^d of (1 - exp(-phi)); hard cores contribute their volume.
double mayer_integral(const PairPotential &phi, int dim);

} // namespace kgl
