#pragma once

#include <string>

#include "kgl/geometry.hpp"
#include "kgl/rng.hpp"

namespace kgl {

enum class KernelKind { uniform_ball, gaussian_truncated };

/// Symmetric, compactly supported jump kernel a(u) >= 0 with known mass ||a||_1.
class JumpKernel {
public:
  JumpKernel() = default;

  /// a = amplitude / |B_r| on the ball of radius r.
  static JumpKernel uniform_ball(int dim, double r, double amplitude = 1.0);
  /// a proportional to exp(-|u|^2 / 2 sigma^2) on |u| <= r_cut, total mass amplitude.
  static JumpKernel gaussian_truncated(int dim, double sigma, double r_cut, double amplitude = 1.0);

  KernelKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double cutoff() const { return cutoff_; }
  double sigma() const { return sigma_; }
  double mass() const { return amplitude_; }

  /// a(u), not periodized.
  double density(const Point &u) const;
  /// Draws u with density a / ||a||_1.
  Point sample(Rng &rng) const;

  /// Same kernel with amplitude multiplied by `factor`.
  JumpKernel scaled(double factor) const;

  std::string describe() const;

private:
  KernelKind kind_ = KernelKind::uniform_ball;
  int dim_ = 1;
  double cutoff_ = 1.0;
  double sigma_ = 0.0;
  double amplitude_ = 1.0;
  double norm_ = 1.0; // density value (uniform) or Gaussian normaliser
};

/// Periodized scaled kernel: sum over images n of eps^d a(eps (disp + n L)).
/// Integrates to ||a||_1 over the torus for every eps > 0.
double a_eps_eval(const JumpKernel &a, double eps, const Point &disp, const TorusDomain &dom);

} // namespace kgl
