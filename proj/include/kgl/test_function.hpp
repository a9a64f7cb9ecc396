#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "kgl/configuration.hpp"
#include "kgl/geometry.hpp"
#include "kgl/rng.hpp"

namespace kgl {

enum class BumpShape { bump, step };

/// One compactly supported piece: a C^1 bump height (1 - u^2)^2 or a flat
/// step, with u = |x - center| / radius < 1.
struct TestComponent {
  BumpShape shape = BumpShape::bump;
  Point center{0.0, 0.0, 0.0};
  double radius = 1.0;
  double height = 1.0;
};

/// Sum of at most five bumps/steps; the phi_test, f and psi of the
/// generator and GNZ checks.
class TestFunction {
public:
  static constexpr std::size_t kMaxComponents = 5;

  TestFunction() = default;
  explicit TestFunction(std::vector<TestComponent> components);

  static TestFunction bump(const Point &center, double radius, double height);
  static TestFunction step(const Point &center, double radius, double height);

  const std::vector<TestComponent> &components() const { return parts_; }
  bool is_zero() const;

  /// Throws ConfigError unless every support radius is < L/4.
  void validate(const TorusDomain &dom) const;

  double operator()(const Point &x, const TorusDomain &dom) const;
  /// <f, gamma> = sum over points.
  double pair(const PointSet &pts, const TorusDomain &dom) const;
  double pair(const Configuration &gamma) const;

  /// Support as disjoint intervals of [0, L] (d = 1).
  std::vector<std::pair<double, double>> support_pieces_1d(const TorusDomain &dom) const;
  /// Edge positions (d = 1), for quadrature breakpoints.
  std::vector<double> edges_1d() const;

  std::string describe() const;

private:
  std::vector<TestComponent> parts_;
};

struct SupportIntegral {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

struct SupportQuadrature {
  /// Midpoint grid spacing bound for d = 2.
  double grid_spacing = 0.025;
  /// Importance-sampling draws for d = 3.
  std::size_t mc_draws = 1000;
  /// Breakpoint-doubling check in d = 1 (costs one extra 10-point pass).
  bool check = true;
};

/// Integral of fn over the support of `support`: breakpoint Gauss-Legendre
/// in d = 1 (with `extra_breaks` as additional breakpoints, taken
/// periodically), a midpoint tensor grid in d = 2 and importance sampling
/// over the union of balls in d = 3 (needs rng).
SupportIntegral integrate_over_support(const TestFunction &support, const TorusDomain &dom,
                                       const std::function<double(const Point &)> &fn,
                                       const std::vector<double> &extra_breaks,
                                       const SupportQuadrature &q, Rng *rng);

} // namespace kgl
