#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgl/configuration.hpp"
#include "kgl/dynamics.hpp"
#include "kgl/gibbs.hpp"
#include "kgl/model.hpp"
#include "kgl/stats.hpp"
#include "kgl/test_function.hpp"

namespace kgl {

/// Generator applied to F = exp<phi_test, .> at one configuration, split
/// into the particle-removal part (minus) and the particle-addition part (plus).
struct GeneratorValue {
  double plus = 0.0;
  double minus = 0.0;
  double total = 0.0;
  /// Largest relative quadrature error of the integrals involved.
  double quad_error = 0.0;
};

struct GeneratorQuadrature {
  /// Refuse when the doubling check disagrees by more than this (relative).
  double rel_tol = 1e-4;
  /// d = 2 tensor-grid spacing as a fraction of min(R, r_cut / eps).
  double grid_fraction = 1.0 / 40.0;
  /// d = 3 importance-sampling draws per integral.
  std::size_t mc_draws = 10000;
  std::uint64_t seed = 11;
};

/// H_eps F for the hop dynamics at s = 0:
///   minus = -F sum_x (e^{-phi(x)} - 1) int a_eps(x-y) e^{-E(y, gamma\x)} dy
///   plus  = -F sum_x e^{-phi(x)} int a_eps(x-y) e^{-E(y, gamma\x)} (e^{phi(y)} - 1) dy
/// Throws QuadratureError when the integrals are under-resolved.
GeneratorValue apply_H_kawasaki_exp(const TestFunction &phi_test, const Configuration &gamma,
                                    const ModelSpec &m, const GeneratorQuadrature &q = {});

/// H_0 F for the birth-death dynamics at s = 0:
///   minus = -alpha F sum_x (e^{-phi(x)} - 1)
///   plus  = -alpha z F int e^{-E(y, gamma)} (e^{phi(y)} - 1) dy
GeneratorValue apply_H_glauber_exp(const TestFunction &phi_test, const Configuration &gamma,
                                   const ModelSpec &m, double alpha,
                                   const GeneratorQuadrature &q = {});

struct GeneratorDistance {
  double eps = 1.0;
  /// Mean over samples of (H_eps F - H_0 F)^2.
  Estimate total;
  Estimate plus;
  Estimate minus;
  /// Mean of F H_eps F, the Dirichlet form value; >= 0.
  Estimate form_eps;
  double max_quad_error = 0.0;
};

GeneratorDistance l2_generator_distance(const TestFunction &phi_test, const ModelSpec &m,
                                        double alpha, std::span<const PointSet> samples,
                                        const GeneratorQuadrature &q = {});

struct SweepResult {
  std::string model_hash;
  std::vector<double> eps;
  std::vector<GeneratorDistance> points;
  Estimate k1;
  double alpha = 0.0;
  bool alpha_from_samples = true;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;

  bool total_decreasing() const;
  bool plus_decreasing() const;
  bool minus_decreasing() const;
  /// last / first total distance.
  double reduction() const;
};

/// eps must be strictly decreasing. alpha defaults to alpha_from_k1 on the
/// same samples.
SweepResult generator_sweep(const TestFunction &phi_test, const ModelSpec &m,
                            const std::vector<double> &eps, std::span<const PointSet> samples,
                            std::optional<double> alpha = {}, const GeneratorQuadrature &q = {});

struct ShiftPoint {
  double eps = 1.0;
  /// Torus distance between the two shifted points.
  double separation = 0.0;
  bool admissible = false;
  Estimate two_shift;   // E e^{-E(p1) - E(p2) + <psi, gamma>}
  Estimate two_limit;   // (k1/z)^2 E e^{<psi, gamma>}
  Estimate two_diff;
  double two_z = 0.0;
  Estimate one_shift;   // E e^{-E(p1) + <psi, gamma>}
  Estimate one_limit;   // (k1/z) E e^{<psi, gamma>}
  Estimate one_diff;
  double one_z = 0.0;
};

struct ShiftReport {
  std::vector<ShiftPoint> points;
  /// Index of the smallest admissible eps, if any.
  std::optional<std::size_t> smallest_admissible;
};

/// Shifted points p1 = x/eps + x', p2 = y/eps + y' (wrapped). A point is
/// admissible when p1 and p2 are at least L/4 apart on the torus.
ShiftReport energy_shift_limit_check(const TestFunction &psi, const Point &x, const Point &xp,
                                     const Point &y, const Point &yp,
                                     const std::vector<double> &eps, const ModelSpec &m,
                                     std::span<const PointSet> samples);

struct FddSettings {
  /// 1 to 3 increasing times.
  std::vector<double> times;
  /// One test function per time, or a single one used at every time.
  std::vector<TestFunction> tests;
  std::vector<double> eps;
  std::size_t replicas = 2000;
  std::size_t permutations = 1000;
  double alpha = 1.0;
  SamplerSettings sampler;
};

struct FddPoint {
  double eps = 1.0;
  EnergyDistanceResult joint;
  /// KS of each time's coordinate against the birth-death law.
  std::vector<KsResult> marginal;
  /// KS of each increment <phi_i, X(t_i)> - <phi_i, X(t_{i-1})> (t_0 = 0).
  std::vector<KsResult> increment;
  /// KS of <phi_1, X(0)> against the birth-death run's initial law.
  KsResult initial;
  std::uint64_t events = 0;
};

struct FddReport {
  std::vector<FddPoint> points;
  std::uint64_t glauber_events = 0;
};

/// Every engine run draws its own independent initial states from the Gibbs
/// sampler. Throws ConfigError for fewer than 500 replicas.
FddReport fdd_compare(const ModelSpec &m, const FddSettings &st, std::uint64_t seed);

struct GapSettings {
  double horizon = 50.0;
  std::size_t replicas = 64;
  /// Observation spacing (in time units).
  double dt = 0.05;
  /// Largest lag considered, in time units.
  double max_lag = 5.0;
  double window_lo = 0.1;
  double window_hi = 0.8;
  /// Jackknife groups.
  std::size_t groups = 16;
  SamplerSettings sampler;
};

struct GapResult {
  Estimate gap_hat;
  /// alpha (1 - z int (1 - e^{-phi})).
  double lower_bound = 0.0;
  double alpha = 0.0;
  std::size_t fit_points = 0;
  std::vector<double> lags;
  std::vector<double> autocorrelation;
  bool bound_respected = false;
};

/// Exponential fit to the stationary autocorrelation of <phi_test, gamma(t)>
/// under the birth-death engine.
GapResult spectral_gap_probe(const ModelSpec &m, double alpha, const TestFunction &phi_test,
                             const GapSettings &st, std::uint64_t seed);

} // namespace kgl
