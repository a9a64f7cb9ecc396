#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgl/configuration.hpp"
#include "kgl/model.hpp"
#include "kgl/rng.hpp"
#include "kgl/stats.hpp"
#include "kgl/test_function.hpp"

namespace kgl {

enum class MoveKind { birth = 0, death = 1, displacement = 2 };

struct MoveMix {
  double birth = 0.25;
  double death = 0.25;
  double displacement = 0.5;
};

struct GibbsOptions {
  MoveMix mix;
  /// Side of the uniform displacement box; <= 0 means 0.3 R (0.1 L when R = 0).
  double displacement_scale = 0.0;
  /// Births are rejected at this size; the chain then targets the ensemble
  /// conditioned on |gamma| <= max_particles.
  std::optional<std::size_t> max_particles;
};

struct McmcEvent {
  MoveKind kind = MoveKind::birth;
  bool accepted = false;
};

/// Metropolis-Hastings birth/death/displacement chain whose stationary
/// density on the torus is proportional to z^|gamma| exp(-U(gamma)).
class GibbsChain {
public:
  GibbsChain(const ModelSpec &model, std::uint64_t seed, GibbsOptions opts = {});
  GibbsChain(const ModelSpec &model, std::uint64_t seed, GibbsOptions opts,
             const PointSet &initial);

  McmcEvent step();
  /// Fixed step count per chain: max(10, initial size, ceil(zV)).
  void sweep();

  const Configuration &current() const { return gamma_; }
  const ModelSpec &model() const { return model_; }
  std::uint64_t proposed(MoveKind k) const { return proposed_[static_cast<int>(k)]; }
  std::uint64_t accepted(MoveKind k) const { return accepted_[static_cast<int>(k)]; }

private:
  ModelSpec model_;
  GibbsOptions opts_;
  Rng rng_;
  Configuration gamma_;
  double delta_;
  std::size_t sweep_steps_;
  std::array<std::uint64_t, 3> proposed_{};
  std::array<std::uint64_t, 3> accepted_{};
};

struct SamplerSettings {
  std::size_t n_samples = 1000;
  /// Sweeps between kept samples; 0 picks ceil(2 tau) from the burn-in
  /// autocorrelation time of |gamma|.
  std::size_t thin = 0;
  std::size_t burn_in = 10000;
  std::uint64_t seed = 1;
  GibbsOptions options;
};

struct SampleSet {
  TorusDomain domain;
  std::vector<PointSet> configs;
  std::size_t thin_used = 1;
  double tau_count = 1.0;
  std::uint64_t seed = 0;
  std::string model_hash;
  std::vector<std::string> warnings;
  std::array<double, 3> acceptance{};
};

/// Deterministic given settings.seed.
SampleSet sample_gibbs(const ModelSpec &model, const SamplerSettings &settings,
                       const PointSet &initial = {});

/// k1 as the mean of |gamma| / V.
Estimate estimate_k1(std::span<const PointSet> samples, const TorusDomain &dom);

/// Density in n_bins equal slabs along the first axis.
std::vector<Estimate> estimate_density_profile(std::span<const PointSet> samples,
                                               const TorusDomain &dom, std::size_t n_bins);

/// Radial bins covering (0, r_max].
struct RadialBins {
  std::vector<double> edges;

  static RadialBins uniform(double r_max, std::size_t n);
  std::size_t size() const { return edges.empty() ? 0 : edges.size() - 1; }
  /// Measure of {x in R^d : |x| in bin i}.
  double shell_measure(std::size_t i, int dim) const;
};

struct PairCorrelation {
  RadialBins bins;
  /// nullopt for bins in which no pair was ever observed.
  std::vector<std::optional<Estimate>> k2;
  std::vector<std::uint64_t> pair_counts;
};

/// Histogram estimator of k2(r), normalised so that the ideal gas gives z^2.
PairCorrelation estimate_k2(std::span<const PointSet> samples, const TorusDomain &dom,
                            const RadialBins &bins);

/// u2(r) = k2(r) - k1^2 per bin, error from joint batch means.
std::vector<std::optional<Estimate>> estimate_ursell2(std::span<const PointSet> samples,
                                                      const TorusDomain &dom,
                                                      const RadialBins &bins);

enum class OuterKind { exp_clipped, polynomial };

/// F(gamma, x) = f(x) g(<psi, gamma>), g = exp(min(t, clip)) or c0 + c1 t + c2 t^2 + c3 t^3.
struct GnzFunctional {
  TestFunction f;
  TestFunction psi;
  OuterKind g = OuterKind::polynomial;
  double clip = 50.0;
  std::array<double, 4> poly{1.0, 0.0, 0.0, 0.0};

  double outer(double t) const;
  std::string describe() const;
};

struct GnzResult {
  Estimate lhs;
  Estimate rhs;
  /// Paired difference lhs - rhs with its batch-means error.
  Estimate diff;
  double z_score = 0.0;
  double max_quad_error = 0.0;
};

struct GnzQuadrature {
  SupportQuadrature support;
  std::uint64_t seed = 7;
};

/// E sum_{x in gamma} F(gamma, x) versus E int z exp(-E(x, gamma)) F(gamma + x, x) dx.
GnzResult gnz_residual(std::span<const PointSet> samples, const ModelSpec &model,
                       const GnzFunctional &F, const GnzQuadrature &q = {});

/// Two-point version with F2(gamma, x1, x2) = f(x1) f(x2) g(<psi, gamma>),
/// including the diagonal single-integral term on the right.
GnzResult double_gnz_residual(std::span<const PointSet> samples, const ModelSpec &model,
                              const GnzFunctional &F, const GnzQuadrature &q = {});

struct SeriesCheck {
  /// 1 + int h k1 + (1/2) int int h h k2, h = e^f - 1.
  Estimate series;
  double truncation_bound = 0.0;
  double xi = 0.0;
  /// |mc - series| <= 3 sigma + truncation bound.
  bool consistent = false;
};

struct ExpMomentResult {
  Estimate mc;
  /// exp(z int (e^f - 1)), reported for the ideal gas.
  std::optional<double> poisson_closed_form;
  /// d = 1 only.
  std::optional<SeriesCheck> series;
};

/// E exp(<f, gamma>) by Monte Carlo, with the two-term correlation-function
/// series as a cross-check. `xi` bounds the correlation functions (from
/// ruelle_probe); <= 0 skips the series check.
ExpMomentResult exp_moment(std::span<const PointSet> samples, const ModelSpec &model,
                           const TestFunction &f, double xi, const RadialBins &bins);

struct RuelleViolation {
  std::size_t order = 1; // 1 for k1, 2 for a k2 bin
  std::size_t bin = 0;
  double value = 0.0;
  double bound = 0.0;
};

struct RuelleReport {
  double xi_hat = 0.0;
  double xi_reference = 0.0;
  std::vector<RuelleViolation> violations;
};

/// xi_hat = max(k1, max_r sqrt(k2(r) + 3 sigma)); violations are bins where
/// the estimate exceeds xi_reference^n by more than 3 sigma. The reference
/// defaults to z for positive potentials (k^(n) <= z^n) and to xi_hat otherwise.
RuelleReport ruelle_probe(std::span<const PointSet> samples, const ModelSpec &model,
                          const RadialBins &bins, std::optional<double> xi_reference = {});

struct AlphaConsistency {
  /// k1 ||a||_1 / z.
  Estimate alpha_k1;
  /// ||a||_1 E exp(-E(x, gamma)), averaged over fixed probe points x.
  Estimate alpha_gnz;
  Estimate diff;
  double z_score = 0.0;
};

/// Both routes to the birth-death rate scale, with a paired error for the
/// difference. Probes sit on the box diagonal.
AlphaConsistency alpha_consistency(std::span<const PointSet> samples, const ModelSpec &model,
                                   std::size_t probes = 16);

} // namespace kgl
