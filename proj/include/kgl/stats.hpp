#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace kgl {

/// A Monte Carlo value with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  /// Effective sample size implied by the batch-means error.
  double n_effective = 0.0;
};

/// Number of batches used by batch_means when the series is long enough.
inline constexpr std::size_t kDefaultBatches = 32;
/// Minimum batch count; shorter series fall back to one sample per batch.
inline constexpr std::size_t kMinBatches = 20;

/// Mean with batch-means standard error (series split into contiguous batches).
Estimate batch_means(std::span<const double> series, std::size_t n_batches = kDefaultBatches);

/// Batch-means estimate of a smooth function of several means.
///
/// `series[j][i]` is observable j at sample i. The statistic is fn applied to
/// the overall means; its error is the spread of fn over batch means.
Estimate batch_function(const std::vector<std::vector<double>> &series,
                        const std::function<double(std::span<const double>)> &fn,
                        std::size_t n_batches = kDefaultBatches);

/// Batch-means estimate of a vector-valued function of the means.
std::vector<Estimate>
batch_function_vec(const std::vector<std::vector<double>> &series,
                   const std::function<std::vector<double>(std::span<const double>)> &fn,
                   std::size_t n_batches = kDefaultBatches);

/// (a - b) / sqrt(se_a^2 + se_b^2); zero when both errors vanish and a == b.
double z_score(const Estimate &a, const Estimate &b);

double mean(std::span<const double> x);
double variance(std::span<const double> x);

/// Integrated autocorrelation time with Sokal's self-consistent window (c = 5).
double integrated_autocorr_time(std::span<const double> x);

/// Asymptotic Kolmogorov survival function Q(lambda) = P(K > lambda).
double kolmogorov_q(double lambda);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test (asymptotic p-value with the
/// Stephens small-sample correction).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// One-sample KS test against a continuous CDF.
KsResult ks_one_sample(std::vector<double> x, const std::function<double(double)> &cdf);

struct EnergyDistanceResult {
  double statistic = 0.0;
  /// Permutation p-value; 1 when no permutations were requested.
  double p_value = 1.0;
  std::size_t permutations = 0;
};

/// Energy distance 2E|X-Y| - E|X-X'| - E|Y-Y'| between two samples of
/// equal-length vectors (V-statistic form), with an optional permutation test.
EnergyDistanceResult energy_distance(const std::vector<std::vector<double>> &a,
                                     const std::vector<std::vector<double>> &b,
                                     std::size_t permutations, std::uint64_t seed);

} // namespace kgl
