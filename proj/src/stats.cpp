#include "kgl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "kgl/rng.hpp"

namespace kgl {

namespace {

struct BatchLayout {
  std::size_t n_batches;
  std::size_t batch_size;
};

BatchLayout layout_for(std::size_t n, std::size_t requested) {
  if (n == 0) throw std::invalid_argument("batch means of an empty series");
  requested = std::max(requested, kMinBatches);
  if (n < 2 * requested) return {n, 1};
  return {requested, n / requested};
}

} // namespace

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  double m = mean(x);
  double s = 0.0;
  for (double v : x)
    s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

Estimate batch_means(std::span<const double> series, std::size_t n_batches) {
  const std::size_t n = series.size();
  auto [nb, bs] = layout_for(n, n_batches);
  std::vector<double> bm(nb, 0.0);
  for (std::size_t b = 0; b < nb; ++b) {
    double s = 0.0;
    for (std::size_t i = b * bs; i < (b + 1) * bs; ++i)
      s += series[i];
    bm[b] = s / static_cast<double>(bs);
  }
  Estimate e;
  e.value = mean(series);
  e.n_samples = n;
  e.std_error = nb > 1 ? std::sqrt(variance(bm) / static_cast<double>(nb)) : 0.0;
  double v = variance(series);
  e.n_effective = e.std_error > 0.0 ? v / (e.std_error * e.std_error) : static_cast<double>(n);
  return e;
}

std::vector<Estimate>
batch_function_vec(const std::vector<std::vector<double>> &series,
                   const std::function<std::vector<double>(std::span<const double>)> &fn,
                   std::size_t n_batches) {
  if (series.empty()) throw std::invalid_argument("no observables");
  const std::size_t n = series.front().size();
  for (const auto &s : series)
    if (s.size() != n) throw std::invalid_argument("observable series differ in length");
  auto [nb, bs] = layout_for(n, n_batches);
  const std::size_t m = series.size();

  std::vector<double> full(m);
  for (std::size_t j = 0; j < m; ++j)
    full[j] = mean(series[j]);
  std::vector<double> central = fn(full);

  std::vector<std::vector<double>> per_batch;
  per_batch.reserve(nb);
  std::vector<double> bm(m);
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t i = b * bs; i < (b + 1) * bs; ++i)
        s += series[j][i];
      bm[j] = s / static_cast<double>(bs);
    }
    per_batch.push_back(fn(bm));
  }

  std::vector<Estimate> out(central.size());
  for (std::size_t k = 0; k < central.size(); ++k) {
    std::vector<double> vals(nb);
    for (std::size_t b = 0; b < nb; ++b)
      vals[b] = per_batch[b][k];
    // Batch values that are not finite (e.g. an empty histogram bin in one
    // batch) are dropped from the spread.
    std::vector<double> finite;
    for (double v : vals)
      if (std::isfinite(v)) finite.push_back(v);
    out[k].value = central[k];
    out[k].n_samples = n;
    out[k].std_error =
        finite.size() > 1 ? std::sqrt(variance(finite) / static_cast<double>(finite.size())) : 0.0;
    out[k].n_effective = static_cast<double>(nb * bs);
  }
  return out;
}

Estimate batch_function(const std::vector<std::vector<double>> &series,
                        const std::function<double(std::span<const double>)> &fn,
                        std::size_t n_batches) {
  return batch_function_vec(
             series, [&](std::span<const double> m) { return std::vector<double>{fn(m)}; },
             n_batches)
      .front();
}

double z_score(const Estimate &a, const Estimate &b) {
  double s = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
  double diff = a.value - b.value;
  if (s == 0.0) return diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
  return diff / s;
}

double integrated_autocorr_time(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 4) return 1.0;
  double m = mean(x);
  double c0 = 0.0;
  for (double v : x)
    c0 += (v - m) * (v - m);
  c0 /= static_cast<double>(n);
  if (c0 <= 0.0) return 1.0;
  double tau = 1.0;
  for (std::size_t lag = 1; lag < n / 2; ++lag) {
    double c = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i)
      c += (x[i] - m) * (x[i + lag] - m);
    c /= static_cast<double>(n);
    tau += 2.0 * c / c0;
    if (static_cast<double>(lag) >= 5.0 * tau) break;
  }
  return std::max(tau, 1.0);
}

double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  double ne = na * nb / (na + nb);
  double sq = std::sqrt(ne);
  return {d, kolmogorov_q((sq + 0.12 + 0.11 / sq) * d)};
}

KsResult ks_one_sample(std::vector<double> x, const std::function<double(double)> &cdf) {
  if (x.empty()) throw std::invalid_argument("KS test needs a non-empty sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  double sq = std::sqrt(n);
  return {d, kolmogorov_q((sq + 0.12 + 0.11 / sq) * d)};
}

EnergyDistanceResult energy_distance(const std::vector<std::vector<double>> &a,
                                     const std::vector<std::vector<double>> &b,
                                     std::size_t permutations, std::uint64_t seed) {
  if (a.empty() || b.empty()) throw std::invalid_argument("energy distance needs samples");
  const std::size_t na = a.size(), nb = b.size(), n = na + b.size();
  const std::size_t dim = a.front().size();
  std::vector<const std::vector<double> *> all;
  all.reserve(n);
  for (const auto &v : a) all.push_back(&v);
  for (const auto &v : b) all.push_back(&v);
  for (auto *v : all)
    if (v->size() != dim) throw std::invalid_argument("energy distance: ragged vectors");

  // Pairwise distances, stored as float to keep the permutation loop in cache.
  std::vector<float> dist(n * n, 0.0f);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        double t = (*all[i])[k] - (*all[j])[k];
        s += t * t;
      }
      float dd = static_cast<float>(std::sqrt(s));
      dist[i * n + j] = dd;
      dist[j * n + i] = dd;
      total += 2.0 * dd;
    }

  auto statistic = [&](const std::vector<std::uint8_t> &in_a) {
    double saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const float *row = &dist[i * n];
      double ra = 0.0, rb = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (in_a[j]) ra += row[j];
        else rb += row[j];
      }
      if (in_a[i]) saa += ra;
      else sbb += rb;
    }
    double sab = 0.5 * (total - saa - sbb);
    double fa = static_cast<double>(na), fb = static_cast<double>(nb);
    return 2.0 * sab / (fa * fb) - saa / (fa * fa) - sbb / (fb * fb);
  };

  std::vector<std::uint8_t> labels(n, 0);
  for (std::size_t i = 0; i < na; ++i) labels[i] = 1;
  EnergyDistanceResult res;
  res.statistic = statistic(labels);
  res.permutations = permutations;
  if (permutations == 0) return res;

  Rng rng(seed);
  std::size_t exceed = 0;
  for (std::size_t p = 0; p < permutations; ++p) {
    for (std::size_t i = n - 1; i > 0; --i)
      std::swap(labels[i], labels[rng.index(i + 1)]);
    if (statistic(labels) >= res.statistic) ++exceed;
  }
  res.p_value = static_cast<double>(exceed + 1) / static_cast<double>(permutations + 1);
  return res;
}

} // namespace kgl
