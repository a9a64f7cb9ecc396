#include "kgl/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kgl/errors.hpp"

namespace kgl {

GibbsChain::GibbsChain(const ModelSpec &model, std::uint64_t seed, GibbsOptions opts)
    : GibbsChain(model, seed, opts, PointSet{}) {}

GibbsChain::GibbsChain(const ModelSpec &model, std::uint64_t seed, GibbsOptions opts,
                       const PointSet &initial)
    : model_(model), opts_(opts), rng_(seed), gamma_(model.make_configuration(initial)) {
  const MoveMix &mx = opts_.mix;
  if (mx.birth < 0 || mx.death < 0 || mx.displacement < 0 ||
      mx.birth + mx.death + mx.displacement <= 0)
    throw ConfigError("sampler.mix", "move weights must be non-negative and not all zero");
  if ((mx.birth > 0) != (mx.death > 0))
    throw ConfigError("sampler.mix", "birth and death weights must both be positive or both zero");
  if (opts_.displacement_scale > 0.0) delta_ = opts_.displacement_scale;
  else if (model_.phi.range() > 0.0) delta_ = 0.3 * model_.phi.range();
  else delta_ = 0.1 * model_.domain.side();
  sweep_steps_ = std::max<std::size_t>(
      {10, gamma_.size(), static_cast<std::size_t>(std::ceil(model_.z * model_.domain.volume()))});
  if (!std::isfinite(total_energy(gamma_, model_.phi)))
    throw std::invalid_argument("initial configuration has infinite energy");
}

McmcEvent GibbsChain::step() {
  const MoveMix &mx = opts_.mix;
  const double total = mx.birth + mx.death + mx.displacement;
  const double u = rng_.uniform() * total;
  const double V = model_.domain.volume();
  const double n = static_cast<double>(gamma_.size());
  McmcEvent ev;

  if (u < mx.birth) {
    ev.kind = MoveKind::birth;
    ++proposed_[0];
    Point x;
    for (int k = 0; k < 3; ++k)
      x[k] = k < model_.domain.dim() ? rng_.uniform() * model_.domain.side() : 0.0;
    if (opts_.max_particles && gamma_.size() >= *opts_.max_particles) return ev;
    double e = relative_energy(x, gamma_, model_.phi);
    if (std::isinf(e)) return ev;
    double ratio = model_.z * V * std::exp(-e) * mx.death / ((n + 1.0) * mx.birth);
    if (ratio >= 1.0 || rng_.uniform() < ratio) {
      gamma_.add(x);
      ev.accepted = true;
      ++accepted_[0];
    }
    return ev;
  }

  if (u < mx.birth + mx.death) {
    ev.kind = MoveKind::death;
    ++proposed_[1];
    if (gamma_.empty()) return ev;
    std::size_t id = rng_.index(gamma_.size());
    double e = relative_energy(gamma_.point(id), gamma_, model_.phi, id);
    double ratio = n * std::exp(e) * mx.birth / (model_.z * V * mx.death);
    if (ratio >= 1.0 || rng_.uniform() < ratio) {
      gamma_.remove(id);
      ev.accepted = true;
      ++accepted_[1];
    }
    return ev;
  }

  ev.kind = MoveKind::displacement;
  ++proposed_[2];
  if (gamma_.empty()) return ev;
  std::size_t id = rng_.index(gamma_.size());
  const Point old = gamma_.point(id);
  Point x = old;
  for (int k = 0; k < model_.domain.dim(); ++k)
    x[k] += rng_.uniform(-delta_, delta_);
  x = wrap(x, model_.domain);
  double e_new = relative_energy(x, gamma_, model_.phi, id);
  if (std::isinf(e_new)) return ev;
  double e_old = relative_energy(old, gamma_, model_.phi, id);
  double du = e_new - e_old;
  if (du <= 0.0 || rng_.uniform() < std::exp(-du)) {
    gamma_.move(id, x);
    ev.accepted = true;
    ++accepted_[2];
  }
  return ev;
}

void GibbsChain::sweep() {
  for (std::size_t i = 0; i < sweep_steps_; ++i)
    step();
}

SampleSet sample_gibbs(const ModelSpec &model, const SamplerSettings &settings,
                       const PointSet &initial) {
  model.validate();
  SampleSet out;
  out.domain = model.domain;
  out.seed = settings.seed;
  out.model_hash = model.hash();
  if (!lahht_check(model).satisfied)
    out.warnings.push_back("low-activity/high-temperature condition is not satisfied");

  GibbsChain chain(model, settings.seed, settings.options, initial);
  std::vector<double> counts;
  counts.reserve(settings.burn_in);
  for (std::size_t i = 0; i < settings.burn_in; ++i) {
    chain.sweep();
    counts.push_back(static_cast<double>(chain.current().size()));
  }
  if (counts.size() >= 40) {
    std::span<const double> tail(counts.data() + counts.size() / 2, counts.size() - counts.size() / 2);
    out.tau_count = integrated_autocorr_time(tail);
  }
  out.thin_used = settings.thin > 0
                      ? settings.thin
                      : std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(2.0 * out.tau_count)));

  out.configs.reserve(settings.n_samples);
  for (std::size_t i = 0; i < settings.n_samples; ++i) {
    for (std::size_t t = 0; t < out.thin_used; ++t)
      chain.sweep();
    out.configs.push_back(chain.current().points());
  }
  for (int k = 0; k < 3; ++k) {
    auto mk = static_cast<MoveKind>(k);
    out.acceptance[k] = chain.proposed(mk) > 0 ? static_cast<double>(chain.accepted(mk)) /
                                                     static_cast<double>(chain.proposed(mk))
                                               : 0.0;
  }
  return out;
}

} // namespace kgl
