#include <cmath>

#include "kgl/errors.hpp"
#include "kgl/parallel.hpp"
#include "kgl/scaling.hpp"

namespace kgl {

namespace {

// Per replica: [<phi_1, X(0)>, cur_1..cur_n, prev_1..prev_n] where
// cur_i = <phi_i, X(t_i)> and prev_i = <phi_i, X(t_{i-1})>, t_0 = 0.
struct EngineRun {
  std::vector<std::vector<double>> rows;
  std::uint64_t events = 0;
};

EngineRun run_engine(const ModelSpec &m, Engine engine, double alpha, const FddSettings &st,
                     std::uint64_t stream_seed) {
  const std::size_t n = st.times.size();
  auto test = [&](std::size_t i) -> const TestFunction & {
    return st.tests.size() == 1 ? st.tests[0] : st.tests[i];
  };
  SamplerSettings ss = st.sampler;
  ss.n_samples = st.replicas;
  ss.seed = split_seed(stream_seed, 0);
  SampleSet starts = sample_gibbs(m, ss);

  DynamicsSpec ds;
  ds.model = m;
  ds.engine = engine;
  ds.alpha = alpha;
  ds.horizon = st.times.back();
  EngineRun out;
  out.rows.assign(st.replicas, std::vector<double>(1 + 2 * n, 0.0));
  std::vector<std::uint64_t> events(st.replicas, 0);
  parallel_for(st.replicas, [&](std::size_t r) {
    Simulator sim(ds, starts.configs[r], split_seed(stream_seed, 1 + r));
    auto &row = out.rows[r];
    row[0] = test(0).pair(sim.state());
    if (n > 0) row[1 + n] = row[0];
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) row[1 + n + i] = test(i).pair(sim.state());
      sim.advance_to(st.times[i]);
      row[1 + i] = test(i).pair(sim.state());
    }
    events[r] = sim.counts()[0] + sim.counts()[1] + sim.counts()[2];
  });
  for (auto e : events)
    out.events += e;
  return out;
}

std::vector<double> column(const EngineRun &r, std::size_t c) {
  std::vector<double> v;
  v.reserve(r.rows.size());
  for (const auto &row : r.rows)
    v.push_back(row[c]);
  return v;
}

} // namespace

FddReport fdd_compare(const ModelSpec &m, const FddSettings &st, std::uint64_t seed) {
  m.validate();
  if (st.replicas < 500) throw ConfigError("dynamics.replicas", "fdd comparison needs >= 500 replicas");
  const std::size_t n = st.times.size();
  if (n < 1 || n > 3) throw ConfigError("dynamics.times", "between one and three times are supported");
  for (std::size_t i = 0; i < n; ++i)
    if (!(st.times[i] >= 0.0) || (i > 0 && !(st.times[i] > st.times[i - 1])))
      throw ConfigError("dynamics.times", "times must be non-negative and increasing");
  if (!(st.times.back() > 0.0)) throw ConfigError("dynamics.times", "last time must be positive");
  if (st.tests.size() != 1 && st.tests.size() != n)
    throw ConfigError("dynamics.tests", "give one test function or one per time");
  for (const auto &t : st.tests)
    t.validate(m.domain);
  if (!(st.alpha > 0.0)) throw ConfigError("dynamics.alpha", "alpha must be positive");

  FddReport rep;
  EngineRun glauber = run_engine(m, Engine::glauber, st.alpha, st, split_seed(seed, 0));
  rep.glauber_events = glauber.events;
  auto vectors = [n](const EngineRun &r) {
    std::vector<std::vector<double>> v;
    v.reserve(r.rows.size());
    for (const auto &row : r.rows)
      v.emplace_back(row.begin() + 1, row.begin() + 1 + static_cast<std::ptrdiff_t>(n));
    return v;
  };
  auto increments = [n](const EngineRun &r, std::size_t i) {
    std::vector<double> v;
    for (const auto &row : r.rows)
      v.push_back(row[1 + i] - row[1 + n + i]);
    return v;
  };
  const auto g_vec = vectors(glauber);

  for (std::size_t k = 0; k < st.eps.size(); ++k) {
    EngineRun kaw = run_engine(m.with_eps(st.eps[k]), Engine::kawasaki, st.alpha, st,
                               split_seed(seed, 1 + k));
    FddPoint p;
    p.eps = st.eps[k];
    p.events = kaw.events;
    p.joint = energy_distance(vectors(kaw), g_vec, st.permutations, split_seed(seed, 1000 + k));
    for (std::size_t i = 0; i < n; ++i) {
      p.marginal.push_back(ks_two_sample(column(kaw, 1 + i), column(glauber, 1 + i)));
      p.increment.push_back(ks_two_sample(increments(kaw, i), increments(glauber, i)));
    }
    p.initial = ks_two_sample(column(kaw, 0), column(glauber, 0));
    rep.points.push_back(std::move(p));
  }
  return rep;
}

} // namespace kgl
