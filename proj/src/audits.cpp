#include <algorithm>
#include <cmath>

#include "kgl/dynamics.hpp"
#include "kgl/errors.hpp"
#include "kgl/parallel.hpp"

namespace kgl {

namespace {

Point random_point(Rng &rng, const TorusDomain &dom) {
  Point x{0.0, 0.0, 0.0};
  for (int k = 0; k < dom.dim(); ++k)
    x[k] = rng.uniform() * dom.side();
  return x;
}

// Random sequential addition; points whose energy against the current set
// exceeds 40 are redrawn so every configuration has a finite, moderate energy.
Configuration random_configuration(const ModelSpec &m, Rng &rng, std::size_t n) {
  Configuration g = m.empty_configuration();
  std::size_t tries = 0;
  while (g.size() < n && tries < 100 * (n + 1)) {
    ++tries;
    Point x = random_point(rng, m.domain);
    double e = relative_energy(x, g, m.phi);
    if (std::isfinite(e) && std::abs(e) <= 40.0) g.add(x);
  }
  return g;
}

double rel_gap(double a, double b) {
  double s = std::max(std::abs(a), std::abs(b));
  return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

double abs_pair_sum(const PointSet &pts, const TorusDomain &dom, const PairPotential &phi) {
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      s += std::abs(phi.at(torus_distance(pts[i], pts[j], dom)));
  return s;
}

} // namespace

DetailedBalanceReport detailed_balance_audit(const ModelSpec &m, std::size_t n_cases,
                                             std::uint64_t seed, std::size_t max_points) {
  m.validate();
  DetailedBalanceReport rep;
  Rng rng(seed);
  const double alpha = 1.3;
  for (std::size_t c = 0; c < n_cases; ++c) {
    std::size_t n = 1 + rng.index(max_points);
    Configuration g = random_configuration(m, rng, n);
    if (g.empty()) continue;
    ++rep.cases;
    const double U = total_energy(g, m.phi);

    // Energy increment for a fresh point.
    {
      Point w = random_point(rng, m.domain);
      double e = relative_energy(w, g, m.phi);
      PointSet plus = g.points();
      plus.push_back(w);
      double u_plus = total_energy(m.make_configuration(plus), m.phi);
      if (std::isfinite(e) || std::isfinite(u_plus)) {
        double scale = abs_pair_sum(plus, m.domain, m.phi);
        double diff = std::abs(u_plus - (U + e));
        rep.max_rel_energy = std::max(rep.max_rel_energy, scale > 0.0 ? diff / scale : diff);
      }
    }

    // Kawasaki: e^{-U(g)} c(x, y, g \ x) against e^{-U(g')} c(y, x, g' \ y).
    std::size_t xid = rng.index(g.size());
    const Point x = g.point(xid);
    // Overlap targets stay (both sides vanish); huge finite energies are redrawn.
    Point y = random_point(rng, m.domain);
    for (int tries = 0; tries < 1000; ++tries) {
      double ey = relative_energy(y, g, m.phi, xid);
      if (std::isinf(ey) || std::abs(ey) <= 40.0) break;
      y = random_point(rng, m.domain);
    }
    Configuration gp = g;
    gp.move(xid, y);
    const double Up = total_energy(gp, m.phi);
    double fwd = kawasaki_rate(xid, y, g, m);
    if (!std::isfinite(Up)) {
      if (fwd != 0.0) rep.max_rel_kawasaki = std::max(rep.max_rel_kawasaki, 1.0);
      ++rep.zero_cases;
    } else {
      double bwd = kawasaki_rate(xid, x, gp, m);
      const double shift = std::min(U, Up);
      double lhs = std::exp(-(U - shift)) * fwd;
      double rhs = std::exp(-(Up - shift)) * bwd;
      rep.max_rel_kawasaki = std::max(rep.max_rel_kawasaki, rel_gap(lhs, rhs));
    }

    // Glauber: z^{|g|} e^{-U(g)} d(x, g) against z^{|g|-1} e^{-U(g \ x)} b(x, g \ x).
    Configuration gm = g;
    gm.remove(xid);
    const double Um = total_energy(gm, m.phi);
    double death = glauber_death_rate(xid, g, m, alpha);
    double birth = glauber_birth_density(x, gm, m, alpha);
    const double shift = std::min(U, Um);
    double lhs = m.z * std::exp(-(U - shift)) * death;
    double rhs = std::exp(-(Um - shift)) * birth;
    rep.max_rel_glauber = std::max(rep.max_rel_glauber, rel_gap(lhs, rhs));
  }
  return rep;
}

bool StationarityReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const StatCheck &c) { return c.pass; });
}

StationarityReport stationarity_audit(const DynamicsSpec &spec, const StationaritySettings &st,
                                      std::uint64_t seed) {
  spec.validate();
  if (st.replicas < 20) throw ConfigError("dynamics.replicas", "at least 20 replicas are required");
  if (st.snapshots == 0) throw ConfigError("dynamics.snapshots", "need at least one snapshot");
  const ModelSpec &m = spec.model;
  const TorusDomain &dom = m.domain;
  const double V = dom.volume();
  const RadialBins &bins = st.bins;
  const std::size_t nb = bins.size();
  const bool with_density = spec.engine == Engine::glauber;

  SamplerSettings ref = st.sampler;
  ref.n_samples = st.gibbs_samples;
  ref.seed = split_seed(seed, 1);
  SampleSet reference = sample_gibbs(m, ref);

  SamplerSettings init = st.sampler;
  init.n_samples = st.replicas;
  init.seed = split_seed(seed, 2);
  SampleSet starts = sample_gibbs(m, init);

  // Observables: [density, U/V, k2 bins...].
  const std::size_t n_obs = 2 + nb;
  auto observe = [&](const PointSet &pts, std::vector<double> &out) {
    out.assign(n_obs, 0.0);
    out[0] = static_cast<double>(pts.size()) / V;
    out[1] = total_energy_direct(pts, dom, m.phi) / V;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        double r = torus_distance(pts[i], pts[j], dom);
        if (r <= bins.edges.front() || r > bins.edges.back()) continue;
        auto it = std::lower_bound(bins.edges.begin(), bins.edges.end(), r);
        std::size_t b = static_cast<std::size_t>(it - bins.edges.begin()) - 1;
        out[2 + b] += 2.0 / (V * bins.shell_measure(b, dom.dim()));
      }
  };

  std::vector<std::vector<double>> gibbs_series(n_obs, std::vector<double>(reference.configs.size()));
  std::vector<double> obs;
  for (std::size_t i = 0; i < reference.configs.size(); ++i) {
    observe(reference.configs[i], obs);
    for (std::size_t k = 0; k < n_obs; ++k)
      gibbs_series[k][i] = obs[k];
  }

  std::vector<std::vector<double>> replica_means(n_obs, std::vector<double>(st.replicas, 0.0));
  std::vector<std::uint64_t> events(st.replicas, 0);
  DynamicsSpec ds = spec;
  ds.recording = {};
  ds.max_events.reset();
  parallel_for(st.replicas, [&](std::size_t r) {
    Simulator sim(ds, starts.configs[r], split_seed(seed, 100 + r));
    std::vector<double> acc(n_obs, 0.0), o;
    for (std::size_t j = 1; j <= st.snapshots; ++j) {
      sim.advance_to(st.horizon * static_cast<double>(j) / static_cast<double>(st.snapshots));
      observe(sim.state().points(), o);
      for (std::size_t k = 0; k < n_obs; ++k)
        acc[k] += o[k];
    }
    for (std::size_t k = 0; k < n_obs; ++k)
      replica_means[k][r] = acc[k] / static_cast<double>(st.snapshots);
    events[r] = sim.counts()[0] + sim.counts()[1] + sim.counts()[2];
  });

  StationarityReport rep;
  rep.engine = spec.engine;
  for (auto e : events)
    rep.events += e;
  for (std::size_t k = with_density ? 0 : 1; k < n_obs; ++k) {
    StatCheck c;
    if (k == 0) c.name = "density";
    else if (k == 1) c.name = "energy_per_volume";
    else c.name = "k2_bin_" + std::to_string(k - 2);
    c.gibbs = batch_means(gibbs_series[k]);
    c.dynamics = batch_means(replica_means[k]);
    if (k >= 2 && c.gibbs.value == 0.0 && c.dynamics.value == 0.0) continue;
    c.z_score = z_score(c.dynamics, c.gibbs);
    c.pass = std::abs(c.z_score) < st.threshold;
    rep.checks.push_back(c);
  }
  return rep;
}

} // namespace kgl
