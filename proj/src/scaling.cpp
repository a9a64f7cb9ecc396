#include <cmath>

#include "kgl/errors.hpp"
#include "kgl/parallel.hpp"
#include "kgl/scaling.hpp"

namespace kgl {

GeneratorDistance l2_generator_distance(const TestFunction &phi_test, const ModelSpec &m,
                                        double alpha, std::span<const PointSet> samples,
                                        const GeneratorQuadrature &q) {
  if (samples.empty()) throw std::invalid_argument("l2_generator_distance: no samples");
  phi_test.validate(m.domain);
  const std::size_t n = samples.size();
  std::vector<double> tot(n), plus(n), minus(n), form(n), qerr(n);
  parallel_for(n, [&](std::size_t i) {
    Configuration g = m.make_configuration(samples[i]);
    GeneratorQuadrature qi = q;
    qi.seed = split_seed(q.seed, i);
    GeneratorValue hk = apply_H_kawasaki_exp(phi_test, g, m, qi);
    GeneratorValue hg = apply_H_glauber_exp(phi_test, g, m, alpha, qi);
    double dt = hk.total - hg.total, dp = hk.plus - hg.plus, dm = hk.minus - hg.minus;
    tot[i] = dt * dt;
    plus[i] = dp * dp;
    minus[i] = dm * dm;
    form[i] = std::exp(phi_test.pair(g)) * hk.total;
    qerr[i] = std::max(hk.quad_error, hg.quad_error);
  });
  GeneratorDistance out;
  out.eps = m.eps;
  out.total = batch_means(tot);
  out.plus = batch_means(plus);
  out.minus = batch_means(minus);
  out.form_eps = batch_means(form);
  for (double e : qerr)
    out.max_quad_error = std::max(out.max_quad_error, e);
  return out;
}

namespace {

template <class Get>
bool strictly_decreasing(const std::vector<GeneratorDistance> &pts, Get get) {
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (!(get(pts[i]) < get(pts[i - 1]))) return false;
  return !pts.empty();
}

} // namespace

bool SweepResult::total_decreasing() const {
  return strictly_decreasing(points, [](const GeneratorDistance &g) { return g.total.value; });
}
bool SweepResult::plus_decreasing() const {
  return strictly_decreasing(points, [](const GeneratorDistance &g) { return g.plus.value; });
}
bool SweepResult::minus_decreasing() const {
  return strictly_decreasing(points, [](const GeneratorDistance &g) { return g.minus.value; });
}
double SweepResult::reduction() const {
  if (points.empty() || points.front().total.value == 0.0) return 0.0;
  return points.back().total.value / points.front().total.value;
}

SweepResult generator_sweep(const TestFunction &phi_test, const ModelSpec &m,
                            const std::vector<double> &eps, std::span<const PointSet> samples,
                            std::optional<double> alpha, const GeneratorQuadrature &q) {
  m.validate();
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) throw ConfigError("model.eps", "eps values must be positive");
    if (i > 0 && !(eps[i] < eps[i - 1]))
      throw ConfigError("model.eps", "eps grid must be strictly decreasing");
  }
  SweepResult res;
  res.model_hash = m.hash();
  res.eps = eps;
  res.n_samples = samples.size();
  res.seed = q.seed;
  res.k1 = estimate_k1(samples, m.domain);
  res.alpha_from_samples = !alpha.has_value();
  res.alpha = alpha ? *alpha : alpha_from_k1(res.k1.value, m.z, m.kernel);
  for (double e : eps)
    res.points.push_back(l2_generator_distance(phi_test, m.with_eps(e), res.alpha, samples, q));
  return res;
}

ShiftReport energy_shift_limit_check(const TestFunction &psi, const Point &x, const Point &xp,
                                     const Point &y, const Point &yp,
                                     const std::vector<double> &eps, const ModelSpec &m,
                                     std::span<const PointSet> samples) {
  if (x == y) throw ConfigError("shift.x", "x and y must differ");
  if (samples.size() < 100) throw std::invalid_argument("energy_shift_limit_check: need >= 100 samples");
  const TorusDomain &dom = m.domain;
  const double V = dom.volume();
  const std::size_t n = samples.size();
  std::vector<double> dens(n), epsi(n);
  std::vector<Configuration> configs;
  configs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    configs.push_back(m.make_configuration(samples[i]));
    dens[i] = static_cast<double>(samples[i].size()) / V;
    epsi[i] = std::exp(psi.pair(configs.back()));
  }
  const double z = m.z;
  ShiftReport rep;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const double e = eps[k];
    Point p1{0.0, 0.0, 0.0}, p2{0.0, 0.0, 0.0};
    for (int c = 0; c < dom.dim(); ++c) {
      p1[c] = x[c] / e + xp[c];
      p2[c] = y[c] / e + yp[c];
    }
    p1 = wrap(p1, dom);
    p2 = wrap(p2, dom);
    ShiftPoint sp;
    sp.eps = e;
    sp.separation = torus_distance(p1, p2, dom);
    sp.admissible = sp.separation >= 0.25 * dom.side();
    std::vector<double> v2(n), v1(n);
    for (std::size_t i = 0; i < n; ++i) {
      double e1 = relative_energy(p1, configs[i], m.phi);
      double e2 = relative_energy(p2, configs[i], m.phi);
      v1[i] = std::isinf(e1) ? 0.0 : std::exp(-e1) * epsi[i];
      v2[i] = std::isinf(e1) || std::isinf(e2) ? 0.0 : std::exp(-e1 - e2) * epsi[i];
    }
    std::vector<std::vector<double>> series{dens, epsi, v2, v1};
    sp.two_shift = batch_means(v2);
    sp.one_shift = batch_means(v1);
    sp.two_limit = batch_function(series, [z](std::span<const double> mm) {
      return (mm[0] / z) * (mm[0] / z) * mm[1];
    });
    sp.one_limit = batch_function(series, [z](std::span<const double> mm) { return mm[0] / z * mm[1]; });
    sp.two_diff = batch_function(series, [z](std::span<const double> mm) {
      return mm[2] - (mm[0] / z) * (mm[0] / z) * mm[1];
    });
    sp.one_diff = batch_function(series, [z](std::span<const double> mm) {
      return mm[3] - mm[0] / z * mm[1];
    });
    auto zs = [](const Estimate &d) {
      return d.std_error > 0.0 ? d.value / d.std_error : (d.value == 0.0 ? 0.0 : INFINITY);
    };
    sp.two_z = zs(sp.two_diff);
    sp.one_z = zs(sp.one_diff);
    if (sp.admissible) rep.smallest_admissible = k;
    rep.points.push_back(sp);
  }
  return rep;
}

} // namespace kgl
