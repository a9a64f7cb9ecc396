#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kgl/errors.hpp"
#include "kgl/gibbs.hpp"
#include "kgl/quadrature.hpp"

namespace kgl {

namespace {

constexpr std::size_t kMinSamples = 100;

void require_samples(std::span<const PointSet> samples, const char *what) {
  if (samples.size() < kMinSamples)
    throw std::invalid_argument(std::string(what) + ": at least 100 samples are required");
}

// Ordered-pair counts per radial bin for one configuration.
void pair_histogram(const PointSet &pts, const TorusDomain &dom, const RadialBins &bins,
                    std::vector<double> &counts) {
  std::fill(counts.begin(), counts.end(), 0.0);
  const auto &e = bins.edges;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double r = torus_distance(pts[i], pts[j], dom);
      if (r <= e.front() || r > e.back()) continue;
      auto it = std::lower_bound(e.begin(), e.end(), r);
      std::size_t b = static_cast<std::size_t>(it - e.begin()) - 1;
      counts[b] += 2.0;
    }
}

// Breakpoints of x -> E(x, gamma) (d = 1): every point shifted by each
// breakpoint radius of phi.
void add_energy_breaks(const PointSet &pts, const PairPotential &phi, std::vector<double> &out) {
  const auto radii = phi.breakpoints();
  for (const auto &p : pts)
    for (double r : radii) {
      out.push_back(p[0] - r);
      if (r > 0.0) out.push_back(p[0] + r);
    }
}

} // namespace

Estimate estimate_k1(std::span<const PointSet> samples, const TorusDomain &dom) {
  require_samples(samples, "estimate_k1");
  std::vector<double> dens(samples.size());
  const double V = dom.volume();
  for (std::size_t i = 0; i < samples.size(); ++i)
    dens[i] = static_cast<double>(samples[i].size()) / V;
  return batch_means(dens);
}

std::vector<Estimate> estimate_density_profile(std::span<const PointSet> samples,
                                               const TorusDomain &dom, std::size_t n_bins) {
  require_samples(samples, "estimate_density_profile");
  const double L = dom.side();
  const double slab = dom.volume() / static_cast<double>(n_bins);
  std::vector<std::vector<double>> series(n_bins, std::vector<double>(samples.size(), 0.0));
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (const auto &p : samples[i]) {
      auto b = std::min(n_bins - 1, static_cast<std::size_t>(p[0] / L * static_cast<double>(n_bins)));
      series[b][i] += 1.0 / slab;
    }
  std::vector<Estimate> out;
  for (const auto &s : series)
    out.push_back(batch_means(s));
  return out;
}

RadialBins RadialBins::uniform(double r_max, std::size_t n) {
  if (n == 0 || !(r_max > 0.0)) throw std::invalid_argument("radial bins: need n > 0, r_max > 0");
  RadialBins b;
  for (std::size_t i = 0; i <= n; ++i)
    b.edges.push_back(r_max * static_cast<double>(i) / static_cast<double>(n));
  return b;
}

double RadialBins::shell_measure(std::size_t i, int dim) const {
  return ball_volume(dim, edges[i + 1]) - ball_volume(dim, edges[i]);
}

namespace {

// Per-sample series: [0] = |gamma| / V, [1 + b] = ordered pairs in bin b / (V |shell_b|).
std::vector<std::vector<double>> pair_series(std::span<const PointSet> samples,
                                             const TorusDomain &dom, const RadialBins &bins,
                                             std::vector<std::uint64_t> *totals) {
  const std::size_t nb = bins.size();
  const double V = dom.volume();
  std::vector<std::vector<double>> series(nb + 1, std::vector<double>(samples.size(), 0.0));
  std::vector<double> counts(nb);
  if (totals) totals->assign(nb, 0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    series[0][i] = static_cast<double>(samples[i].size()) / V;
    pair_histogram(samples[i], dom, bins, counts);
    for (std::size_t b = 0; b < nb; ++b) {
      series[b + 1][i] = counts[b] / (V * bins.shell_measure(b, dom.dim()));
      if (totals) (*totals)[b] += static_cast<std::uint64_t>(counts[b]);
    }
  }
  return series;
}

} // namespace

PairCorrelation estimate_k2(std::span<const PointSet> samples, const TorusDomain &dom,
                            const RadialBins &bins) {
  require_samples(samples, "estimate_k2");
  PairCorrelation pc;
  pc.bins = bins;
  auto series = pair_series(samples, dom, bins, &pc.pair_counts);
  for (std::size_t b = 0; b < bins.size(); ++b) {
    if (pc.pair_counts[b] == 0) pc.k2.push_back(std::nullopt);
    else pc.k2.push_back(batch_means(series[b + 1]));
  }
  return pc;
}

std::vector<std::optional<Estimate>> estimate_ursell2(std::span<const PointSet> samples,
                                                      const TorusDomain &dom,
                                                      const RadialBins &bins) {
  require_samples(samples, "estimate_ursell2");
  std::vector<std::uint64_t> totals;
  auto series = pair_series(samples, dom, bins, &totals);
  const std::size_t nb = bins.size();
  auto est = batch_function_vec(series, [nb](std::span<const double> m) {
    std::vector<double> u(nb);
    for (std::size_t b = 0; b < nb; ++b)
      u[b] = m[b + 1] - m[0] * m[0];
    return u;
  });
  std::vector<std::optional<Estimate>> out(nb);
  for (std::size_t b = 0; b < nb; ++b)
    if (totals[b] > 0) out[b] = est[b];
  return out;
}

double GnzFunctional::outer(double t) const {
  if (g == OuterKind::exp_clipped) return std::exp(std::min(t, clip));
  return poly[0] + t * (poly[1] + t * (poly[2] + t * poly[3]));
}

std::string GnzFunctional::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "f=" << f.describe() << ";psi=" << psi.describe() << ";g=";
  if (g == OuterKind::exp_clipped) os << "exp{clip=" << clip << "}";
  else os << "poly{" << poly[0] << "," << poly[1] << "," << poly[2] << "," << poly[3] << "}";
  return os.str();
}

namespace {

void check_functional(const GnzFunctional &F, const TorusDomain &dom) {
  bool g_zero = F.g == OuterKind::polynomial &&
                std::all_of(F.poly.begin(), F.poly.end(), [](double c) { return c == 0.0; });
  if (F.f.is_zero() || F.f.components().empty() || g_zero)
    throw std::invalid_argument("GNZ functional is identically zero");
  F.f.validate(dom);
  F.psi.validate(dom);
}

GnzResult finish(const std::vector<double> &lhs, const std::vector<double> &rhs,
                 double max_quad_error) {
  GnzResult r;
  r.lhs = batch_means(lhs);
  r.rhs = batch_means(rhs);
  std::vector<double> diff(lhs.size());
  for (std::size_t i = 0; i < lhs.size(); ++i)
    diff[i] = lhs[i] - rhs[i];
  r.diff = batch_means(diff);
  r.z_score = r.diff.std_error > 0.0 ? r.diff.value / r.diff.std_error
                                     : (r.diff.value == 0.0 ? 0.0 : INFINITY);
  r.max_quad_error = max_quad_error;
  return r;
}

} // namespace

GnzResult gnz_residual(std::span<const PointSet> samples, const ModelSpec &model,
                       const GnzFunctional &F, const GnzQuadrature &q) {
  require_samples(samples, "gnz_residual");
  check_functional(F, model.domain);
  const TorusDomain &dom = model.domain;
  std::vector<double> lhs(samples.size()), rhs(samples.size());
  double max_err = 0.0;
  std::vector<double> breaks;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Configuration gamma = model.make_configuration(samples[i]);
    const double S = F.psi.pair(gamma);
    const double gS = F.outer(S);
    double l = 0.0;
    for (const auto &p : gamma.points())
      l += F.f(p, dom);
    lhs[i] = l * gS;

    breaks.clear();
    if (dom.dim() == 1) {
      add_energy_breaks(gamma.points(), model.phi, breaks);
      for (double e : F.psi.edges_1d())
        breaks.push_back(e);
    }
    Rng rng(split_seed(q.seed, i));
    auto integrand = [&](const Point &x) {
      double fx = F.f(x, dom);
      if (fx == 0.0) return 0.0;
      double e = relative_energy(x, gamma, model.phi);
      if (std::isinf(e)) return 0.0;
      return model.z * std::exp(-e) * fx * F.outer(S + F.psi(x, dom));
    };
    auto res = integrate_over_support(F.f, dom, integrand, breaks, q.support, &rng);
    rhs[i] = res.value;
    if (res.l1 > 0.0) max_err = std::max(max_err, res.error / res.l1);
  }
  return finish(lhs, rhs, max_err);
}

GnzResult double_gnz_residual(std::span<const PointSet> samples, const ModelSpec &model,
                              const GnzFunctional &F, const GnzQuadrature &q) {
  require_samples(samples, "double_gnz_residual");
  check_functional(F, model.domain);
  const TorusDomain &dom = model.domain;
  const auto radii = model.phi.breakpoints();
  std::vector<double> lhs(samples.size()), rhs(samples.size());
  double max_err = 0.0;
  SupportQuadrature inner_q = q.support;
  inner_q.check = false;

  for (std::size_t i = 0; i < samples.size(); ++i) {
    Configuration gamma = model.make_configuration(samples[i]);
    const double S = F.psi.pair(gamma);
    double sf = 0.0;
    for (const auto &p : gamma.points())
      sf += F.f(p, dom);
    lhs[i] = sf * sf * F.outer(S);

    std::vector<double> inner_breaks;
    std::vector<double> outer_breaks;
    if (dom.dim() == 1) {
      add_energy_breaks(gamma.points(), model.phi, inner_breaks);
      for (double e : F.psi.edges_1d())
        inner_breaks.push_back(e);
      std::vector<double> base = inner_breaks;
      for (double e : F.f.edges_1d())
        base.push_back(e);
      outer_breaks = inner_breaks;
      for (double b : base)
        for (double r : radii) {
          outer_breaks.push_back(b - r);
          outer_breaks.push_back(b + r);
        }
    }
    Rng rng(split_seed(q.seed, i));

    // Papangelou factor z exp(-E(x, gamma)); zero inside hard cores.
    auto papangelou = [&](const Point &x) {
      double e = relative_energy(x, gamma, model.phi);
      return std::isinf(e) ? 0.0 : model.z * std::exp(-e);
    };

    auto outer = [&](const Point &x1) {
      double f1 = F.f(x1, dom);
      if (f1 == 0.0) return 0.0;
      double w1 = papangelou(x1);
      if (w1 == 0.0) return 0.0;
      const double a1 = S + F.psi(x1, dom);
      std::vector<double> br = inner_breaks;
      if (dom.dim() == 1)
        for (double r : radii) {
          br.push_back(x1[0] - r);
          br.push_back(x1[0] + r);
        }
      auto inner = [&](const Point &x2) {
        double f2 = F.f(x2, dom);
        if (f2 == 0.0) return 0.0;
        double cross = model.phi(min_image_disp(x1, x2, dom), dom.dim());
        if (std::isinf(cross)) return 0.0;
        double w2 = papangelou(x2);
        return w2 * std::exp(-cross) * f2 * F.outer(a1 + F.psi(x2, dom));
      };
      double two = integrate_over_support(F.f, dom, inner, br, inner_q, &rng).value;
      double diag = f1 * F.outer(a1);
      return w1 * f1 * (two + diag);
    };
    auto res = integrate_over_support(F.f, dom, outer, outer_breaks, q.support, &rng);
    rhs[i] = res.value;
    if (res.l1 > 0.0) max_err = std::max(max_err, res.error / res.l1);
  }
  return finish(lhs, rhs, max_err);
}

ExpMomentResult exp_moment(std::span<const PointSet> samples, const ModelSpec &model,
                           const TestFunction &f, double xi, const RadialBins &bins) {
  require_samples(samples, "exp_moment");
  const TorusDomain &dom = model.domain;
  f.validate(dom);
  ExpMomentResult out;
  std::vector<double> mc(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    mc[i] = std::exp(f.pair(samples[i], dom));
  out.mc = batch_means(mc);
  if (f.components().empty() || f.is_zero()) return out;

  Rng rng(99);
  SupportQuadrature sq;
  auto h = [&](const Point &x) { return std::expm1(f(x, dom)); };
  auto h_int = integrate_over_support(f, dom, h, {}, sq, &rng);
  if (model.phi.is_zero()) out.poisson_closed_form = std::exp(model.z * h_int.value);

  if (dom.dim() != 1 || xi <= 0.0) return out;

  // W_b = int int h(x1) h(x2) 1{|x1 - x2| in bin b}.
  std::vector<double> W(bins.size(), 0.0);
  const auto edges = f.edges_1d();
  for (std::size_t b = 0; b < bins.size(); ++b) {
    const double lo = bins.edges[b], hi = bins.edges[b + 1];
    std::vector<double> ob;
    for (double e : edges)
      for (double r : {lo, hi}) {
        ob.push_back(e - r);
        ob.push_back(e + r);
      }
    auto outer = [&](const Point &x1) {
      double h1 = h(x1);
      if (h1 == 0.0) return 0.0;
      Breakpoints br(0.0);
      for (double e : edges)
        for (int k = -2; k <= 2; ++k)
          br.add(e + k * dom.side());
      auto hl = [&](double x) { return h(wrap(Point{x, 0.0, 0.0}, dom)); };
      double s = integrate_1d(x1[0] + lo, x1[0] + hi, br, hl, false).value +
                 integrate_1d(x1[0] - hi, x1[0] - lo, br, hl, false).value;
      return h1 * s;
    };
    W[b] = integrate_over_support(f, dom, outer, ob, sq, &rng).value;
  }

  std::vector<std::vector<double>> series = pair_series(samples, dom, bins, nullptr);
  series.push_back(mc);
  const double H1 = h_int.value;
  const std::size_t nb = bins.size();
  auto series_value = [&](std::span<const double> m) {
    double v = 1.0 + m[0] * H1;
    for (std::size_t b = 0; b < nb; ++b)
      v += 0.5 * m[b + 1] * W[b];
    return v;
  };
  SeriesCheck sc;
  sc.series = batch_function(series, series_value);
  Estimate diff = batch_function(series, [&](std::span<const double> m) {
    return m[nb + 1] - series_value(m);
  });
  double hl1 = std::abs(h_int.l1);
  double t = xi * hl1;
  sc.xi = xi;
  sc.truncation_bound = t * t * t * std::exp(t) / 6.0;
  sc.consistent = std::abs(diff.value) <= 3.0 * diff.std_error + sc.truncation_bound;
  out.series = sc;
  return out;
}

RuelleReport ruelle_probe(std::span<const PointSet> samples, const ModelSpec &model,
                          const RadialBins &bins, std::optional<double> xi_reference) {
  Estimate k1 = estimate_k1(samples, model.domain);
  PairCorrelation pc = estimate_k2(samples, model.domain, bins);
  RuelleReport rep;
  rep.xi_hat = k1.value;
  for (const auto &k : pc.k2)
    if (k) rep.xi_hat = std::max(rep.xi_hat, std::sqrt(std::max(0.0, k->value + 3.0 * k->std_error)));
  if (xi_reference) rep.xi_reference = *xi_reference;
  else if (model.phi.positive()) rep.xi_reference = model.z;
  else rep.xi_reference = rep.xi_hat;

  const double ref = rep.xi_reference;
  if (k1.value - 3.0 * k1.std_error > ref) rep.violations.push_back({1, 0, k1.value, ref});
  for (std::size_t b = 0; b < pc.k2.size(); ++b) {
    const auto &k = pc.k2[b];
    if (k && k->value - 3.0 * k->std_error > ref * ref)
      rep.violations.push_back({2, b, k->value, ref * ref});
  }
  return rep;
}

AlphaConsistency alpha_consistency(std::span<const PointSet> samples, const ModelSpec &model,
                                   std::size_t probes) {
  require_samples(samples, "alpha_consistency");
  if (probes == 0) throw std::invalid_argument("alpha_consistency: need at least one probe");
  const TorusDomain &dom = model.domain;
  const double V = dom.volume(), mass = model.kernel.mass(), z = model.z;
  std::vector<Point> at(probes);
  for (std::size_t k = 0; k < probes; ++k)
    for (int c = 0; c < dom.dim(); ++c)
      at[k][c] = (static_cast<double>(k) + 0.5) / static_cast<double>(probes) * dom.side();

  const std::size_t n = samples.size();
  std::vector<double> dens(n), boltz(n);
  for (std::size_t i = 0; i < n; ++i) {
    Configuration g = model.make_configuration(samples[i]);
    dens[i] = static_cast<double>(samples[i].size()) / V;
    double acc = 0.0;
    for (const auto &x : at) {
      double e = relative_energy(x, g, model.phi);
      acc += std::isinf(e) ? 0.0 : std::exp(-e);
    }
    boltz[i] = acc / static_cast<double>(probes);
  }
  std::vector<std::vector<double>> series{dens, boltz};
  AlphaConsistency out;
  out.alpha_k1 = batch_function(series, [&](std::span<const double> m) { return m[0] * mass / z; });
  out.alpha_gnz = batch_function(series, [&](std::span<const double> m) { return m[1] * mass; });
  out.diff = batch_function(series, [&](std::span<const double> m) { return (m[0] / z - m[1]) * mass; });
  out.z_score = out.diff.std_error > 0.0 ? out.diff.value / out.diff.std_error
                                         : (out.diff.value == 0.0 ? 0.0 : INFINITY);
  return out;
}

} // namespace kgl
