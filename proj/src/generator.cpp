#include <algorithm>
#include <cmath>
#include <sstream>

#include "kgl/errors.hpp"
#include "kgl/quadrature.hpp"
#include "kgl/scaling.hpp"

namespace kgl {

namespace {

void require_s0(const ModelSpec &m) {
  if (m.s != 0.0) throw ConfigError("s", "generator evaluation is implemented for s = 0 only");
}

// Adds v + k L for every k that lands inside [lo, hi].
void add_images(Breakpoints &br, double v, double L, double lo, double hi) {
  double k0 = std::ceil((lo - v) / L), k1 = std::floor((hi - v) / L);
  for (double k = k0; k <= k1; k += 1.0)
    br.add(v + k * L);
}

struct KernelIntegral {
  double value = 0.0;
  double rel_error = 0.0;
};

// int over the torus of a_eps(x - y) g(y) dy, where g is evaluated at wrapped
// points. The kernel is integrated over its unwrapped support around x,
// which equals integrating the periodized kernel over one period.
class KernelQuadrature {
public:
  KernelQuadrature(const Configuration &gamma, const ModelSpec &m, const TestFunction &phi_test,
                   const GeneratorQuadrature &q)
      : gamma_(gamma), m_(m), test_(phi_test), q_(q), rng_(q.seed) {}

  template <class G>
  KernelIntegral integrate(const Point &x, std::size_t x_id, G &&g) {
    const TorusDomain &dom = m_.domain;
    const int d = dom.dim();
    const double reach = m_.kernel.cutoff() / m_.eps;
    const double scale = std::pow(m_.eps, d);
    if (d == 1) {
      const double L = dom.side();
      const double lo = x[0] - reach, hi = x[0] + reach;
      Breakpoints br;
      const auto radii = m_.phi.breakpoints();
      const auto &pts = gamma_.points();
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (j == x_id) continue;
        for (double r : radii) {
          add_images(br, pts[j][0] - r, L, lo, hi);
          if (r > 0.0) add_images(br, pts[j][0] + r, L, lo, hi);
        }
      }
      for (double e : test_.edges_1d())
        add_images(br, e, L, lo, hi);
      auto fn = [&](double y) {
        double k = m_.kernel.density(Point{m_.eps * (x[0] - y), 0.0, 0.0});
        if (k == 0.0) return 0.0;
        return scale * k * g(wrap(Point{y, 0.0, 0.0}, dom));
      };
      QuadResult r = integrate_1d(lo, hi, br, fn, true);
      return {r.value, r.l1 > 0.0 ? r.error / r.l1 : 0.0};
    }
    if (d == 2) {
      const double R = m_.phi.range() > 0.0 ? m_.phi.range() : reach;
      const double h = std::min(R, reach) * q_.grid_fraction;
      double fine = grid(x, reach, h, scale, g), coarse = grid(x, reach, 2.0 * h, scale, g);
      double l1 = std::abs(fine);
      return {fine, l1 > 0.0 ? std::abs(fine - coarse) / l1 : 0.0};
    }
    // Importance sampling from a / ||a||_1.
    double sum = 0.0, sum2 = 0.0;
    const double mass = m_.kernel.mass();
    for (std::size_t i = 0; i < q_.mc_draws; ++i) {
      Point u = m_.kernel.sample(rng_);
      Point y{x[0] + u[0] / m_.eps, x[1] + u[1] / m_.eps, x[2] + u[2] / m_.eps};
      double v = mass * g(wrap(y, dom));
      sum += v;
      sum2 += v * v;
    }
    const double n = static_cast<double>(q_.mc_draws);
    double mean = sum / n;
    double se = std::sqrt(std::max(0.0, sum2 / n - mean * mean) / n);
    return {mean, std::abs(mean) > 0.0 ? se / std::abs(mean) : 0.0};
  }

private:
  template <class G>
  double grid(const Point &x, double reach, double h, double scale, G &&g) {
    const int n = std::max(2, static_cast<int>(std::ceil(2.0 * reach / h)));
    const double step = 2.0 * reach / n;
    double total = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        Point u{-reach + (a + 0.5) * step, -reach + (b + 0.5) * step, 0.0};
        double k = m_.kernel.density(Point{m_.eps * u[0], m_.eps * u[1], 0.0});
        if (k == 0.0) continue;
        total += scale * k * g(wrap(Point{x[0] + u[0], x[1] + u[1], 0.0}, m_.domain)) * step * step;
      }
    return total;
  }

  const Configuration &gamma_;
  const ModelSpec &m_;
  const TestFunction &test_;
  GeneratorQuadrature q_;
  Rng rng_;
};

// Monte Carlo integrals (d = 3) report their error but are never refused.
void check_resolution(double rel_error, int dim, const GeneratorQuadrature &q, const char *what) {
  if (dim < 3 && rel_error > q.rel_tol) {
    std::ostringstream os;
    os << what << ": quadrature doubling check disagrees by " << rel_error
       << " (relative), above " << q.rel_tol;
    throw QuadratureError(os.str());
  }
}

} // namespace

GeneratorValue apply_H_kawasaki_exp(const TestFunction &phi_test, const Configuration &gamma,
                                    const ModelSpec &m, const GeneratorQuadrature &q) {
  require_s0(m);
  GeneratorValue out;
  if (gamma.empty() || phi_test.is_zero() || phi_test.components().empty()) return out;
  const TorusDomain &dom = m.domain;
  const double F = std::exp(phi_test.pair(gamma));
  const double reach = m.kernel.cutoff() / m.eps;
  KernelQuadrature kq(gamma, m, phi_test, q);
  double plus = 0.0, minus = 0.0, err = 0.0;
  for (std::size_t id = 0; id < gamma.size(); ++id) {
    const Point &x = gamma.point(id);
    const double px = phi_test(x, dom);
    auto boltz = [&](const Point &y) {
      double e = relative_energy(y, gamma, m.phi, id);
      return std::isinf(e) ? 0.0 : std::exp(-e);
    };
    if (px != 0.0) {
      KernelIntegral A = kq.integrate(x, id, boltz);
      minus += std::expm1(-px) * A.value;
      err = std::max(err, A.rel_error);
    }
    // The addition part needs the kernel support to meet the test support.
    bool meets = false;
    for (const auto &c : phi_test.components())
      if (c.height != 0.0 && torus_distance(x, c.center, dom) < reach + c.radius) meets = true;
    if (!meets && reach < 0.5 * dom.side()) continue;
    KernelIntegral B = kq.integrate(x, id, [&](const Point &y) {
      double py = phi_test(y, dom);
      return py == 0.0 ? 0.0 : boltz(y) * std::expm1(py);
    });
    plus += std::exp(-px) * B.value;
    err = std::max(err, B.rel_error);
  }
  check_resolution(err, dom.dim(), q, "kawasaki generator");
  out.minus = -F * minus;
  out.plus = -F * plus;
  out.total = out.plus + out.minus;
  out.quad_error = err;
  return out;
}

GeneratorValue apply_H_glauber_exp(const TestFunction &phi_test, const Configuration &gamma,
                                   const ModelSpec &m, double alpha,
                                   const GeneratorQuadrature &q) {
  require_s0(m);
  GeneratorValue out;
  if (phi_test.is_zero() || phi_test.components().empty()) return out;
  const TorusDomain &dom = m.domain;
  const double F = std::exp(phi_test.pair(gamma));
  double minus = 0.0;
  for (const auto &x : gamma.points())
    minus += std::expm1(-phi_test(x, dom));

  std::vector<double> breaks;
  if (dom.dim() == 1) {
    const auto radii = m.phi.breakpoints();
    for (const auto &p : gamma.points())
      for (double r : radii) {
        breaks.push_back(p[0] - r);
        if (r > 0.0) breaks.push_back(p[0] + r);
      }
  }
  SupportQuadrature sq;
  if (dom.dim() == 2) sq.grid_spacing = (m.phi.range() > 0.0 ? m.phi.range() : 1.0) * q.grid_fraction;
  sq.mc_draws = q.mc_draws;
  Rng rng(q.seed);
  auto res = integrate_over_support(
      phi_test, dom,
      [&](const Point &y) {
        double e = relative_energy(y, gamma, m.phi);
        return std::isinf(e) ? 0.0 : std::exp(-e) * std::expm1(phi_test(y, dom));
      },
      breaks, sq, &rng);
  double rel = res.l1 > 0.0 ? res.error / res.l1 : 0.0;
  check_resolution(rel, dom.dim(), q, "glauber generator");
  out.minus = -alpha * F * minus;
  out.plus = -alpha * m.z * F * res.value;
  out.total = out.plus + out.minus;
  out.quad_error = rel;
  return out;
}

} // namespace kgl
