#include "kgl/model.hpp"

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "kgl/errors.hpp"

namespace kgl {

void ModelSpec::validate() const {
  if (!(z > 0.0) || !std::isfinite(z)) throw ConfigError("z", "activity must be positive");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ConfigError("eps", "eps must be positive");
  if (!(s >= 0.0 && s <= 1.0)) throw ConfigError("s", "s must lie in [0, 1]");
  if (kernel.dim() != domain.dim())
    throw ConfigError("kernel", "kernel dimension differs from domain dimension");
  if (!(phi.range() < 0.5 * domain.side()))
    throw ConfigError("potential.R", "interaction range must be < L/2");
  if (rate_cap) {
    if (!(*rate_cap >= 1.0) || !std::isfinite(*rate_cap))
      throw ConfigError("rate_cap", "rate cap must be finite and >= 1");
  } else if (s > 0.0 || !phi.positive()) {
    throw ConfigError("rate_cap", "a finite rate cap is required when s > 0 or phi has a "
                                  "negative part");
  }
}

double ModelSpec::energy_cap() const {
  if (rate_cap) return *rate_cap;
  return 1.0;
}

std::string ModelSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "d=" << domain.dim() << ";L=" << domain.side() << ";phi=" << phi.describe()
     << ";z=" << z << ";a=" << kernel.describe() << ";eps=" << eps << ";s=" << s
     << ";M=";
  if (rate_cap) os << *rate_cap;
  else os << "auto";
  return os.str();
}

std::string ModelSpec::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : describe()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

double relative_energy(const Point &x, const Configuration &gamma, const PairPotential &phi,
                       std::optional<std::size_t> exclude) {
  if (phi.is_zero() || gamma.empty()) return 0.0;
  const int d = gamma.domain().dim();
  double e = 0.0;
  bool overlap = false;
  gamma.for_each_within(x, phi.range(), [&](std::size_t id, const Point &disp) {
    if (overlap || (exclude && id == *exclude)) return;
    double v = phi.at(norm(disp, d));
    if (std::isinf(v)) overlap = true;
    else e += v;
  });
  return overlap ? kInfiniteEnergy : e;
}

double total_energy(const Configuration &gamma, const PairPotential &phi) {
  if (phi.is_zero()) return 0.0;
  const int d = gamma.domain().dim();
  double u = 0.0;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    bool overlap = false;
    gamma.for_each_within(gamma.point(i), phi.range(), [&](std::size_t j, const Point &disp) {
      if (j <= i) return;
      double v = phi.at(norm(disp, d));
      if (std::isinf(v)) overlap = true;
      else u += v;
    });
    if (overlap) return kInfiniteEnergy;
  }
  return u;
}

double total_energy_direct(const PointSet &pts, const TorusDomain &dom, const PairPotential &phi) {
  double u = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double v = phi.at(torus_distance(pts[i], pts[j], dom));
      if (std::isinf(v)) return kInfiniteEnergy;
      u += v;
    }
  return u;
}

double kawasaki_energy_factor(double e_from, double e_to, double s) {
  if (std::isinf(e_to)) return 0.0;
  return std::exp(s * e_from - (1.0 - s) * e_to);
}

double kawasaki_rate(std::size_t x_id, const Point &y, const Configuration &gamma,
                     const ModelSpec &m) {
  const Point &x = gamma.point(x_id);
  double kern = a_eps_eval(m.kernel, m.eps, min_image_disp(x, y, m.domain), m.domain);
  if (kern == 0.0) return 0.0;
  double e_to = relative_energy(y, gamma, m.phi, x_id);
  if (std::isinf(e_to)) return 0.0;
  double e_from = m.s > 0.0 ? relative_energy(x, gamma, m.phi, x_id) : 0.0;
  double f = kawasaki_energy_factor(e_from, e_to, m.s);
  if (!std::isfinite(f)) throw BoundViolation("kawasaki rate: energy factor overflow");
  return kern * f;
}

double glauber_death_rate(std::size_t x_id, const Configuration &gamma, const ModelSpec &m,
                          double alpha) {
  if (m.s == 0.0) return alpha;
  double e = relative_energy(gamma.point(x_id), gamma, m.phi, x_id);
  double f = std::exp(m.s * e);
  if (!std::isfinite(f)) throw BoundViolation("glauber death rate: energy factor overflow");
  return alpha * f;
}

double glauber_birth_density(const Point &x, const Configuration &gamma, const ModelSpec &m,
                             double alpha) {
  double e = relative_energy(x, gamma, m.phi);
  if (std::isinf(e)) return 0.0;
  double f = std::exp(-(1.0 - m.s) * e);
  if (!std::isfinite(f)) throw BoundViolation("glauber birth density: energy factor overflow");
  return alpha * m.z * f;
}

double alpha_from_k1(double k1, double z, const JumpKernel &a) {
  if (!(k1 > 0.0)) throw std::invalid_argument("alpha_from_k1: k1 must be positive");
  return k1 * a.mass() / z;
}

namespace {

double sphere_factor(int dim) {
  switch (dim) {
  case 1: return 2.0;
  case 2: return 2.0 * std::numbers::pi;
  default: return 4.0 * std::numbers::pi;
  }
}

// Integral over R^d of g(phi(|x|)) for a radial integrand vanishing beyond R,
// split at the potential's breakpoints.
double radial_integral(const PairPotential &phi, int dim, double (*g)(double), double *err) {
  using boost::math::quadrature::gauss_kronrod;
  std::vector<double> nodes{0.0};
  for (double b : phi.breakpoints())
    if (b > 0.0 && b < phi.range()) nodes.push_back(b);
  nodes.push_back(phi.range());
  const double sf = sphere_factor(dim);
  auto integrand = [&](double r) { return sf * std::pow(r, dim - 1) * g(phi.at(r)); };
  double total = 0.0, total_err = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    double e = 0.0;
    total += gauss_kronrod<double, 31>::integrate(integrand, nodes[i], nodes[i + 1], 15, 1e-12,
                                                  &e);
    total_err += e;
  }
  if (err) *err = total_err;
  return total;
}

double abs_mayer(double v) { return std::isinf(v) ? 1.0 : std::abs(std::exp(-v) - 1.0); }
double mayer(double v) { return std::isinf(v) ? 1.0 : 1.0 - std::exp(-v); }

} // namespace

double mayer_integral(const PairPotential &phi, int dim) {
  if (phi.is_zero()) return 0.0;
  return radial_integral(phi, dim, &mayer, nullptr);
}

LahtCheck lahht_check(const ModelSpec &m) {
  LahtCheck c;
  const double B = m.phi.stability_constant(m.domain.dim());
  c.rhs = 1.0 / (2.0 * std::exp(1.0 + 2.0 * B));
  if (!m.phi.is_zero()) {
    double err = 0.0;
    double integral = radial_integral(m.phi, m.domain.dim(), &abs_mayer, &err);
    if (!(err <= 1e-8 * std::max(1.0, integral)))
      throw QuadratureError("LA-HT integral did not converge");
    c.lhs = m.z * integral;
    c.quad_error = m.z * err;
  }
  c.satisfied = c.lhs < c.rhs;
  return c;
}

} // namespace kgl
