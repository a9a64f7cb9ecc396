#include "kgl/kernel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kgl/errors.hpp"

namespace kgl {

namespace {

double gaussian_mass(int dim, double sigma, double rc) {
  using std::numbers::pi;
  const double x = rc / (sigma * std::numbers::sqrt2);
  switch (dim) {
  case 1:
    return sigma * std::sqrt(2.0 * pi) * std::erf(x);
  case 2:
    return 2.0 * pi * sigma * sigma * (1.0 - std::exp(-rc * rc / (2.0 * sigma * sigma)));
  default: {
    double g = std::pow(2.0 * pi * sigma * sigma, 1.5);
    return g * (std::erf(x) - std::sqrt(2.0 / pi) * (rc / sigma) *
                                  std::exp(-rc * rc / (2.0 * sigma * sigma)));
  }
  }
}

} // namespace

JumpKernel JumpKernel::uniform_ball(int dim, double r, double amplitude) {
  if (dim < 1 || dim > 3) throw ConfigError("kernel", "dimension must be 1, 2 or 3");
  if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("kernel.r", "radius must be positive");
  if (!(amplitude > 0.0)) throw ConfigError("kernel.amplitude", "amplitude must be positive");
  JumpKernel k;
  k.kind_ = KernelKind::uniform_ball;
  k.dim_ = dim;
  k.cutoff_ = r;
  k.amplitude_ = amplitude;
  k.norm_ = amplitude / ball_volume(dim, r);
  return k;
}

JumpKernel JumpKernel::gaussian_truncated(int dim, double sigma, double r_cut, double amplitude) {
  if (dim < 1 || dim > 3) throw ConfigError("kernel", "dimension must be 1, 2 or 3");
  if (!(sigma > 0.0)) throw ConfigError("kernel.sigma", "sigma must be positive");
  if (!(r_cut > 0.0) || !std::isfinite(r_cut))
    throw ConfigError("kernel.r_cut", "cutoff must be positive");
  if (!(amplitude > 0.0)) throw ConfigError("kernel.amplitude", "amplitude must be positive");
  JumpKernel k;
  k.kind_ = KernelKind::gaussian_truncated;
  k.dim_ = dim;
  k.cutoff_ = r_cut;
  k.sigma_ = sigma;
  k.amplitude_ = amplitude;
  k.norm_ = amplitude / gaussian_mass(dim, sigma, r_cut);
  return k;
}

double JumpKernel::density(const Point &u) const {
  double r2 = norm2(u, dim_);
  if (r2 > cutoff_ * cutoff_) return 0.0;
  if (kind_ == KernelKind::uniform_ball) return norm_;
  return norm_ * std::exp(-r2 / (2.0 * sigma_ * sigma_));
}

Point JumpKernel::sample(Rng &rng) const {
  Point u{0.0, 0.0, 0.0};
  if (kind_ == KernelKind::uniform_ball) {
    if (dim_ == 1) {
      u[0] = rng.uniform(-cutoff_, cutoff_);
      return u;
    }
    do {
      for (int k = 0; k < dim_; ++k)
        u[k] = rng.uniform(-cutoff_, cutoff_);
    } while (norm2(u, dim_) > cutoff_ * cutoff_);
    return u;
  }
  do {
    for (int k = 0; k < dim_; ++k)
      u[k] = sigma_ * rng.normal();
  } while (norm2(u, dim_) > cutoff_ * cutoff_);
  return u;
}

JumpKernel JumpKernel::scaled(double factor) const {
  JumpKernel k = *this;
  k.amplitude_ *= factor;
  k.norm_ *= factor;
  return k;
}

std::string JumpKernel::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind_ == KernelKind::uniform_ball)
    os << "uniform_ball{r=" << cutoff_;
  else
    os << "gaussian_truncated{sigma=" << sigma_ << ",r_cut=" << cutoff_;
  os << ",amplitude=" << amplitude_ << "}";
  return os.str();
}

double a_eps_eval(const JumpKernel &a, double eps, const Point &disp, const TorusDomain &dom) {
  const int d = dom.dim();
  const double L = dom.side();
  const double scale = std::pow(eps, d);
  const double reach = a.cutoff() / eps; // support radius of a_eps
  Point base = min_image_disp(disp, Point{0.0, 0.0, 0.0}, dom);
  if (reach < 0.5 * L) {
    Point u{0.0, 0.0, 0.0};
    for (int k = 0; k < d; ++k)
      u[k] = eps * base[k];
    return scale * a.density(u);
  }
  const int K = static_cast<int>(std::ceil(reach / L)) + 1;
  const int kz = d > 2 ? K : 0, ky = d > 1 ? K : 0;
  double sum = 0.0;
  for (int nz = -kz; nz <= kz; ++nz)
    for (int ny = -ky; ny <= ky; ++ny)
      for (int nx = -K; nx <= K; ++nx) {
        Point u{eps * (base[0] + nx * L), d > 1 ? eps * (base[1] + ny * L) : 0.0,
                d > 2 ? eps * (base[2] + nz * L) : 0.0};
        sum += a.density(u);
      }
  return scale * sum;
}

} // namespace kgl
