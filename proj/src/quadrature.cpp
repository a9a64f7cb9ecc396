#include "kgl/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

namespace kgl {

void Breakpoints::add_periodic(double p) {
  if (period_ <= 0.0) {
    pts_.push_back(p);
    return;
  }
  for (int k = -2; k <= 2; ++k)
    pts_.push_back(p + k * period_);
}

std::vector<double> Breakpoints::nodes(double lo, double hi) const {
  std::vector<double> out;
  out.reserve(pts_.size() + 2);
  out.push_back(lo);
  const double tiny = 1e-12 * std::max(1.0, std::abs(hi - lo));
  for (double p : pts_)
    if (p > lo + tiny && p < hi - tiny) out.push_back(p);
  out.push_back(hi);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [&](double a, double b) { return std::abs(a - b) <= tiny; }),
            out.end());
  if (out.back() != hi) out.back() = hi;
  return out;
}

QuadResult integrate_pieces(const std::vector<double> &nodes,
                            const std::function<double(double)> &fn, bool check) {
  using boost::math::quadrature::gauss;
  QuadResult r;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    double a = nodes[i], b = nodes[i + 1];
    if (!(b > a)) continue;
    double l1 = 0.0;
    double fine = gauss<double, 20>::integrate(fn, a, b, &l1);
    r.value += fine;
    r.l1 += l1;
    if (check) {
      double coarse = gauss<double, 10>::integrate(fn, a, b);
      r.error += std::abs(fine - coarse);
    }
  }
  return r;
}

QuadResult integrate_1d(double lo, double hi, const Breakpoints &breaks,
                        const std::function<double(double)> &fn, bool check) {
  if (!(hi > lo)) return {};
  return integrate_pieces(breaks.nodes(lo, hi), fn, check);
}

} // namespace kgl
