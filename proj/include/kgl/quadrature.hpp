#pragma once

#include <functional>
#include <vector>

namespace kgl {

struct QuadResult {
  double value = 0.0;
  /// |G20 - G10| summed over pieces.
  double error = 0.0;
  /// Integral of |fn|, the scale for relative error checks.
  double l1 = 0.0;

  QuadResult &operator+=(const QuadResult &o) {
    value += o.value;
    error += o.error;
    l1 += o.l1;
    return *this;
  }
  bool within(double rel_tol, double abs_floor = 1e-300) const {
    return error <= rel_tol * l1 + abs_floor;
  }
};

/// Sorted breakpoints inside an interval, including periodic images.
class Breakpoints {
public:
  explicit Breakpoints(double period = 0.0) : period_(period) {}

  void add(double p) { pts_.push_back(p); }
  /// Adds p + k * period for k in {-2, ..., 2}.
  void add_periodic(double p);
  /// Sorted unique points strictly inside (lo, hi), with lo and hi at the ends.
  std::vector<double> nodes(double lo, double hi) const;

private:
  double period_;
  std::vector<double> pts_;
};

/// Integrates fn over [lo, hi] split at the given nodes (from Breakpoints::nodes)
/// with 20-point Gauss-Legendre on each piece. When `check` is set, each piece
/// is also done with 10 points and the disagreement is returned as the error.
QuadResult integrate_pieces(const std::vector<double> &nodes,
                            const std::function<double(double)> &fn, bool check = true);

/// Convenience: nodes from `breaks` on [lo, hi], then integrate_pieces.
QuadResult integrate_1d(double lo, double hi, const Breakpoints &breaks,
                        const std::function<double(double)> &fn, bool check = true);

} // namespace kgl
