#pragma once

#include <optional>
#include <vector>

#include "kgl/geometry.hpp"

namespace kgl {

using PointSet = std::vector<Point>;

/// A finite point set on the torus with a cell list for range-R queries.
///
/// Point ids are indices into points(); remove() swap-removes, so the last
/// id takes the removed slot.
class Configuration {
public:
  Configuration() = default;
  Configuration(const TorusDomain &dom, double interaction_range);
  Configuration(const TorusDomain &dom, double interaction_range, const PointSet &pts);

  const TorusDomain &domain() const { return dom_; }
  double interaction_range() const { return range_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const PointSet &points() const { return points_; }
  const Point &point(std::size_t id) const { return points_[id]; }
  const CellList &cells() const { return cells_; }

  /// Inserts wrap(x); returns its id.
  std::size_t add(const Point &x);
  void remove(std::size_t id);
  void move(std::size_t id, const Point &x);
  void clear();

  /// Calls fn(id, disp) for every point within distance r of x, where disp is
  /// the minimal-image displacement x - point(id).
  template <class Fn>
  void for_each_within(const Point &x, double r, Fn &&fn) const {
    const int d = dom_.dim();
    const double r2 = r * r;
    cells_.visit_candidates(x, r, [&](std::size_t id) {
      Point disp = min_image_disp(x, points_[id], dom_);
      if (norm2(disp, d) <= r2) fn(id, disp);
    });
  }

  std::optional<double> cached_energy() const { return energy_; }
  void set_cached_energy(double u) { energy_ = u; }

private:
  TorusDomain dom_;
  double range_ = 0.0;
  PointSet points_;
  CellList cells_;
  std::optional<double> energy_;
};

} // namespace kgl
