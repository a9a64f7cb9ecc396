#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace kgl {

/// A point or displacement; coordinates beyond the domain dimension are zero.
using Point = std::array<double, 3>;

/// Periodic box [0, L)^d, d in {1, 2, 3}.
class TorusDomain {
public:
  TorusDomain() = default;
  TorusDomain(int dim, double side);

  int dim() const { return dim_; }
  double side() const { return side_; }
  double volume() const;

private:
  int dim_ = 1;
  double side_ = 1.0;
};

/// Maps every coordinate into [0, L).
Point wrap(const Point &x, const TorusDomain &dom);

/// Minimal-image displacement x - y with each coordinate in [-L/2, L/2).
Point min_image_disp(const Point &x, const Point &y, const TorusDomain &dom);

double norm(const Point &v, int dim);
double norm2(const Point &v, int dim);
double torus_distance(const Point &x, const Point &y, const TorusDomain &dom);

/// Volume of the d-ball of radius r.
double ball_volume(int dim, double r);

/// Uniform grid of cubic cells with side >= a minimum length, holding point ids.
///
/// Ids are caller-owned indices into a point array. The list keeps, for each
/// id, the cell it lives in and its slot, so insert/erase/move are O(1).
class CellList {
public:
  CellList() = default;
  CellList(const TorusDomain &dom, double min_cell_side);

  const TorusDomain &domain() const { return dom_; }
  int cells_per_axis() const { return n_; }
  double cell_side() const { return h_; }
  std::size_t size() const { return cell_of_.size(); }

  /// Registers id (must equal size()) at position x.
  void push_back(const Point &x);
  /// Removes the last id.
  void pop_back();
  /// Re-files id after its position changed.
  void update(std::size_t id, const Point &x);
  /// Swap-remove: id takes the position of the last id, which is dropped.
  void swap_remove(std::size_t id, const Point &last_pos);

  void clear();

  /// Calls fn(id) for every id in cells that may hold points within radius r
  /// of x. Candidates must still be filtered by distance.
  void for_each_candidate(const Point &x, double r,
                          const std::function<void(std::size_t)> &fn) const;

  /// Ids at minimal-image distance <= r from x.
  std::vector<std::size_t> neighbors(const std::vector<Point> &points,
                                     const Point &x, double r) const;

  /// True iff every id is filed in the cell containing its position.
  bool consistent_with(const std::vector<Point> &points) const;

  template <class Fn>
  void visit_candidates(const Point &x, double r, Fn &&fn) const;

private:
  int cell_index(const Point &x) const;
  void insert(std::size_t id, int cell);
  void erase(std::size_t id);

  TorusDomain dom_;
  int n_ = 1;
  double h_ = 1.0;
  std::vector<std::vector<std::size_t>> cells_;
  std::vector<int> cell_of_;
  std::vector<std::size_t> slot_of_;
};

template <class Fn>
void CellList::visit_candidates(const Point &x, double r, Fn &&fn) const {
  const int d = dom_.dim();
  int reach = static_cast<int>(std::ceil(r / h_));
  // Cells visited more than once would double count.
  if (2 * reach + 1 >= n_) {
    for (const auto &cell : cells_)
      for (std::size_t id : cell)
        fn(id);
    return;
  }
  std::array<int, 3> c{0, 0, 0};
  for (int k = 0; k < d; ++k) {
    double u = x[k] / h_;
    int ci = static_cast<int>(u);
    if (ci >= n_) ci = n_ - 1;
    if (ci < 0) ci = 0;
    c[k] = ci;
  }
  const int rz = d > 2 ? reach : 0;
  const int ry = d > 1 ? reach : 0;
  for (int dz = -rz; dz <= rz; ++dz) {
    int iz = d > 2 ? ((c[2] + dz) % n_ + n_) % n_ : 0;
    for (int dy = -ry; dy <= ry; ++dy) {
      int iy = d > 1 ? ((c[1] + dy) % n_ + n_) % n_ : 0;
      for (int dx = -reach; dx <= reach; ++dx) {
        int ix = ((c[0] + dx) % n_ + n_) % n_;
        int idx = ix + n_ * (iy + n_ * iz);
        for (std::size_t id : cells_[idx])
          fn(id);
      }
    }
  }
}

} // namespace kgl
