#include "kgl/geometry.hpp"

#include <algorithm>
#include <cassert>
#include <numbers>
#include <stdexcept>

namespace kgl {

TorusDomain::TorusDomain(int dim, double side) : dim_(dim), side_(side) {
  if (dim < 1 || dim > 3)
    throw std::invalid_argument("torus dimension must be 1, 2 or 3");
  if (!(side > 0.0) || !std::isfinite(side))
    throw std::invalid_argument("torus side length must be positive");
}

double TorusDomain::volume() const { return std::pow(side_, dim_); }

Point wrap(const Point &x, const TorusDomain &dom) {
  const double L = dom.side();
  Point out{0.0, 0.0, 0.0};
  for (int k = 0; k < dom.dim(); ++k) {
    double v = x[k] - L * std::floor(x[k] / L);
    // Rounding can land exactly on L for tiny negative inputs.
    if (v >= L) v = 0.0;
    out[k] = v;
  }
  return out;
}

Point min_image_disp(const Point &x, const Point &y, const TorusDomain &dom) {
  const double L = dom.side();
  Point out{0.0, 0.0, 0.0};
  for (int k = 0; k < dom.dim(); ++k) {
    double d = x[k] - y[k];
    d -= L * std::floor(d / L + 0.5);
    if (d >= 0.5 * L) d -= L;
    out[k] = d;
  }
  return out;
}

double norm2(const Point &v, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k)
    s += v[k] * v[k];
  return s;
}

double norm(const Point &v, int dim) { return std::sqrt(norm2(v, dim)); }

double torus_distance(const Point &x, const Point &y, const TorusDomain &dom) {
  return norm(min_image_disp(x, y, dom), dom.dim());
}

double ball_volume(int dim, double r) {
  switch (dim) {
  case 1: return 2.0 * r;
  case 2: return std::numbers::pi * r * r;
  case 3: return 4.0 / 3.0 * std::numbers::pi * r * r * r;
  default: throw std::invalid_argument("dimension must be 1, 2 or 3");
  }
}

CellList::CellList(const TorusDomain &dom, double min_cell_side) : dom_(dom) {
  const double L = dom.side();
  int n = min_cell_side > 0.0 ? static_cast<int>(std::floor(L / min_cell_side)) : 1;
  // Cap the grid so sparse or interaction-free models do not allocate huge grids.
  const int cap = dom.dim() == 1 ? 1 << 16 : dom.dim() == 2 ? 512 : 64;
  n = std::clamp(n, 1, cap);
  n_ = n;
  h_ = L / n;
  std::size_t total = 1;
  for (int k = 0; k < dom.dim(); ++k)
    total *= static_cast<std::size_t>(n);
  cells_.assign(total, {});
}

int CellList::cell_index(const Point &x) const {
  int idx = 0;
  int stride = 1;
  for (int k = 0; k < dom_.dim(); ++k) {
    int ci = static_cast<int>(x[k] / h_);
    if (ci >= n_) ci = n_ - 1;
    if (ci < 0) ci = 0;
    idx += ci * stride;
    stride *= n_;
  }
  return idx;
}

void CellList::insert(std::size_t id, int cell) {
  cell_of_[id] = cell;
  slot_of_[id] = cells_[cell].size();
  cells_[cell].push_back(id);
}

void CellList::erase(std::size_t id) {
  auto &cell = cells_[cell_of_[id]];
  std::size_t slot = slot_of_[id];
  std::size_t moved = cell.back();
  cell[slot] = moved;
  slot_of_[moved] = slot;
  cell.pop_back();
}

void CellList::push_back(const Point &x) {
  cell_of_.push_back(0);
  slot_of_.push_back(0);
  insert(cell_of_.size() - 1, cell_index(x));
}

void CellList::pop_back() {
  assert(!cell_of_.empty());
  erase(cell_of_.size() - 1);
  cell_of_.pop_back();
  slot_of_.pop_back();
}

void CellList::update(std::size_t id, const Point &x) {
  int c = cell_index(x);
  if (c == cell_of_[id]) return;
  erase(id);
  insert(id, c);
}

void CellList::swap_remove(std::size_t id, const Point &last_pos) {
  const std::size_t last = cell_of_.size() - 1;
  if (id == last) {
    pop_back();
    return;
  }
  erase(id);
  erase(last);
  cell_of_.pop_back();
  slot_of_.pop_back();
  insert(id, cell_index(last_pos));
}

void CellList::clear() {
  for (auto &c : cells_)
    c.clear();
  cell_of_.clear();
  slot_of_.clear();
}

void CellList::for_each_candidate(const Point &x, double r,
                                  const std::function<void(std::size_t)> &fn) const {
  visit_candidates(x, r, fn);
}

std::vector<std::size_t> CellList::neighbors(const std::vector<Point> &points,
                                             const Point &x, double r) const {
  assert(consistent_with(points) && "stale cell list");
  std::vector<std::size_t> out;
  const double r2 = r * r;
  visit_candidates(x, r, [&](std::size_t id) {
    if (norm2(min_image_disp(points[id], x, dom_), dom_.dim()) <= r2)
      out.push_back(id);
  });
  return out;
}

bool CellList::consistent_with(const std::vector<Point> &points) const {
  if (points.size() != cell_of_.size()) return false;
  for (std::size_t id = 0; id < points.size(); ++id) {
    if (cell_of_[id] != cell_index(points[id])) return false;
    const auto &cell = cells_[cell_of_[id]];
    if (slot_of_[id] >= cell.size() || cell[slot_of_[id]] != id) return false;
  }
  return true;
}

} // namespace kgl
