#include "kgl/configuration.hpp"

namespace kgl {

namespace {

double cell_side_for(const TorusDomain &dom, double range) {
  return range > 0.0 ? range : dom.side() / 8.0;
}

} // namespace

Configuration::Configuration(const TorusDomain &dom, double interaction_range)
    : dom_(dom), range_(interaction_range), cells_(dom, cell_side_for(dom, interaction_range)) {}

Configuration::Configuration(const TorusDomain &dom, double interaction_range, const PointSet &pts)
    : Configuration(dom, interaction_range) {
  points_.reserve(pts.size());
  for (const auto &p : pts)
    add(p);
}

std::size_t Configuration::add(const Point &x) {
  Point w = wrap(x, dom_);
  points_.push_back(w);
  cells_.push_back(w);
  energy_.reset();
  return points_.size() - 1;
}

void Configuration::remove(std::size_t id) {
  const Point last = points_.back();
  cells_.swap_remove(id, last);
  points_[id] = last;
  points_.pop_back();
  energy_.reset();
}

void Configuration::move(std::size_t id, const Point &x) {
  Point w = wrap(x, dom_);
  points_[id] = w;
  cells_.update(id, w);
  energy_.reset();
}

void Configuration::clear() {
  points_.clear();
  cells_.clear();
  energy_.reset();
}

} // namespace kgl
