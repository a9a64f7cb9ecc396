#include "kgl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kgl/errors.hpp"

namespace kgl {

const char *engine_name(Engine e) { return e == Engine::kawasaki ? "kawasaki" : "glauber"; }

const char *event_name(EventKind k) {
  switch (k) {
  case EventKind::jump: return "jump";
  case EventKind::birth: return "birth";
  default: return "death";
  }
}

void DynamicsSpec::validate() const {
  model.validate();
  if (engine == Engine::glauber && !(alpha > 0.0 && std::isfinite(alpha)))
    throw ConfigError("dynamics.alpha", "alpha must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw ConfigError("dynamics.T", "horizon must be positive and finite");
  const auto &ts = recording.snapshot_times;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(ts[i] >= 0.0 && ts[i] <= horizon))
      throw ConfigError("dynamics.snapshot_times", "snapshot times must lie in [0, T]");
    if (i > 0 && !(ts[i] > ts[i - 1]))
      throw ConfigError("dynamics.snapshot_times", "snapshot times must be increasing");
  }
}

Simulator::Simulator(const DynamicsSpec &spec, const PointSet &initial, std::uint64_t seed)
    : spec_(spec), rng_(seed), gamma_(spec.model.make_configuration(initial)) {
  spec_.validate();
  cap_ = spec_.model.energy_cap();
  if (!std::isfinite(total_energy(gamma_, spec_.model.phi)))
    throw std::invalid_argument("initial configuration has infinite energy");
}

void Simulator::record(const Event &e) {
  ++counts_[static_cast<int>(e.kind)];
  if (spec_.recording.full_events) events_.push_back(e);
  if (spec_.max_events && counts_[0] + counts_[1] + counts_[2] >= *spec_.max_events)
    stopped_ = true;
}

bool Simulator::try_kawasaki() {
  const ModelSpec &m = spec_.model;
  std::size_t id = rng_.index(gamma_.size());
  const Point x = gamma_.point(id);
  Point u = m.kernel.sample(rng_);
  Point y = x;
  for (int k = 0; k < m.domain.dim(); ++k)
    y[k] += u[k] / m.eps;
  y = wrap(y, m.domain);
  double e_to = relative_energy(y, gamma_, m.phi, id);
  if (std::isinf(e_to)) return false;
  double e_from = m.s > 0.0 ? relative_energy(x, gamma_, m.phi, id) : 0.0;
  double f = kawasaki_energy_factor(e_from, e_to, m.s);
  if (f > cap_) {
    std::ostringstream os;
    os << "kawasaki energy factor " << f << " exceeds rate cap " << cap_ << " at t=" << t_;
    throw BoundViolation(os.str());
  }
  if (rng_.uniform() * cap_ >= f) return false;
  gamma_.move(id, y);
  record(Event{t_, EventKind::jump, x, y});
  return true;
}

bool Simulator::try_glauber() {
  const ModelSpec &m = spec_.model;
  const double a = spec_.alpha;
  const double death_bound = a * cap_ * static_cast<double>(gamma_.size());
  const double birth_bound = a * m.z * cap_ * m.domain.volume();
  if (rng_.uniform() * (death_bound + birth_bound) < death_bound) {
    std::size_t id = rng_.index(gamma_.size());
    double f = m.s > 0.0 ? std::exp(m.s * relative_energy(gamma_.point(id), gamma_, m.phi, id)) : 1.0;
    if (f > cap_) {
      std::ostringstream os;
      os << "glauber death factor " << f << " exceeds rate cap " << cap_ << " at t=" << t_;
      throw BoundViolation(os.str());
    }
    if (rng_.uniform() * cap_ >= f) return false;
    Point x = gamma_.point(id);
    gamma_.remove(id);
    record(Event{t_, EventKind::death, x, {}});
    return true;
  }
  Point x{0.0, 0.0, 0.0};
  for (int k = 0; k < m.domain.dim(); ++k)
    x[k] = rng_.uniform() * m.domain.side();
  double e = relative_energy(x, gamma_, m.phi);
  if (std::isinf(e)) return false;
  double f = std::exp(-(1.0 - m.s) * e);
  if (f > cap_) {
    std::ostringstream os;
    os << "glauber birth factor " << f << " exceeds rate cap " << cap_ << " at t=" << t_;
    throw BoundViolation(os.str());
  }
  if (rng_.uniform() * cap_ >= f) return false;
  gamma_.add(x);
  record(Event{t_, EventKind::birth, {}, x});
  return true;
}

bool Simulator::advance_to(double t) {
  const ModelSpec &m = spec_.model;
  while (!stopped_) {
    double rate;
    if (spec_.engine == Engine::kawasaki)
      rate = static_cast<double>(gamma_.size()) * cap_ * m.kernel.mass();
    else
      rate = spec_.alpha * cap_ * (static_cast<double>(gamma_.size()) + m.z * m.domain.volume());
    if (rate <= 0.0) break;
    // Memorylessness lets the clock restart at t when the draw overshoots.
    double next = t_ + rng_.exponential(rate);
    if (next > t) break;
    t_ = next;
    ++proposals_;
    if (spec_.engine == Engine::kawasaki) try_kawasaki();
    else try_glauber();
  }
  if (stopped_) return false;
  t_ = std::max(t_, t);
  return true;
}

Trajectory run_dynamics(const PointSet &gamma0, const DynamicsSpec &spec, std::uint64_t seed) {
  Simulator sim(spec, gamma0, seed);
  Trajectory tr;
  tr.domain = spec.model.domain;
  tr.engine = spec.engine;
  tr.initial = sim.state().points();
  if (spec.engine == Engine::kawasaki)
    tr.header_note = "finite volume: as eps -> 0 the hop kernel becomes uniform on the torus, "
                     "so the Kawasaki limit here is number-conserving uniform relocation";
  for (double ts : spec.recording.snapshot_times) {
    if (!sim.advance_to(ts)) break;
    tr.snapshots.push_back({ts, sim.state().points()});
  }
  if (!sim.stopped()) sim.advance_to(spec.horizon);
  tr.stopped_by_max_events = sim.stopped();
  tr.final_time = sim.stopped() ? sim.time() : spec.horizon;
  tr.final_state = sim.state().points();
  tr.proposals = sim.proposals();
  tr.counts = sim.counts();
  tr.events = std::move(sim.events());
  return tr;
}

Trajectory run_kawasaki(const PointSet &gamma0, DynamicsSpec spec, std::uint64_t seed) {
  spec.engine = Engine::kawasaki;
  return run_dynamics(gamma0, spec, seed);
}

Trajectory run_glauber(const PointSet &gamma0, DynamicsSpec spec, std::uint64_t seed) {
  spec.engine = Engine::glauber;
  return run_dynamics(gamma0, spec, seed);
}

std::string replay_problem(const Trajectory &tr, const ModelSpec &m) {
  PointSet pts = tr.initial;
  double last = 0.0;
  std::size_t i = 0;
  auto find = [&](const Point &p) {
    return std::find(pts.begin(), pts.end(), p);
  };
  for (const auto &e : tr.events) {
    std::ostringstream where;
    where << "event " << i++ << " (" << event_name(e.kind) << ", t=" << e.time << "): ";
    if (!(e.time > last) || e.time > tr.final_time) return where.str() + "time not increasing";
    last = e.time;
    switch (e.kind) {
    case EventKind::jump: {
      auto it = find(e.from);
      if (it == pts.end()) return where.str() + "jump from an absent point";
      if (tr.engine != Engine::kawasaki) return where.str() + "jump in a glauber trajectory";
      *it = e.to;
      break;
    }
    case EventKind::death: {
      auto it = find(e.from);
      if (it == pts.end()) return where.str() + "death of an absent point";
      pts.erase(it);
      break;
    }
    case EventKind::birth:
      if (find(e.to) != pts.end()) return where.str() + "duplicate birth";
      pts.push_back(e.to);
      break;
    }
    if (std::isinf(total_energy_direct(pts, m.domain, m.phi)))
      return where.str() + "hard-core overlap";
  }
  auto sorted = [](PointSet p) {
    std::sort(p.begin(), p.end());
    return p;
  };
  if (sorted(pts) != sorted(tr.final_state)) return "replayed state differs from final state";
  return {};
}

} // namespace kgl
