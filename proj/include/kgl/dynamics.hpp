#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kgl/configuration.hpp"
#include "kgl/gibbs.hpp"
#include "kgl/model.hpp"
#include "kgl/rng.hpp"
#include "kgl/stats.hpp"

namespace kgl {

enum class Engine { kawasaki, glauber };
enum class EventKind { jump = 0, birth = 1, death = 2 };

const char *engine_name(Engine e);
const char *event_name(EventKind k);

/// `from` is set for jumps and deaths, `to` for jumps and births.
struct Event {
  double time = 0.0;
  EventKind kind = EventKind::jump;
  Point from{};
  Point to{};
};

struct Snapshot {
  double time = 0.0;
  PointSet points;
};

struct RecordingPolicy {
  bool full_events = false;
  /// Sorted times in [0, horizon] at which the state is copied.
  std::vector<double> snapshot_times;
};

struct DynamicsSpec {
  ModelSpec model;
  Engine engine = Engine::kawasaki;
  /// Glauber rate scale; ignored by Kawasaki.
  double alpha = 1.0;
  double horizon = 1.0;
  RecordingPolicy recording;
  /// Stop after this many accepted events.
  std::optional<std::uint64_t> max_events;

  /// Throws ConfigError.
  void validate() const;
};

struct Trajectory {
  TorusDomain domain;
  Engine engine = Engine::kawasaki;
  PointSet initial;
  std::vector<Event> events;
  std::vector<Snapshot> snapshots;
  PointSet final_state;
  /// horizon, or the last event time when max_events stopped the run.
  double final_time = 0.0;
  std::uint64_t proposals = 0;
  /// Accepted events per EventKind.
  std::array<std::uint64_t, 3> counts{};
  bool stopped_by_max_events = false;
  /// Describes the finite-volume limit of the Kawasaki engine.
  std::string header_note;

  std::uint64_t n_events() const { return counts[0] + counts[1] + counts[2]; }
};

/// Exact continuous-time simulation by thinning a global Poisson clock.
///
/// Kawasaki: clock rate |gamma| M ||a||_1; a uniform particle proposes
/// y = x + u/eps with u ~ a/||a||_1 and the move is accepted with the energy
/// factor over M. Glauber: death clock alpha M |gamma| and birth clock
/// alpha z M V, accepted with exp[s E]/M and exp[-(1-s) E]/M.
/// A realised energy factor above M throws BoundViolation.
class Simulator {
public:
  Simulator(const DynamicsSpec &spec, const PointSet &initial, std::uint64_t seed);

  /// Runs until the clock reaches t (or max_events). Returns false once
  /// max_events stopped the run.
  bool advance_to(double t);

  double time() const { return t_; }
  const Configuration &state() const { return gamma_; }
  std::uint64_t proposals() const { return proposals_; }
  const std::array<std::uint64_t, 3> &counts() const { return counts_; }
  std::vector<Event> &events() { return events_; }
  bool stopped() const { return stopped_; }

private:
  bool try_kawasaki();
  bool try_glauber();
  void record(const Event &e);

  DynamicsSpec spec_;
  Rng rng_;
  Configuration gamma_;
  double t_ = 0.0;
  double cap_ = 1.0;
  std::uint64_t proposals_ = 0;
  std::array<std::uint64_t, 3> counts_{};
  std::vector<Event> events_;
  bool stopped_ = false;
};

Trajectory run_dynamics(const PointSet &gamma0, const DynamicsSpec &spec, std::uint64_t seed);
/// run_dynamics with the engine forced to Kawasaki / Glauber.
Trajectory run_kawasaki(const PointSet &gamma0, DynamicsSpec spec, std::uint64_t seed);
Trajectory run_glauber(const PointSet &gamma0, DynamicsSpec spec, std::uint64_t seed);

/// Replays the event log from the initial state. Returns an empty string when
/// valid, otherwise the first problem found. Requires full_events.
std::string replay_problem(const Trajectory &tr, const ModelSpec &m);

struct DetailedBalanceReport {
  std::size_t cases = 0;
  /// Cases where both sides vanished (hard-core target).
  std::size_t zero_cases = 0;
  double max_rel_kawasaki = 0.0;
  double max_rel_glauber = 0.0;
  /// |U(gamma + x) - U(gamma) - E(x, gamma)| over the sum of |phi| terms.
  double max_rel_energy = 0.0;
  bool pass(double tol = 1e-10) const {
    return max_rel_kawasaki <= tol && max_rel_glauber <= tol && max_rel_energy <= tol;
  }
};

/// Random (gamma, x, y) cases with up to `max_points` points; s is taken from
/// the model.
DetailedBalanceReport detailed_balance_audit(const ModelSpec &m, std::size_t n_cases,
                                             std::uint64_t seed, std::size_t max_points = 30);

struct StatCheck {
  std::string name;
  Estimate dynamics;
  Estimate gibbs;
  double z_score = 0.0;
  bool pass = false;
};

struct StationaritySettings {
  double horizon = 50.0;
  std::size_t replicas = 32;
  /// Snapshots per replica used for the time averages.
  std::size_t snapshots = 100;
  /// Gibbs reference sample size.
  std::size_t gibbs_samples = 20000;
  SamplerSettings sampler;
  RadialBins bins;
  double threshold = 3.0;
};

struct StationarityReport {
  Engine engine = Engine::kawasaki;
  std::vector<StatCheck> checks;
  std::uint64_t events = 0;
  bool pass() const;
};

/// Replicas start from independent Gibbs samples and run for the horizon;
/// per-replica time averages of |gamma|/V (Glauber), U/V and k2 bins are
/// compared with a separate Gibbs reference run.
StationarityReport stationarity_audit(const DynamicsSpec &spec, const StationaritySettings &st,
                                      std::uint64_t seed);

} // namespace kgl
