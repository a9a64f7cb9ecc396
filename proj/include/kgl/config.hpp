#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "kgl/gibbs.hpp"
#include "kgl/model.hpp"
#include "kgl/test_function.hpp"

namespace kgl {

struct DynamicsBlock {
  std::string engine = "kawasaki";
  /// Absent: alpha_from_k1 on a pilot Gibbs sample.
  std::optional<double> alpha;
  double T = 50.0;
  std::size_t replicas = 32;
  /// Stationarity time-average snapshots per replica.
  std::size_t snapshots = 100;
  /// Snapshot times of the single recorded trajectory.
  std::vector<double> snapshot_times;
  /// fdd-compare observation times.
  std::vector<double> times;
  std::size_t permutations = 1000;
  /// gap-probe sampling step and largest lag.
  double dt = 0.05;
  double max_lag = 5.0;
  std::size_t groups = 16;
  std::optional<std::uint64_t> max_events;
  std::uint64_t seed = 0;
};

struct ShiftBlock {
  Point x{}, xp{}, y{}, yp{};
  std::vector<double> eps;
  std::vector<TestComponent> psi;
};

struct BinsBlock {
  double r_max = 0.0;
  std::size_t n = 24;
};

struct VerdictBlock {
  double sigma = 3.0;
  double level = 0.01;
  /// Largest admissible last/first ratio of the generator sweep.
  double sweep_ratio = 0.25;
  /// Largest admissible last/first ratio of the fdd statistics.
  double fdd_ratio = 0.5;
  /// Relative tolerance of gap_hat = alpha on the ideal gas.
  double gap_rel_tol = 0.1;
};

struct OutputBlock {
  std::string dir = "out";
  bool json = true;
  bool csv = true;
};

/// Fully resolved run configuration; every default is filled in.
struct RunConfig {
  std::string experiment;
  ModelSpec model;
  std::vector<double> eps_grid;
  SamplerSettings sampler;
  std::optional<DynamicsBlock> dynamics;
  std::vector<TestComponent> test_function;
  std::vector<GnzFunctional> functionals;
  std::optional<ShiftBlock> shift;
  BinsBlock bins;
  VerdictBlock verdicts;
  OutputBlock output;

  TestFunction phi_test() const { return TestFunction(test_function); }
  RadialBins radial_bins() const { return RadialBins::uniform(bins.r_max, bins.n); }
  /// Canonical resolved echo built by the parser; the output block is left
  /// out so the destination never enters the hash.
  nlohmann::json echo;
  /// FNV-1a of echo.dump().
  std::string content_hash() const;
};

/// Sets `a.b.c=value` on the document; the value is parsed as YAML so lists
/// and numbers work. Throws ConfigError on a malformed assignment.
void apply_override(YAML::Node &doc, const std::string &assignment);

/// Throws ConfigError naming the dotted field on every validation problem.
RunConfig parse_run_config(const YAML::Node &doc);
RunConfig load_run_config(const std::string &path, const std::vector<std::string> &overrides);

/// Default GNZ functionals for a model: six families covering g = 1,
/// affine, quadratic, cubic and clipped exponential outer functions.
std::vector<GnzFunctional> default_functionals(const ModelSpec &m);

} // namespace kgl
