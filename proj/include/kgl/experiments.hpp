#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgl/config.hpp"

namespace kgl {

struct ExperimentInfo {
  std::string name;
  std::string description;
  /// Config blocks the experiment reads; all must be present.
  std::vector<std::string> blocks;
};

const std::vector<ExperimentInfo> &experiment_catalog();
const ExperimentInfo *find_experiment(const std::string &name);
std::string experiment_names();
nlohmann::json catalog_json();

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Rows of one CSV series; the first row is the header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC 4180: fields with commas, quotes or line breaks are quoted and inner
/// quotes doubled; lines end in CRLF.
std::string to_csv(const CsvTable &t);

/// Exit status convention of `run`.
enum ExitCode : int { kExitPass = 0, kExitVerdict = 1, kExitConfig = 2, kExitRuntime = 3 };

struct RunOutcome {
  int exit_code = kExitPass;
  nlohmann::json report;
  std::vector<Verdict> verdicts;
};

/// Executes cfg.experiment and writes report.json, telemetry.json and the
/// CSV series into out_dir. Stochastic content of report.json and the CSV
/// files depends only on cfg. Config and runtime errors propagate.
RunOutcome run_experiment(const RunConfig &cfg, const std::filesystem::path &out_dir,
                          std::ostream &log);

} // namespace kgl
