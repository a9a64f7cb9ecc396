#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <yaml-cpp/yaml.h>

#include "kgl/config.hpp"
#include "kgl/errors.hpp"
#include "kgl/experiments.hpp"

namespace {

int list_experiments(bool as_json) {
  if (as_json) {
    std::cout << kgl::catalog_json().dump(2) << "\n";
    return 0;
  }
  for (const auto &e : kgl::experiment_catalog()) {
    std::string blocks;
    for (const auto &b : e.blocks)
      blocks += (blocks.empty() ? "" : ", ") + b;
    std::cout << e.name << "\n    " << e.description << "\n    blocks: " << blocks << "\n";
  }
  return 0;
}

int run(const std::string &config, const std::vector<std::string> &overrides, const std::string &out) {
  try {
    kgl::RunConfig cfg = kgl::load_run_config(config, overrides);
    const std::filesystem::path dir = out.empty() ? cfg.output.dir : out;
    kgl::RunOutcome res = kgl::run_experiment(cfg, dir, std::cerr);
    return res.exit_code;
  } catch (const kgl::ConfigError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kgl::kExitConfig;
  } catch (const kgl::BoundViolation &e) {
    std::cerr << "bound violation: " << e.what() << "\n";
    return kgl::kExitRuntime;
  } catch (const kgl::QuadratureError &e) {
    std::cerr << "quadrature refused: " << e.what() << "\n";
    return kgl::kExitRuntime;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kgl::kExitRuntime;
  }
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Kawasaki-to-Glauber scaling experiments"};
  app.require_subcommand(1);

  std::string config, out;
  std::vector<std::string> overrides;
  auto *run_cmd = app.add_subcommand("run", "run the experiment named in a config file");
  run_cmd->add_option("config", config, "YAML run config")->required();
  run_cmd->add_option("--set", overrides, "dotted override key=value (repeatable)");
  run_cmd->add_option("--out", out, "output directory (default: output.dir)");

  bool as_json = false;
  auto *list_cmd = app.add_subcommand("list-experiments", "print the experiment catalog");
  list_cmd->add_flag("--json", as_json, "machine-readable catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kgl::kExitConfig;
  }
  if (*list_cmd) return list_experiments(as_json);
  return run(config, overrides, out);
}
