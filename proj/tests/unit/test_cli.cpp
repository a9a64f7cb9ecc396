#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "kgl/config.hpp"
#include "kgl/errors.hpp"
#include "kgl/experiments.hpp"

using namespace kgl;
namespace fs = std::filesystem;

namespace {

struct Proc {
  int status = -1;
  std::string output;
};

fs::path scratch(const std::string &name) {
  fs::path p = fs::temp_directory_path() / ("kgl_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Proc run_cli(const std::string &args, const fs::path &work) {
  const fs::path log = work / "cli.log";
  const std::string cmd = std::string(KGL_BINARY) + " " + args + " > " + log.string() + " 2>&1";
  int raw = std::system(cmd.c_str());
  Proc p;
  p.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  p.output = slurp(log);
  return p;
}

const char *kIdealGnz = R"(experiment: validate-gnz
model:
  dim: 1
  L: 20
  z: 0.2
  potential: {kind: zero}
  kernel: {kind: uniform_ball, r: 0.5}
sampler: {seed: 17, samples: 400, burn_in: 300}
gnz:
  functionals:
    - f: [{shape: bump, center: [10], radius: 1.0}]
    - f: [{shape: step, center: [10], radius: 1.0}]
      psi: [{shape: bump, center: [10], radius: 1.0, height: 0.5}]
      g: exp
)";

fs::path write_config(const fs::path &dir, const std::string &name, const std::string &text) {
  fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

} // namespace

TEST(ListExperiments, SevenEntriesInTextAndJson) {
  auto work = scratch("list");
  Proc p = run_cli("list-experiments", work);
  ASSERT_EQ(p.status, 0);
  for (const auto &e : experiment_catalog())
    EXPECT_NE(p.output.find(e.name), std::string::npos) << e.name;
  EXPECT_EQ(experiment_catalog().size(), 7u);

  Proc j = run_cli("list-experiments --json", work);
  ASSERT_EQ(j.status, 0);
  auto cat = nlohmann::json::parse(j.output);
  ASSERT_EQ(cat.size(), 7u);
  for (const auto &e : cat) {
    EXPECT_TRUE(e.contains("name"));
    EXPECT_TRUE(e.contains("description"));
    EXPECT_FALSE(e["blocks"].empty());
  }
}

TEST(Run, MissingActivityExitsTwoNamingField) {
  auto work = scratch("missing_z");
  std::string text = kIdealGnz;
  text.erase(text.find("  z: 0.2\n"), 9);
  auto cfg = write_config(work, "bad.yaml", text);
  Proc p = run_cli("run " + cfg.string() + " --out " + (work / "out").string(), work);
  EXPECT_EQ(p.status, 2);
  EXPECT_NE(p.output.find("model.z"), std::string::npos) << p.output;
}

TEST(Run, UnknownExperimentExitsTwoListingNames) {
  auto work = scratch("unknown");
  auto cfg = write_config(work, "ideal.yaml", kIdealGnz);
  Proc p = run_cli("run " + cfg.string() + " --set experiment=warp-drive", work);
  EXPECT_EQ(p.status, 2);
  for (const auto &e : experiment_catalog())
    EXPECT_NE(p.output.find(e.name), std::string::npos) << e.name;
}

TEST(Run, MissingConfigFileExitsTwo) {
  auto work = scratch("nofile");
  Proc p = run_cli("run " + (work / "absent.yaml").string(), work);
  EXPECT_EQ(p.status, 2);
}

TEST(Run, IdealGasGnzPassesAndIsByteReproducible) {
  auto work = scratch("determinism");
  auto cfg = write_config(work, "ideal.yaml", kIdealGnz);
  Proc a = run_cli("run " + cfg.string() + " --out " + (work / "a").string(), work);
  Proc b = run_cli("run " + cfg.string() + " --out " + (work / "b").string(), work);
  ASSERT_EQ(a.status, 0) << a.output;
  ASSERT_EQ(b.status, 0) << b.output;

  auto report = nlohmann::json::parse(slurp(work / "a" / "report.json"));
  for (const auto &g : report["results"]["gnz"])
    EXPECT_LT(std::abs(g["z_score"].get<double>()), 3.0);
  EXPECT_TRUE(report["passed"].get<bool>());

  std::size_t compared = 0;
  for (const auto &f : fs::directory_iterator(work / "a")) {
    const auto name = f.path().filename().string();
    if (name == "telemetry.json") continue;
    EXPECT_EQ(slurp(f.path()), slurp(work / "b" / name)) << name;
    ++compared;
  }
  EXPECT_GE(compared, 2u);
  EXPECT_TRUE(fs::exists(work / "a" / "telemetry.json"));
  EXPECT_TRUE(fs::exists(work / "a" / "gnz.csv"));
}

TEST(Run, SeedOverrideChangesPayloadAndHash) {
  auto work = scratch("seed");
  auto cfg = write_config(work, "ideal.yaml", kIdealGnz);
  ASSERT_EQ(run_cli("run " + cfg.string() + " --out " + (work / "a").string(), work).status, 0);
  Proc p = run_cli("run " + cfg.string() + " --set sampler.seed=18 --out " + (work / "b").string(), work);
  ASSERT_LE(p.status, 1);
  auto ra = nlohmann::json::parse(slurp(work / "a" / "report.json"));
  auto rb = nlohmann::json::parse(slurp(work / "b" / "report.json"));
  EXPECT_NE(ra["config_hash"], rb["config_hash"]);
  EXPECT_EQ(rb["config"]["sampler"]["seed"].get<int>(), 18);
  EXPECT_NE(ra["results"]["gnz"][0]["lhs"], rb["results"]["gnz"][0]["lhs"]);
}

TEST(Config, EchoReparsesToTheSameHash) {
  for (const char *name : {"sample_gibbs.yaml", "validate_gnz.yaml", "run_kawasaki.yaml", "run_glauber.yaml",
                           "scaling_sweep.yaml", "fdd_compare.yaml", "gap_probe.yaml"}) {
    RunConfig a = load_run_config(std::string(KGL_CONFIG_DIR) + "/" + name, {});
    RunConfig b = parse_run_config(YAML::Load(a.echo.dump()));
    EXPECT_EQ(a.content_hash(), b.content_hash()) << name;
    EXPECT_EQ(a.echo, b.echo) << name;
  }
}

TEST(Config, OverridesCreateNestedKeysAndParseValues) {
  YAML::Node doc = YAML::Load(kIdealGnz);
  apply_override(doc, "model.z=0.15");
  apply_override(doc, "dynamics.times=[0.5, 1.0]");
  apply_override(doc, "bins.n=8");
  EXPECT_DOUBLE_EQ(doc["model"]["z"].as<double>(), 0.15);
  EXPECT_EQ(doc["dynamics"]["times"].size(), 2u);
  EXPECT_EQ(doc["bins"]["n"].as<int>(), 8);
  EXPECT_DOUBLE_EQ(doc["model"]["L"].as<double>(), 20.0);
  EXPECT_THROW(apply_override(doc, "no_equals_sign"), ConfigError);
  EXPECT_THROW(apply_override(doc, "model..z=1"), ConfigError);
}

TEST(Config, ValidationNamesTheField) {
  auto field_of = [](const std::string &text, const std::string &set = "") {
    YAML::Node doc = YAML::Load(text);
    if (!set.empty()) apply_override(doc, set);
    try {
      parse_run_config(doc);
    } catch (const ConfigError &e) {
      return e.field();
    }
    return std::string("<none>");
  };
  EXPECT_EQ(field_of(kIdealGnz), "<none>");
  EXPECT_EQ(field_of(kIdealGnz, "model.z=-1"), "model.z");
  EXPECT_EQ(field_of(kIdealGnz, "model.potential={kind: square_well, J: 1, R: 11}"), "model.potential.R");
  EXPECT_EQ(field_of(kIdealGnz, "model.kernel.kind=cauchy"), "model.kernel.kind");
  EXPECT_EQ(field_of(kIdealGnz, "model.colour=red"), "model.colour");
  EXPECT_EQ(field_of(kIdealGnz, "model.s=0.5"), "model.rate_cap");
  EXPECT_EQ(field_of(kIdealGnz, "sampler.seed=abc"), "sampler.seed");
  EXPECT_EQ(field_of(kIdealGnz, "experiment=fdd-compare"), "dynamics");
  EXPECT_EQ(field_of(kIdealGnz, "experiment=scaling-sweep"), "test_function");
  YAML::Node no_seed = YAML::Load(kIdealGnz);
  no_seed["sampler"].remove("seed");
  EXPECT_THROW(parse_run_config(no_seed), ConfigError);
}

TEST(Csv, QuotesPerRfc4180) {
  CsvTable t{{"a", "b,c"}, {{"plain", "say \"hi\""}, {"line\nbreak", ""}}};
  EXPECT_EQ(to_csv(t), "a,\"b,c\"\r\nplain,\"say \"\"hi\"\"\"\r\n\"line\nbreak\",\r\n");
}
