#include "kgl/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "kgl/dynamics.hpp"
#include "kgl/errors.hpp"
#include "kgl/records.hpp"
#include "kgl/scaling.hpp"

namespace kgl {

using nlohmann::json;

const std::vector<ExperimentInfo> &experiment_catalog() {
  static const std::vector<ExperimentInfo> cat{
      {"sample-gibbs", "Gibbs samples with k1, k2, Ursell u2 and the Ruelle-bound probe",
       {"model", "sampler"}},
      {"validate-gnz", "single and two-point GNZ residuals, alpha consistency and the exp moment",
       {"model", "sampler"}},
      {"run-kawasaki", "hop dynamics: replayed trajectory, detailed balance and stationarity audits",
       {"model", "sampler", "dynamics"}},
      {"run-glauber", "birth-death dynamics: replayed trajectory, detailed balance and stationarity",
       {"model", "sampler", "dynamics"}},
      {"scaling-sweep", "L2 generator distance over an eps grid, plus the energy shift limits",
       {"model", "sampler", "test_function"}},
      {"fdd-compare", "finite-dimensional laws of the hop dynamics against the birth-death limit",
       {"model", "sampler", "dynamics", "test_function"}},
      {"gap-probe", "relaxation rate of the birth-death dynamics against the gap lower bound",
       {"model", "sampler", "dynamics", "test_function"}},
  };
  return cat;
}

const ExperimentInfo *find_experiment(const std::string &name) {
  for (const auto &e : experiment_catalog())
    if (e.name == name) return &e;
  return nullptr;
}

std::string experiment_names() {
  std::string s;
  for (const auto &e : experiment_catalog())
    s += (s.empty() ? "" : ", ") + e.name;
  return s;
}

json catalog_json() {
  json a = json::array();
  for (const auto &e : experiment_catalog())
    a.push_back({{"name", e.name}, {"description", e.description}, {"blocks", e.blocks}});
  return a;
}

std::string to_csv(const CsvTable &t) {
  auto field = [](const std::string &f) {
    if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
    std::string q = "\"";
    for (char c : f)
      q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  auto line = [&](const std::vector<std::string> &row) {
    std::string s;
    for (std::size_t i = 0; i < row.size(); ++i)
      s += (i ? "," : "") + field(row[i]);
    return s + "\r\n";
  };
  std::string out = line(t.header);
  for (const auto &r : t.rows)
    out += line(r);
  return out;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num(std::uint64_t v) { return std::to_string(v); }

json est(const Estimate &e) {
  return {{"value", e.value}, {"std_error", e.std_error}, {"n_samples", e.n_samples},
          {"n_effective", e.n_effective}};
}

json opt_est(const std::optional<Estimate> &e) { return e ? est(*e) : json(nullptr); }

double zval(double diff, double se) {
  return se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : INFINITY);
}

struct Context {
  Context(const RunConfig &c, std::ostream &l) : cfg(c), log(l) {}

  const RunConfig &cfg;
  std::ostream &log;
  json results = json::object();
  std::vector<Verdict> verdicts;
  std::map<std::string, CsvTable> tables;
  std::vector<std::pair<std::string, std::pair<RecordHeader, std::vector<Record>>>> records;
  std::uint64_t events = 0;

  void verdict(std::string name, bool pass, std::string detail) {
    log << (pass ? "  PASS " : "  FAIL ") << name << ": " << detail << "\n";
    verdicts.push_back({std::move(name), pass, std::move(detail)});
  }
};

std::string fmt(const char *f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

SampleSet draw_samples(Context &cx) {
  cx.log << "sampling " << cx.cfg.sampler.n_samples << " Gibbs configurations\n";
  SampleSet s = sample_gibbs(cx.cfg.model, cx.cfg.sampler);
  cx.results["sampler"] = {{"thin_used", s.thin_used},
                           {"tau_count", s.tau_count},
                           {"acceptance",
                            {{"birth", s.acceptance[0]},
                             {"death", s.acceptance[1]},
                             {"displacement", s.acceptance[2]}}},
                           {"warnings", s.warnings}};
  for (const auto &w : s.warnings)
    cx.log << "warning: " << w << "\n";
  return s;
}

double resolve_alpha(Context &cx, std::span<const PointSet> samples) {
  const RunConfig &cfg = cx.cfg;
  if (cfg.dynamics && cfg.dynamics->alpha) {
    cx.results["alpha"] = {{"value", *cfg.dynamics->alpha}, {"source", "config"}};
    return *cfg.dynamics->alpha;
  }
  Estimate k1 = estimate_k1(samples, cfg.model.domain);
  double a = alpha_from_k1(k1.value, cfg.model.z, cfg.model.kernel);
  cx.results["alpha"] = {{"value", a}, {"source", "k1"}, {"k1", est(k1)}};
  return a;
}

// ---------------------------------------------------------------- sample-gibbs

void run_sample_gibbs(Context &cx) {
  const RunConfig &cfg = cx.cfg;
  const ModelSpec &m = cfg.model;
  SampleSet s = draw_samples(cx);
  const RadialBins bins = cfg.radial_bins();
  const double sig = cfg.verdicts.sigma;

  Estimate k1 = estimate_k1(s.configs, m.domain);
  PairCorrelation pc = estimate_k2(s.configs, m.domain, bins);
  auto u2 = estimate_ursell2(s.configs, m.domain, bins);
  RuelleReport ru = ruelle_probe(s.configs, m, bins);

  json k2j = json::array();
  CsvTable pcsv{{"r_lo", "r_hi", "pairs", "k2", "k2_se", "u2", "u2_se"}, {}};
  for (std::size_t b = 0; b < bins.size(); ++b) {
    k2j.push_back({{"r_lo", bins.edges[b]},
                   {"r_hi", bins.edges[b + 1]},
                   {"pairs", pc.pair_counts[b]},
                   {"k2", opt_est(pc.k2[b])},
                   {"u2", opt_est(u2[b])}});
    pcsv.rows.push_back({num(bins.edges[b]), num(bins.edges[b + 1]), num(pc.pair_counts[b]),
                         pc.k2[b] ? num(pc.k2[b]->value) : "", pc.k2[b] ? num(pc.k2[b]->std_error) : "",
                         u2[b] ? num(u2[b]->value) : "", u2[b] ? num(u2[b]->std_error) : ""});
  }
  cx.tables["pair_correlation"] = pcsv;
  CsvTable counts{{"sample", "n"}, {}};
  for (std::size_t i = 0; i < s.configs.size(); ++i)
    counts.rows.push_back({std::to_string(i), std::to_string(s.configs[i].size())});
  cx.tables["particle_counts"] = counts;

  json viol = json::array();
  for (const auto &v : ru.violations)
    viol.push_back({{"order", v.order}, {"bin", v.bin}, {"value", v.value}, {"bound", v.bound}});
  cx.results["k1"] = est(k1);
  cx.results["pair_correlation"] = k2j;
  cx.results["ruelle"] = {{"xi_hat", ru.xi_hat}, {"xi_reference", ru.xi_reference}, {"violations", viol}};

  if (!cfg.test_function.empty()) {
    ExpMomentResult em = exp_moment(s.configs, m, cfg.phi_test(), ru.xi_hat, bins);
    json j = {{"mc", est(em.mc)}};
    if (em.poisson_closed_form) j["poisson_closed_form"] = *em.poisson_closed_form;
    if (em.series)
      j["series"] = {{"value", est(em.series->series)},
                     {"truncation_bound", em.series->truncation_bound},
                     {"xi", em.series->xi},
                     {"consistent", em.series->consistent}};
    cx.results["exp_moment"] = j;
  }

  std::vector<Record> recs;
  for (std::size_t i = 0; i < s.configs.size(); ++i)
    recs.push_back({static_cast<double>(i), s.configs[i]});
  cx.records.push_back({"samples.rec", {{m.hash(), cfg.sampler.seed, m.domain}, std::move(recs)}});

  if (m.phi.is_zero()) {
    double z = zval(k1.value - m.z, k1.std_error);
    cx.verdict("poisson_density", std::abs(z) < sig, fmt("k1 = %.6g vs z, z-score %.3g", k1.value, z));
  }
  cx.verdict("ruelle_bound", ru.violations.empty(),
             std::to_string(ru.violations.size()) + " bins above xi_reference^n");
  const double R = m.phi.range();
  if (R > 0.0) {
    std::size_t far = 0, far_bad = 0;
    bool near_sig = false;
    std::size_t near = 0;
    for (std::size_t b = 0; b < bins.size(); ++b) {
      if (!u2[b]) continue;
      double z = zval(u2[b]->value, u2[b]->std_error);
      if (bins.edges[b] >= 10.0 * R - 1e-12) {
        ++far;
        if (!(std::abs(z) < sig)) ++far_bad;
      }
      if (bins.edges[b + 1] <= R + 1e-12) {
        ++near;
        if (std::abs(z) > sig) near_sig = true;
      }
    }
    if (far > 0)
      cx.verdict("ursell_far_zero", far_bad == 0,
                 std::to_string(far_bad) + " of " + std::to_string(far) + " bins beyond 10R exceed the threshold");
    if (near > 0)
      cx.verdict("ursell_near_nonzero", near_sig,
                 std::to_string(near) + " bins inside R, significant: " + (near_sig ? "yes" : "no"));
  }
}

// ---------------------------------------------------------------- validate-gnz

void run_validate_gnz(Context &cx) {
  const RunConfig &cfg = cx.cfg;
  const ModelSpec &m = cfg.model;
  const double sig = cfg.verdicts.sigma;
  SampleSet s = draw_samples(cx);

  CsvTable csv{{"functional", "identity", "lhs", "lhs_se", "rhs", "rhs_se", "diff", "diff_se", "z_score",
                "max_quad_error"},
               {}};
  json arr = json::array();
  for (std::size_t i = 0; i < cfg.functionals.size(); ++i) {
    const GnzFunctional &F = cfg.functionals[i];
    for (int two = 0; two < 2; ++two) {
      cx.log << (two ? "double" : "single") << " GNZ, functional " << i << "\n";
      GnzResult r = two ? double_gnz_residual(s.configs, m, F) : gnz_residual(s.configs, m, F);
      const std::string id = two ? "double_gnz" : "gnz";
      arr.push_back({{"functional", F.describe()},
                     {"identity", id},
                     {"lhs", est(r.lhs)},
                     {"rhs", est(r.rhs)},
                     {"diff", est(r.diff)},
                     {"z_score", r.z_score},
                     {"max_quad_error", r.max_quad_error}});
      csv.rows.push_back({F.describe(), id, num(r.lhs.value), num(r.lhs.std_error), num(r.rhs.value),
                          num(r.rhs.std_error), num(r.diff.value), num(r.diff.std_error), num(r.z_score),
                          num(r.max_quad_error)});
      cx.verdict(id + "[" + std::to_string(i) + "]", std::abs(r.z_score) < sig,
                 fmt("z-score %.3g", r.z_score));
    }
  }
  cx.results["gnz"] = arr;
  cx.tables["gnz"] = csv;

  AlphaConsistency ac = alpha_consistency(s.configs, m);
  cx.results["alpha_consistency"] = {{"alpha_k1", est(ac.alpha_k1)},
                                     {"alpha_gnz", est(ac.alpha_gnz)},
                                     {"diff", est(ac.diff)},
                                     {"z_score", ac.z_score}};
  cx.verdict("alpha_consistency", std::abs(ac.z_score) < sig,
             fmt("k1 route %.6g, GNZ route %.6g, z-score %.3g", ac.alpha_k1.value, ac.alpha_gnz.value,
                 ac.z_score));

  if (!cfg.test_function.empty()) {
    const RadialBins bins = cfg.radial_bins();
    RuelleReport ru = ruelle_probe(s.configs, m, bins);
    ExpMomentResult em = exp_moment(s.configs, m, cfg.phi_test(), ru.xi_hat, bins);
    json j = {{"mc", est(em.mc)}};
    if (em.poisson_closed_form) {
      j["poisson_closed_form"] = *em.poisson_closed_form;
      double z = zval(em.mc.value - *em.poisson_closed_form, em.mc.std_error);
      cx.verdict("exp_moment_poisson", std::abs(z) < sig, fmt("z-score %.3g", z));
    }
    if (em.series) {
      j["series"] = {{"value", est(em.series->series)},
                     {"truncation_bound", em.series->truncation_bound},
                     {"xi", em.series->xi},
                     {"consistent", em.series->consistent}};
      cx.verdict("exp_moment_series", em.series->consistent,
                 fmt("mc %.6g vs series %.6g, truncation bound %.3g", em.mc.value, em.series->series.value,
                     em.series->truncation_bound));
    }
    cx.results["exp_moment"] = j;
  }
}

// ------------------------------------------------------------- run-<engine>

void run_dynamics_experiment(Context &cx, Engine engine) {
  const RunConfig &cfg = cx.cfg;
  const ModelSpec &m = cfg.model;
  const DynamicsBlock &db = *cfg.dynamics;
  const double sig = cfg.verdicts.sigma;
  SampleSet s = draw_samples(cx);
  const double alpha = engine == Engine::glauber ? resolve_alpha(cx, s.configs) : 1.0;

  DynamicsSpec spec;
  spec.model = m;
  spec.engine = engine;
  spec.alpha = alpha;
  spec.horizon = db.T;
  spec.recording.full_events = true;
  spec.recording.snapshot_times = db.snapshot_times;
  spec.max_events = db.max_events;

  cx.log << "recorded " << engine_name(engine) << " trajectory over T = " << db.T << "\n";
  const PointSet &start = s.configs.front();
  Trajectory tr = run_dynamics(start, spec, split_seed(db.seed, 0));
  const std::string problem = replay_problem(tr, m);
  cx.events += tr.n_events();
  cx.results["trajectory"] = {{"initial_size", tr.initial.size()},
                              {"final_size", tr.final_state.size()},
                              {"final_time", tr.final_time},
                              {"proposals", tr.proposals},
                              {"jumps", tr.counts[0]},
                              {"births", tr.counts[1]},
                              {"deaths", tr.counts[2]},
                              {"stopped_by_max_events", tr.stopped_by_max_events},
                              {"note", tr.header_note}};
  cx.verdict("replay", problem.empty(), problem.empty() ? "event log replays to the final state" : problem);

  CsvTable ev{{"time", "kind", "from", "to"}, {}};
  auto pt = [&](const Point &p) {
    std::string s2;
    for (int c = 0; c < m.domain.dim(); ++c)
      s2 += (c ? " " : "") + num(p[c]);
    return s2;
  };
  for (const auto &e : tr.events)
    ev.rows.push_back({num(e.time), event_name(e.kind), e.kind == EventKind::birth ? "" : pt(e.from),
                       e.kind == EventKind::death ? "" : pt(e.to)});
  cx.tables["events"] = ev;
  std::vector<Record> snaps;
  snaps.push_back({0.0, tr.initial});
  for (const auto &sn : tr.snapshots)
    snaps.push_back({sn.time, sn.points});
  snaps.push_back({tr.final_time, tr.final_state});
  cx.records.push_back({"trajectory.rec", {{m.hash(), db.seed, m.domain}, std::move(snaps)}});

  if (m.phi.is_zero() && engine == Engine::kawasaki && !start.empty() && !tr.stopped_by_max_events) {
    const double expo = static_cast<double>(start.size()) * db.T;
    const double rate = static_cast<double>(tr.counts[0]) / expo;
    const double se = std::sqrt(std::max<double>(1.0, static_cast<double>(tr.counts[0]))) / expo;
    double z = zval(rate - m.kernel.mass(), se);
    cx.results["free_jump_rate"] = {{"value", rate}, {"std_error", se}, {"expected", m.kernel.mass()}};
    cx.verdict("free_jump_rate", std::abs(z) < sig, fmt("per-particle rate %.6g vs %.6g", rate, m.kernel.mass()));
  }

  cx.log << "detailed-balance audit\n";
  DetailedBalanceReport dbr = detailed_balance_audit(m, 2000, split_seed(db.seed, 1));
  cx.results["detailed_balance"] = {{"cases", dbr.cases},
                                    {"zero_cases", dbr.zero_cases},
                                    {"max_rel_kawasaki", dbr.max_rel_kawasaki},
                                    {"max_rel_glauber", dbr.max_rel_glauber},
                                    {"max_rel_energy", dbr.max_rel_energy}};
  cx.verdict("detailed_balance", dbr.pass(),
             fmt("max relative gaps %.3g (hop), %.3g (birth-death)", dbr.max_rel_kawasaki, dbr.max_rel_glauber));

  cx.log << "stationarity audit over " << db.replicas << " replicas\n";
  StationaritySettings st;
  st.horizon = db.T;
  st.replicas = db.replicas;
  st.snapshots = db.snapshots;
  st.gibbs_samples = cfg.sampler.n_samples;
  st.sampler = cfg.sampler;
  st.bins = cfg.radial_bins();
  st.threshold = sig;
  DynamicsSpec sspec = spec;
  sspec.recording = {};
  sspec.max_events.reset();
  StationarityReport sr = stationarity_audit(sspec, st, split_seed(db.seed, 2));
  cx.events += sr.events;
  CsvTable sc{{"check", "dynamics", "dynamics_se", "gibbs", "gibbs_se", "z_score", "pass"}, {}};
  json checks = json::array();
  std::size_t bad = 0;
  for (const auto &c : sr.checks) {
    checks.push_back({{"name", c.name},
                      {"dynamics", est(c.dynamics)},
                      {"gibbs", est(c.gibbs)},
                      {"z_score", c.z_score},
                      {"pass", c.pass}});
    sc.rows.push_back({c.name, num(c.dynamics.value), num(c.dynamics.std_error), num(c.gibbs.value),
                       num(c.gibbs.std_error), num(c.z_score), c.pass ? "true" : "false"});
    if (!c.pass) ++bad;
  }
  cx.tables["stationarity"] = sc;
  cx.results["stationarity"] = {{"checks", checks}, {"events", sr.events}};
  cx.verdict("stationarity", sr.pass(),
             std::to_string(bad) + " of " + std::to_string(sr.checks.size()) + " checks beyond the threshold");
}

// ---------------------------------------------------------------- scaling-sweep

void run_scaling_sweep(Context &cx) {
  const RunConfig &cfg = cx.cfg;
  const ModelSpec &m = cfg.model;
  const double sig = cfg.verdicts.sigma;
  SampleSet s = draw_samples(cx);
  std::optional<double> alpha;
  if (cfg.dynamics && cfg.dynamics->alpha) alpha = cfg.dynamics->alpha;

  cx.log << "generator sweep over " << cfg.eps_grid.size() << " eps values\n";
  SweepResult sw = generator_sweep(cfg.phi_test(), m, cfg.eps_grid, s.configs, alpha);
  CsvTable csv{{"eps", "total", "total_se", "plus", "plus_se", "minus", "minus_se", "form", "form_se",
                "max_quad_error"},
               {}};
  json pts = json::array();
  for (const auto &p : sw.points) {
    pts.push_back({{"eps", p.eps},
                   {"total", est(p.total)},
                   {"plus", est(p.plus)},
                   {"minus", est(p.minus)},
                   {"form", est(p.form_eps)},
                   {"max_quad_error", p.max_quad_error}});
    csv.rows.push_back({num(p.eps), num(p.total.value), num(p.total.std_error), num(p.plus.value),
                        num(p.plus.std_error), num(p.minus.value), num(p.minus.std_error),
                        num(p.form_eps.value), num(p.form_eps.std_error), num(p.max_quad_error)});
  }
  cx.tables["sweep"] = csv;
  cx.results["sweep"] = {{"points", pts},
                         {"k1", est(sw.k1)},
                         {"alpha", sw.alpha},
                         {"alpha_from_samples", sw.alpha_from_samples},
                         {"reduction", sw.reduction()}};
  cx.verdict("total_decreasing", sw.total_decreasing(), "strictly decreasing in eps");
  cx.verdict("total_reduction", sw.reduction() < cfg.verdicts.sweep_ratio,
             fmt("last/first = %.4g (limit %.3g)", sw.reduction(), cfg.verdicts.sweep_ratio));
  cx.verdict("plus_decreasing", sw.plus_decreasing(), "addition part strictly decreasing");
  cx.verdict("minus_decreasing", sw.minus_decreasing(), "removal part strictly decreasing");

  if (cfg.shift) {
    const ShiftBlock &sh = *cfg.shift;
    ShiftReport rep = energy_shift_limit_check(TestFunction(sh.psi), sh.x, sh.xp, sh.y, sh.yp, sh.eps, m,
                                               s.configs);
    CsvTable sc{{"eps", "separation", "admissible", "two_shift", "two_shift_se", "two_limit", "two_limit_se",
                 "two_z", "one_shift", "one_shift_se", "one_limit", "one_limit_se", "one_z"},
                {}};
    json arr = json::array();
    for (const auto &p : rep.points) {
      arr.push_back({{"eps", p.eps},
                     {"separation", p.separation},
                     {"admissible", p.admissible},
                     {"two_shift", est(p.two_shift)},
                     {"two_limit", est(p.two_limit)},
                     {"two_diff", est(p.two_diff)},
                     {"two_z", p.two_z},
                     {"one_shift", est(p.one_shift)},
                     {"one_limit", est(p.one_limit)},
                     {"one_diff", est(p.one_diff)},
                     {"one_z", p.one_z}});
      sc.rows.push_back({num(p.eps), num(p.separation), p.admissible ? "true" : "false",
                         num(p.two_shift.value), num(p.two_shift.std_error), num(p.two_limit.value),
                         num(p.two_limit.std_error), num(p.two_z), num(p.one_shift.value),
                         num(p.one_shift.std_error), num(p.one_limit.value), num(p.one_limit.std_error),
                         num(p.one_z)});
    }
    cx.tables["shift"] = sc;
    cx.results["shift"] = {{"points", arr},
                           {"smallest_admissible",
                            rep.smallest_admissible ? json(*rep.smallest_admissible) : json(nullptr)}};
    if (!rep.smallest_admissible) {
      cx.verdict("shift_two_point", false, "no admissible eps in the grid");
      cx.verdict("shift_one_point", false, "no admissible eps in the grid");
    } else {
      const ShiftPoint &p = rep.points[*rep.smallest_admissible];
      cx.verdict("shift_two_point", std::abs(p.two_z) < sig, fmt("eps %.4g, z-score %.3g", p.eps, p.two_z));
      cx.verdict("shift_one_point", std::abs(p.one_z) < sig, fmt("eps %.4g, z-score %.3g", p.eps, p.one_z));
    }
  }
}

// ---------------------------------------------------------------- fdd-compare

void run_fdd_compare(Context &cx) {
  const RunConfig &cfg = cx.cfg;
  const DynamicsBlock &db = *cfg.dynamics;
  FddSettings st;
  st.times = db.times;
  st.tests = {cfg.phi_test()};
  st.eps = cfg.eps_grid;
  st.replicas = db.replicas;
  st.permutations = db.permutations;
  st.sampler = cfg.sampler;
  if (db.alpha) {
    st.alpha = *db.alpha;
    cx.results["alpha"] = {{"value", st.alpha}, {"source", "config"}};
  } else {
    SamplerSettings pilot = cfg.sampler;
    pilot.seed = split_seed(cfg.sampler.seed, 0xA1);
    cx.log << "pilot sample for alpha\n";
    SampleSet s = sample_gibbs(cfg.model, pilot);
    st.alpha = resolve_alpha(cx, s.configs);
  }
  cx.log << "fdd comparison: " << st.replicas << " replicas per engine and eps\n";
  FddReport rep = fdd_compare(cfg.model, st, db.seed);
  cx.events += rep.glauber_events;

  CsvTable csv;
  csv.header = {"eps", "energy_distance", "energy_p", "initial_D", "initial_p", "events"};
  for (std::size_t i = 0; i < st.times.size(); ++i)
    for (const char *k : {"marginal_D_", "marginal_p_", "increment_D_", "increment_p_"})
      csv.header.push_back(k + std::to_string(i + 1));
  json pts = json::array();
  for (const auto &p : rep.points) {
    cx.events += p.events;
    std::vector<std::string> row{num(p.eps), num(p.joint.statistic), num(p.joint.p_value),
                                 num(p.initial.statistic), num(p.initial.p_value), num(p.events)};
    json marg = json::array(), inc = json::array();
    for (std::size_t i = 0; i < p.marginal.size(); ++i) {
      row.push_back(num(p.marginal[i].statistic));
      row.push_back(num(p.marginal[i].p_value));
      row.push_back(num(p.increment[i].statistic));
      row.push_back(num(p.increment[i].p_value));
      marg.push_back({{"D", p.marginal[i].statistic}, {"p", p.marginal[i].p_value}});
      inc.push_back({{"D", p.increment[i].statistic}, {"p", p.increment[i].p_value}});
    }
    csv.rows.push_back(row);
    pts.push_back({{"eps", p.eps},
                   {"energy_distance", {{"statistic", p.joint.statistic}, {"p", p.joint.p_value},
                                        {"permutations", p.joint.permutations}}},
                   {"marginal_ks", marg},
                   {"increment_ks", inc},
                   {"initial_ks", {{"D", p.initial.statistic}, {"p", p.initial.p_value}}},
                   {"events", p.events}});
  }
  cx.tables["fdd"] = csv;
  cx.results["fdd"] = {{"points", pts}, {"glauber_events", rep.glauber_events}, {"alpha", st.alpha}};

  const FddPoint &first = rep.points.front(), &last = rep.points.back();
  const double lim = cfg.verdicts.fdd_ratio;
  auto ratio = [](double a, double b) { return b > 0.0 ? a / b : (a == 0.0 ? 0.0 : INFINITY); };
  double r = ratio(last.joint.statistic, first.joint.statistic);
  cx.verdict("energy_distance_ratio", r < lim, fmt("last/first = %.4g (limit %.3g)", r, lim));
  for (std::size_t i = 0; i < last.increment.size(); ++i) {
    double ri = ratio(last.increment[i].statistic, first.increment[i].statistic);
    cx.verdict("increment_ks_ratio[" + std::to_string(i + 1) + "]", ri < lim,
               fmt("last/first = %.4g (limit %.3g)", ri, lim));
  }
  double pmin = 1.0;
  for (const auto &p : rep.points)
    pmin = std::min(pmin, p.initial.p_value);
  cx.verdict("initial_law", pmin > cfg.verdicts.level,
             fmt("smallest t = 0 KS p-value %.4g (level %.3g)", pmin, cfg.verdicts.level));
}

// ---------------------------------------------------------------- gap-probe

void run_gap_probe(Context &cx) {
  const RunConfig &cfg = cx.cfg;
  const DynamicsBlock &db = *cfg.dynamics;
  const double sig = cfg.verdicts.sigma;
  double alpha;
  if (db.alpha) {
    alpha = *db.alpha;
    cx.results["alpha"] = {{"value", alpha}, {"source", "config"}};
  } else {
    SamplerSettings pilot = cfg.sampler;
    pilot.seed = split_seed(cfg.sampler.seed, 0xA1);
    SampleSet s = sample_gibbs(cfg.model, pilot);
    alpha = resolve_alpha(cx, s.configs);
  }
  GapSettings st;
  st.horizon = db.T;
  st.replicas = db.replicas;
  st.dt = db.dt;
  st.max_lag = db.max_lag;
  st.groups = db.groups;
  st.sampler = cfg.sampler;
  cx.log << "gap probe: " << st.replicas << " replicas over T = " << st.horizon << "\n";
  GapResult r = spectral_gap_probe(cfg.model, alpha, cfg.phi_test(), st, db.seed);
  CsvTable csv{{"lag", "autocorrelation"}, {}};
  for (std::size_t k = 0; k < r.lags.size(); ++k)
    csv.rows.push_back({num(r.lags[k]), num(r.autocorrelation[k])});
  cx.tables["autocorrelation"] = csv;
  cx.results["gap"] = {{"gap_hat", est(r.gap_hat)},
                       {"lower_bound", r.lower_bound},
                       {"alpha", r.alpha},
                       {"fit_points", r.fit_points}};
  const bool ok = std::isfinite(r.gap_hat.value) && r.gap_hat.value >= r.lower_bound - sig * r.gap_hat.std_error;
  cx.verdict("gap_bound", ok, fmt("gap_hat %.4g +- %.3g, bound %.4g", r.gap_hat.value, r.gap_hat.std_error,
                                  r.lower_bound));
  if (cfg.model.phi.is_zero()) {
    double rel = std::abs(r.gap_hat.value - alpha) / alpha;
    cx.verdict("gap_ideal_gas", rel <= cfg.verdicts.gap_rel_tol,
               fmt("|gap_hat - alpha| / alpha = %.4g (limit %.3g)", rel, cfg.verdicts.gap_rel_tol));
  }
}

void write_file(const std::filesystem::path &p, const std::string &content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
}

} // namespace

RunOutcome run_experiment(const RunConfig &cfg, const std::filesystem::path &out_dir,
                          std::ostream &log) {
  const auto t0 = std::chrono::steady_clock::now();
  Context cx(cfg, log);
  log << "experiment " << cfg.experiment << " (config " << cfg.content_hash() << ")\n";
  const std::string &e = cfg.experiment;
  if (e == "sample-gibbs") run_sample_gibbs(cx);
  else if (e == "validate-gnz") run_validate_gnz(cx);
  else if (e == "run-kawasaki") run_dynamics_experiment(cx, Engine::kawasaki);
  else if (e == "run-glauber") run_dynamics_experiment(cx, Engine::glauber);
  else if (e == "scaling-sweep") run_scaling_sweep(cx);
  else if (e == "fdd-compare") run_fdd_compare(cx);
  else if (e == "gap-probe") run_gap_probe(cx);
  else throw ConfigError("experiment", "unknown experiment '" + e + "'; valid: " + experiment_names());

  RunOutcome out;
  out.verdicts = cx.verdicts;
  bool all = true;
  json vj = json::array();
  for (const auto &v : cx.verdicts) {
    all = all && v.pass;
    vj.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  }
  out.exit_code = all ? kExitPass : kExitVerdict;
  out.report = {{"schema", "kgl-report/1"},
                {"experiment", cfg.experiment},
                {"config", cfg.echo},
                {"config_hash", cfg.content_hash()},
                {"model_hash", cfg.model.hash()},
                {"results", cx.results},
                {"verdicts", vj},
                {"passed", all},
                {"telemetry", {{"events", cx.events}}}};

  std::filesystem::create_directories(out_dir);
  std::vector<std::string> files;
  if (cfg.output.json) {
    write_file(out_dir / "report.json", out.report.dump(2) + "\n");
    files.push_back("report.json");
  }
  if (cfg.output.csv)
    for (const auto &[name, t] : cx.tables) {
      write_file(out_dir / (name + ".csv"), to_csv(t));
      files.push_back(name + ".csv");
    }
  for (const auto &[name, rec] : cx.records) {
    write_records_file((out_dir / name).string(), rec.first, rec.second);
    files.push_back(name);
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json tele = {{"wall_clock_seconds", wall},
               {"config_hash", cfg.content_hash()},
               {"output_dir", out_dir.string()},
               {"files", files},
               {"events", cx.events}};
  write_file(out_dir / "telemetry.json", tele.dump(2) + "\n");
  log << (all ? "all verdicts passed" : "some verdicts failed") << " (" << wall << " s)\n";
  return out;
}

} // namespace kgl
