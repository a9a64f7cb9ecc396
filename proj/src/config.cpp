#include "kgl/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "kgl/errors.hpp"
#include "kgl/experiments.hpp"
#include "kgl/rng.hpp"

namespace kgl {

namespace {

using nlohmann::json;

std::string join(const std::string &path, const std::string &key) {
  return path.empty() ? key : path + "." + key;
}

// Library validators name fields relative to their own block.
std::string qualify(const std::string &field, const std::string &block) {
  static const std::vector<std::string> roots{"model", "sampler", "dynamics", "test_function",
                                              "gnz", "shift", "bins", "verdicts", "output",
                                              "experiment"};
  for (const auto &r : roots)
    if (field == r || field.rfind(r + ".", 0) == 0) return field;
  return join(block, field);
}

template <class Fn>
auto in_block(const std::string &block, Fn &&fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError &e) {
    std::string what = e.what();
    auto colon = what.find(": ");
    throw ConfigError(qualify(e.field(), block),
                      colon == std::string::npos ? what : what.substr(colon + 2));
  } catch (const std::invalid_argument &e) {
    throw ConfigError(block, e.what());
  }
}

// Map node with a dotted path for messages and a record of the keys read.
class Block {
public:
  Block(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (present() && !node_.IsMap()) throw ConfigError(path_, "expected a mapping");
  }

  bool present() const { return node_.IsDefined() && !node_.IsNull(); }
  bool has(const std::string &key) {
    used_.insert(key);
    return present() && node_[key].IsDefined() && !node_[key].IsNull();
  }
  std::string field(const std::string &key) const { return join(path_, key); }
  const std::string &path() const { return path_; }

  YAML::Node raw(const std::string &key) {
    used_.insert(key);
    return present() ? node_[key] : YAML::Node();
  }

  template <class T> T get(const std::string &key) {
    if (!has(key)) throw ConfigError(field(key), "required field is missing");
    return convert<T>(node_[key], field(key));
  }
  template <class T> T get(const std::string &key, T fallback) {
    return has(key) ? convert<T>(node_[key], field(key)) : fallback;
  }
  template <class T> std::optional<T> maybe(const std::string &key) {
    if (!has(key)) return std::nullopt;
    return convert<T>(node_[key], field(key));
  }

  Block child(const std::string &key) {
    used_.insert(key);
    return {present() ? node_[key] : YAML::Node(), field(key)};
  }

  void reject_unknown() const {
    if (!present()) return;
    for (const auto &kv : node_) {
      auto k = kv.first.as<std::string>();
      if (!used_.count(k)) throw ConfigError(field(k), "unknown key");
    }
  }

  template <class T> static T convert(const YAML::Node &n, const std::string &where) {
    try {
      return n.as<T>();
    } catch (const YAML::Exception &) {
      throw ConfigError(where, "value has the wrong type");
    }
  }

private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> used_;
};

double positive(double v, const std::string &where) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(where, "must be positive and finite");
  return v;
}

Point read_point(const YAML::Node &n, int dim, const std::string &where) {
  Point p{0.0, 0.0, 0.0};
  if (n.IsScalar() && dim == 1) {
    p[0] = Block::convert<double>(n, where);
    return p;
  }
  if (!n.IsSequence() || static_cast<int>(n.size()) != dim)
    throw ConfigError(where, "expected a list of " + std::to_string(dim) + " coordinates");
  for (int c = 0; c < dim; ++c)
    p[c] = Block::convert<double>(n[c], where);
  return p;
}

json point_json(const Point &p, int dim) {
  json a = json::array();
  for (int c = 0; c < dim; ++c)
    a.push_back(p[c]);
  return a;
}

json components_json(const TestFunction &t, int dim) {
  json a = json::array();
  for (const auto &c : t.components())
    a.push_back({{"shape", c.shape == BumpShape::step ? "step" : "bump"},
                 {"center", point_json(c.center, dim)},
                 {"radius", c.radius},
                 {"height", c.height}});
  return a;
}

std::vector<TestComponent> read_components(const YAML::Node &n, int dim, const std::string &where,
                                           json &echo) {
  std::vector<TestComponent> out;
  echo = json::array();
  if (!n || n.IsNull()) return out;
  std::vector<YAML::Node> items;
  if (n.IsMap()) items.push_back(n);
  else if (n.IsSequence())
    for (const auto &it : n)
      items.push_back(it);
  else throw ConfigError(where, "expected a component or a list of components");
  for (std::size_t i = 0; i < items.size(); ++i) {
    Block b(items[i], where + "[" + std::to_string(i) + "]");
    TestComponent c;
    auto shape = b.get<std::string>("shape", "bump");
    if (shape == "bump") c.shape = BumpShape::bump;
    else if (shape == "step") c.shape = BumpShape::step;
    else throw ConfigError(b.field("shape"), "expected bump or step");
    c.center = read_point(b.raw("center"), dim, b.field("center"));
    c.radius = b.get<double>("radius");
    c.height = b.get<double>("height", 1.0);
    b.reject_unknown();
    out.push_back(c);
    echo.push_back({{"shape", shape}, {"center", point_json(c.center, dim)}, {"radius", c.radius},
                    {"height", c.height}});
  }
  return out;
}

PairPotential read_potential(Block b, json &echo) {
  if (!b.present()) throw ConfigError(b.path(), "required block is missing");
  auto kind = b.get<std::string>("kind");
  PairPotential p;
  echo = {{"kind", kind}};
  in_block("model", [&] {
    if (kind == "zero") {
      p = PairPotential::zero();
    } else if (kind == "square_well" || kind == "triangle") {
      double J = b.get<double>("J"), R = b.get<double>("R");
      p = kind == "square_well" ? PairPotential::square_well(J, R) : PairPotential::triangle(J, R);
      echo["J"] = J;
      echo["R"] = R;
    } else if (kind == "hardcore_square_well") {
      double hc = b.get<double>("r_hc"), J = b.get<double>("J", 0.0), R = b.get<double>("R");
      p = PairPotential::hardcore_square_well(hc, J, R);
      echo["r_hc"] = hc;
      echo["J"] = J;
      echo["R"] = R;
    } else if (kind == "lennard_jones") {
      double sg = b.get<double>("sigma"), e = b.get<double>("eps_lj"), R = b.get<double>("R");
      p = PairPotential::lennard_jones(sg, e, R);
      echo["sigma"] = sg;
      echo["eps_lj"] = e;
      echo["R"] = R;
    } else {
      throw ConfigError(b.field("kind"), "unknown potential '" + kind +
                                             "'; valid: zero, square_well, triangle, "
                                             "hardcore_square_well, lennard_jones");
    }
    return 0;
  });
  b.reject_unknown();
  return p;
}

JumpKernel read_kernel(Block b, int dim, json &echo) {
  if (!b.present()) throw ConfigError(b.path(), "required block is missing");
  auto kind = b.get<std::string>("kind");
  double amp = b.get<double>("amplitude", 1.0);
  JumpKernel k;
  echo = {{"kind", kind}, {"amplitude", amp}};
  in_block("model", [&] {
    if (kind == "uniform_ball") {
      double r = b.get<double>("r");
      k = JumpKernel::uniform_ball(dim, r, amp);
      echo["r"] = r;
    } else if (kind == "gaussian_truncated") {
      double sg = b.get<double>("sigma"), rc = b.get<double>("r_cut");
      k = JumpKernel::gaussian_truncated(dim, sg, rc, amp);
      echo["sigma"] = sg;
      echo["r_cut"] = rc;
    } else {
      throw ConfigError(b.field("kind"), "unknown kernel '" + kind +
                                             "'; valid: uniform_ball, gaussian_truncated");
    }
    return 0;
  });
  b.reject_unknown();
  return k;
}

std::vector<double> read_list(const YAML::Node &n, const std::string &where) {
  if (!n.IsSequence()) throw ConfigError(where, "expected a list of numbers");
  std::vector<double> v;
  for (const auto &x : n)
    v.push_back(Block::convert<double>(x, where));
  return v;
}

bool strictly_increasing(const std::vector<double> &v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

bool needs(const ExperimentInfo &info, const std::string &block) {
  return std::find(info.blocks.begin(), info.blocks.end(), block) != info.blocks.end();
}

} // namespace

void apply_override(YAML::Node &doc, const std::string &assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("--set", "expected key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string seg; std::getline(ss, seg, '.');) {
    if (seg.empty()) throw ConfigError("--set", "empty path segment in '" + key + "'");
    parts.push_back(seg);
  }
  YAML::Node value;
  try {
    value = YAML::Load(assignment.substr(eq + 1));
  } catch (const YAML::Exception &e) {
    throw ConfigError(key, std::string("cannot parse override value: ") + e.what());
  }
  if (!doc.IsMap()) doc = YAML::Node(YAML::NodeType::Map);
  YAML::Node cur = doc;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    YAML::Node next = cur[parts[i]];
    if (!next.IsMap()) {
      cur[parts[i]] = YAML::Node(YAML::NodeType::Map);
      next = cur[parts[i]];
    }
    cur.reset(next);
  }
  cur[parts.back()] = value;
}

std::vector<GnzFunctional> default_functionals(const ModelSpec &m) {
  const int d = m.domain.dim();
  const double L = m.domain.side();
  const double r0 = std::min(std::max(2.0 * m.phi.range(), 1.0), 0.12 * L);
  Point c{0.0, 0.0, 0.0}, c2{0.0, 0.0, 0.0};
  for (int k = 0; k < d; ++k) {
    c[k] = 0.5 * L;
    c2[k] = 0.5 * L + 0.5 * r0;
  }
  auto mk = [](TestFunction f, TestFunction psi, OuterKind g, std::array<double, 4> poly) {
    GnzFunctional F;
    F.f = std::move(f);
    F.psi = std::move(psi);
    F.g = g;
    F.poly = poly;
    return F;
  };
  using TF = TestFunction;
  return {
      mk(TF::bump(c, r0, 1.0), TF(), OuterKind::polynomial, {1, 0, 0, 0}),
      mk(TF::step(c, r0, 1.0), TF::bump(c, r0, 0.5), OuterKind::exp_clipped, {1, 0, 0, 0}),
      mk(TF::bump(c, r0, 1.0), TF::step(c, 2.0 * r0, 1.0), OuterKind::polynomial, {1, 1, 0, 0}),
      mk(TF::bump(c, r0, 1.0), TF::bump(c2, r0, 1.0), OuterKind::polynomial, {0, 0, 1, 0}),
      mk(TF::step(c, 2.0 * r0, 0.5), TF::bump(c, 2.0 * r0, -0.3), OuterKind::exp_clipped, {1, 0, 0, 0}),
      mk(TF::bump(c2, r0, 1.0), TF::bump(c, r0, 1.0), OuterKind::polynomial, {1, -0.5, 0.25, -0.1}),
  };
}

RunConfig parse_run_config(const YAML::Node &doc) {
  if (!doc.IsMap()) throw ConfigError("experiment", "config must be a mapping with an experiment key");
  Block top(doc, "");
  RunConfig cfg;
  json echo;

  cfg.experiment = top.get<std::string>("experiment");
  const ExperimentInfo *info = find_experiment(cfg.experiment);
  if (!info)
    throw ConfigError("experiment", "unknown experiment '" + cfg.experiment +
                                        "'; valid: " + experiment_names());
  echo["experiment"] = cfg.experiment;
  for (const auto &b : info->blocks)
    if (!top.has(b)) throw ConfigError(b, "required block is missing for " + cfg.experiment);

  // model
  {
    Block mb = top.child("model");
    json me;
    const int dim = mb.get<int>("dim");
    const double L = mb.get<double>("L");
    cfg.model.domain = in_block("model", [&] {
      try {
        return TorusDomain(dim, L);
      } catch (const std::invalid_argument &e) {
        throw ConfigError(dim < 1 || dim > 3 ? "model.dim" : "model.L", e.what());
      }
    });
    cfg.model.z = mb.get<double>("z");
    cfg.model.s = mb.get<double>("s", 0.0);
    cfg.model.rate_cap = mb.maybe<double>("rate_cap");
    json pe, ke;
    cfg.model.phi = read_potential(mb.child("potential"), pe);
    cfg.model.kernel = read_kernel(mb.child("kernel"), dim, ke);
    if (mb.has("eps_grid")) {
      cfg.eps_grid = read_list(mb.raw("eps_grid"), mb.field("eps_grid"));
      if (cfg.eps_grid.empty()) throw ConfigError(mb.field("eps_grid"), "must not be empty");
      for (double e : cfg.eps_grid)
        positive(e, mb.field("eps_grid"));
      for (std::size_t i = 1; i < cfg.eps_grid.size(); ++i)
        if (!(cfg.eps_grid[i] < cfg.eps_grid[i - 1]))
          throw ConfigError(mb.field("eps_grid"), "must be strictly decreasing");
    }
    cfg.model.eps = mb.get<double>("eps", cfg.eps_grid.empty() ? 1.0 : cfg.eps_grid.front());
    mb.reject_unknown();
    const bool grid = cfg.experiment == "scaling-sweep" || cfg.experiment == "fdd-compare";
    if (grid && cfg.eps_grid.size() < 2)
      throw ConfigError("model.eps_grid", "needs at least two values for " + cfg.experiment);
    in_block("model", [&] {
      cfg.model.validate();
      return 0;
    });
    me = {{"dim", dim}, {"L", L}, {"z", cfg.model.z}, {"s", cfg.model.s}, {"eps", cfg.model.eps},
          {"potential", pe}, {"kernel", ke}};
    if (!cfg.eps_grid.empty()) me["eps_grid"] = cfg.eps_grid;
    me["rate_cap"] = cfg.model.rate_cap ? json(*cfg.model.rate_cap) : json(nullptr);
    echo["model"] = me;
  }
  const int dim = cfg.model.domain.dim();

  // sampler
  {
    Block sb = top.child("sampler");
    SamplerSettings &s = cfg.sampler;
    s.seed = sb.get<std::uint64_t>("seed");
    s.n_samples = sb.get<std::size_t>("samples", 1000);
    s.burn_in = sb.get<std::size_t>("burn_in", 2000);
    s.thin = sb.get<std::size_t>("thin", 0);
    if (s.n_samples < 100) throw ConfigError("sampler.samples", "at least 100 samples are required");
    s.options.displacement_scale = sb.get<double>("displacement", 0.0);
    if (sb.has("max_particles")) s.options.max_particles = sb.get<std::size_t>("max_particles");
    Block mix = sb.child("mix");
    s.options.mix.birth = mix.get<double>("birth", s.options.mix.birth);
    s.options.mix.death = mix.get<double>("death", s.options.mix.death);
    s.options.mix.displacement = mix.get<double>("displacement", s.options.mix.displacement);
    mix.reject_unknown();
    sb.reject_unknown();
    in_block("sampler", [&] {
      GibbsChain probe(cfg.model, s.seed, s.options, {});
      return 0;
    });
    echo["sampler"] = {{"seed", s.seed},
                       {"samples", s.n_samples},
                       {"burn_in", s.burn_in},
                       {"thin", s.thin},
                       {"displacement", s.options.displacement_scale},
                       {"max_particles", s.options.max_particles ? json(*s.options.max_particles)
                                                                 : json(nullptr)},
                       {"mix",
                        {{"birth", s.options.mix.birth},
                         {"death", s.options.mix.death},
                         {"displacement", s.options.mix.displacement}}}};
  }

  // dynamics
  if (needs(*info, "dynamics")) {
    Block db = top.child("dynamics");
    DynamicsBlock d;
    std::string forced;
    if (cfg.experiment == "run-kawasaki") forced = "kawasaki";
    if (cfg.experiment == "run-glauber" || cfg.experiment == "gap-probe") forced = "glauber";
    d.engine = db.get<std::string>("engine", forced.empty() ? d.engine : forced);
    if (d.engine != "kawasaki" && d.engine != "glauber")
      throw ConfigError("dynamics.engine", "expected kawasaki or glauber");
    if (!forced.empty() && d.engine != forced)
      throw ConfigError("dynamics.engine", cfg.experiment + " runs the " + forced + " engine");
    d.alpha = db.maybe<double>("alpha");
    if (d.alpha) positive(*d.alpha, "dynamics.alpha");
    d.T = positive(db.get<double>("T", d.T), "dynamics.T");
    d.replicas = db.get<std::size_t>("replicas", cfg.experiment == "fdd-compare" ? 2000 : 32);
    d.snapshots = db.get<std::size_t>("snapshots", d.snapshots);
    if (db.has("snapshot_times")) d.snapshot_times = read_list(db.raw("snapshot_times"), "dynamics.snapshot_times");
    if (db.has("times")) d.times = read_list(db.raw("times"), "dynamics.times");
    d.permutations = db.get<std::size_t>("permutations", d.permutations);
    d.dt = positive(db.get<double>("dt", d.dt), "dynamics.dt");
    d.max_lag = positive(db.get<double>("max_lag", d.max_lag), "dynamics.max_lag");
    d.groups = db.get<std::size_t>("groups", d.groups);
    d.max_events = db.maybe<std::uint64_t>("max_events");
    d.seed = db.get<std::uint64_t>("seed", split_seed(cfg.sampler.seed, 0xD1));
    db.reject_unknown();
    if (d.replicas == 0) throw ConfigError("dynamics.replicas", "must be positive");
    if (!strictly_increasing(d.snapshot_times) ||
        (!d.snapshot_times.empty() && (d.snapshot_times.front() < 0.0 || d.snapshot_times.back() > d.T)))
      throw ConfigError("dynamics.snapshot_times", "must be increasing and lie in [0, T]");
    if (cfg.experiment == "fdd-compare") {
      if (d.times.empty() || d.times.size() > 3 || !strictly_increasing(d.times) || d.times.front() < 0.0)
        throw ConfigError("dynamics.times", "need 1 to 3 increasing non-negative times");
      if (d.replicas < 500) throw ConfigError("dynamics.replicas", "fdd-compare needs at least 500 replicas");
    }
    if (cfg.experiment == "gap-probe" && !(d.dt < d.max_lag && d.max_lag < d.T))
      throw ConfigError("dynamics.max_lag", "need dt < max_lag < T");
    json de = {{"engine", d.engine},
               {"alpha", d.alpha ? json(*d.alpha) : json(nullptr)},
               {"T", d.T},
               {"replicas", d.replicas},
               {"snapshots", d.snapshots},
               {"snapshot_times", d.snapshot_times},
               {"times", d.times},
               {"permutations", d.permutations},
               {"dt", d.dt},
               {"max_lag", d.max_lag},
               {"groups", d.groups},
               {"max_events", d.max_events ? json(*d.max_events) : json(nullptr)},
               {"seed", d.seed}};
    echo["dynamics"] = de;
    cfg.dynamics = d;
  }

  // test function
  {
    json te;
    cfg.test_function = read_components(top.raw("test_function"), dim, "test_function", te);
    if (needs(*info, "test_function") && cfg.test_function.empty())
      throw ConfigError("test_function", "required block is missing for " + cfg.experiment);
    in_block("test_function", [&] {
      cfg.phi_test().validate(cfg.model.domain);
      return 0;
    });
    echo["test_function"] = te;
  }

  // gnz functionals
  {
    Block gb = top.child("gnz");
    json ge = json::array();
    if (gb.has("functionals")) {
      YAML::Node list = gb.raw("functionals");
      if (!list.IsSequence() || list.size() == 0)
        throw ConfigError("gnz.functionals", "expected a non-empty list");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string where = "gnz.functionals[" + std::to_string(i) + "]";
        Block fb(list[i], where);
        GnzFunctional F;
        json fe, pe;
        F.f = TestFunction(read_components(fb.raw("f"), dim, where + ".f", fe));
        F.psi = TestFunction(read_components(fb.raw("psi"), dim, where + ".psi", pe));
        auto g = fb.get<std::string>("g", "polynomial");
        if (g == "exp") F.g = OuterKind::exp_clipped;
        else if (g == "polynomial") F.g = OuterKind::polynomial;
        else throw ConfigError(where + ".g", "expected exp or polynomial");
        F.clip = fb.get<double>("clip", F.clip);
        if (fb.has("poly")) {
          auto p = read_list(fb.raw("poly"), where + ".poly");
          if (p.empty() || p.size() > 4) throw ConfigError(where + ".poly", "need 1 to 4 coefficients");
          F.poly = {0, 0, 0, 0};
          std::copy(p.begin(), p.end(), F.poly.begin());
        }
        fb.reject_unknown();
        in_block(where, [&] {
          F.f.validate(cfg.model.domain);
          F.psi.validate(cfg.model.domain);
          return 0;
        });
        cfg.functionals.push_back(F);
      }
    }
    gb.reject_unknown();
    if (cfg.functionals.empty() && cfg.experiment == "validate-gnz")
      cfg.functionals = default_functionals(cfg.model);
    for (const auto &F : cfg.functionals)
      ge.push_back({{"f", components_json(F.f, dim)},
                    {"psi", components_json(F.psi, dim)},
                    {"g", F.g == OuterKind::exp_clipped ? "exp" : "polynomial"},
                    {"clip", F.clip},
                    {"poly", F.poly}});
    if (!ge.empty()) echo["gnz"] = {{"functionals", ge}};
  }

  // shift
  if (top.has("shift")) {
    Block sb = top.child("shift");
    ShiftBlock sh;
    sh.x = read_point(sb.raw("x"), dim, "shift.x");
    sh.y = read_point(sb.raw("y"), dim, "shift.y");
    sh.xp = sb.has("xp") ? read_point(sb.raw("xp"), dim, "shift.xp") : Point{};
    sh.yp = sb.has("yp") ? read_point(sb.raw("yp"), dim, "shift.yp") : Point{};
    sh.eps = sb.has("eps") ? read_list(sb.raw("eps"), "shift.eps") : cfg.eps_grid;
    if (sh.eps.empty()) throw ConfigError("shift.eps", "need at least one eps value");
    for (double e : sh.eps)
      positive(e, "shift.eps");
    json pe;
    sh.psi = read_components(sb.raw("psi"), dim, "shift.psi", pe);
    sb.reject_unknown();
    if (sh.x == sh.y) throw ConfigError("shift.x", "x and y must differ");
    echo["shift"] = {{"x", point_json(sh.x, dim)}, {"xp", point_json(sh.xp, dim)},
                     {"y", point_json(sh.y, dim)}, {"yp", point_json(sh.yp, dim)},
                     {"eps", sh.eps},            {"psi", pe}};
    cfg.shift = sh;
  }

  // bins
  {
    Block bb = top.child("bins");
    const double R = cfg.model.phi.range();
    const double half = 0.5 * cfg.model.domain.side();
    const double def = R > 0.0 ? std::min(12.0 * R, half) : 0.25 * cfg.model.domain.side();
    cfg.bins.r_max = bb.get<double>("r_max", def);
    cfg.bins.n = bb.get<std::size_t>("n", cfg.bins.n);
    bb.reject_unknown();
    if (!(cfg.bins.r_max > 0.0) || cfg.bins.r_max > half)
      throw ConfigError("bins.r_max", "must lie in (0, L/2]");
    if (cfg.bins.n == 0) throw ConfigError("bins.n", "must be positive");
    echo["bins"] = {{"r_max", cfg.bins.r_max}, {"n", cfg.bins.n}};
  }

  // verdicts
  {
    Block vb = top.child("verdicts");
    VerdictBlock &v = cfg.verdicts;
    v.sigma = positive(vb.get<double>("sigma", v.sigma), "verdicts.sigma");
    v.level = vb.get<double>("level", v.level);
    if (!(v.level > 0.0 && v.level < 1.0)) throw ConfigError("verdicts.level", "must lie in (0, 1)");
    v.sweep_ratio = positive(vb.get<double>("sweep_ratio", v.sweep_ratio), "verdicts.sweep_ratio");
    v.fdd_ratio = positive(vb.get<double>("fdd_ratio", v.fdd_ratio), "verdicts.fdd_ratio");
    v.gap_rel_tol = positive(vb.get<double>("gap_rel_tol", v.gap_rel_tol), "verdicts.gap_rel_tol");
    vb.reject_unknown();
    echo["verdicts"] = {{"sigma", v.sigma},
                        {"level", v.level},
                        {"sweep_ratio", v.sweep_ratio},
                        {"fdd_ratio", v.fdd_ratio},
                        {"gap_rel_tol", v.gap_rel_tol}};
  }

  // output
  {
    Block ob = top.child("output");
    cfg.output.dir = ob.get<std::string>("dir", cfg.output.dir);
    if (ob.has("formats")) {
      YAML::Node f = ob.raw("formats");
      if (!f.IsSequence()) throw ConfigError("output.formats", "expected a list");
      cfg.output.json = cfg.output.csv = false;
      for (const auto &x : f) {
        auto s = Block::convert<std::string>(x, "output.formats");
        if (s == "json") cfg.output.json = true;
        else if (s == "csv") cfg.output.csv = true;
        else throw ConfigError("output.formats", "expected json or csv, got '" + s + "'");
      }
    }
    ob.reject_unknown();
  }

  top.reject_unknown();
  cfg.echo = echo;
  return cfg;
}

RunConfig load_run_config(const std::string &path, const std::vector<std::string> &overrides) {
  YAML::Node doc;
  {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    try {
      doc = YAML::Load(in);
    } catch (const YAML::Exception &e) {
      throw ConfigError("config", std::string("YAML syntax error: ") + e.what());
    }
  }
  for (const auto &o : overrides)
    apply_override(doc, o);
  return parse_run_config(doc);
}

std::string RunConfig::content_hash() const {
  const std::string s = echo.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace kgl
