#include "polar/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <string_view>

#include "polar/errors.hpp"

namespace polar {
namespace {

using nlohmann::json;

// Object reader that remembers which keys were consumed so unknown ones can
// be rejected with their full path.
// Parsed text yields unsigned integers; trees built in code hold signed ones.
bool non_negative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be a JSON object");
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const char* key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(at(key) + " must be a number");
    double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(at(key) + " must be finite");
    return x;
  }

  std::size_t count(const char* key, std::size_t fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!non_negative_integer(v)) throw ConfigError(at(key) + " must be a non-negative integer");
    return v.get<std::size_t>();
  }

  std::uint64_t u64(const char* key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!non_negative_integer(v)) throw ConfigError(at(key) + " must be a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool flag(const char* key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(at(key) + " must be true or false");
    return v.get<bool>();
  }

  std::string text(const char* key, std::string fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(at(key) + " must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const char* key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(at(key) + " must be an array of numbers");
    std::vector<double> out;
    for (const json& e : v) {
      if (!e.is_number()) throw ConfigError(at(key) + " must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<std::size_t> counts(const char* key, std::vector<std::size_t> fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(at(key) + " must be an array of integers");
    std::vector<std::size_t> out;
    for (const json& e : v) {
      if (!non_negative_integer(e)) throw ConfigError(at(key) + " must be an array of non-negative integers");
      out.push_back(e.get<std::size_t>());
    }
    return out;
  }

  Section child(const char* key) { return Section(raw(key), at(key)); }

  std::string at(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "config" : path_; }

  // Throws on the first key that was never asked for.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("unknown key '" + at(it.key().c_str()) + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Enum parsers throw DomainError on unknown names; give them the key path.
template <class F>
auto named(Section& s, const char* key, std::string fallback, F parse) {
  std::string name = s.text(key, std::move(fallback));
  try {
    return parse(name);
  } catch (const std::exception&) {
    throw ConfigError(s.at(key) + ": unknown value '" + name + "'");
  }
}

Vec3 parse_center(Section& s) {
  if (!s.has("center")) return {};
  std::vector<double> c = s.numbers("center", {});
  if (c.empty() || c.size() > 3) throw ConfigError(s.at("center") + " must hold 1 to 3 numbers");
  Vec3 p;
  for (std::size_t k = 0; k < c.size(); ++k) p[k] = c[k];
  return p;
}

SetModel parse_set(const json& j, const std::string& path) {
  Section s(j, path);
  if (!s.has("kind")) throw ConfigError(s.where() + ".kind is required");
  std::string kind = s.text("kind", "");
  SetModel m;
  if (kind == "circle") {
    m = SetModel::circle(s.number("radius", 1.0), parse_center(s));
  } else if (kind == "sphere2") {
    m = SetModel::sphere2(s.number("radius", 1.0), parse_center(s));
  } else if (kind == "ball") {
    std::size_t dim = s.count("dim", 3);
    if (dim < 1 || dim > 3) throw ConfigError(s.at("dim") + " must be 1, 2 or 3");
    m = SetModel::ball(static_cast<int>(dim), s.number("radius", 1.0), parse_center(s));
  } else if (kind == "segment") {
    m = SetModel::segment(s.number("lo", 0.0), s.number("hi", 1.0), parse_center(s));
  } else if (kind == "union") {
    if (!s.has("components")) throw ConfigError(s.where() + ".components is required for a union");
    const json& comps = s.raw("components");
    if (!comps.is_array() || comps.size() < 2)
      throw ConfigError(s.at("components") + " must be an array of at least two sets");
    std::vector<SetModel> parts;
    for (std::size_t k = 0; k < comps.size(); ++k)
      parts.push_back(parse_set(comps[k], s.at("components") + "[" + std::to_string(k) + "]"));
    double sep = s.number("separation", 0.0);
    s.finish();
    try {
      return SetModel::union_of(std::move(parts), sep);
    } catch (const DomainError& e) {
      throw ConfigError(s.where() + ": " + e.what());
    }
  } else {
    throw ConfigError(s.at("kind") + ": unknown set kind '" + kind + "'");
  }
  s.finish();
  try {
    m.validate();
  } catch (const DomainError& e) {
    throw ConfigError(s.where() + ": " + e.what());
  }
  return m;
}

json center_json(Vec3 c) { return json::array({c.x, c.y, c.z}); }

}  // namespace

SetModel set_from_json(const json& j) { return parse_set(j, "set"); }

json to_json(const SetModel& set) {
  switch (set.kind) {
    case SetKind::circle:
    case SetKind::sphere2:
      return {{"kind", to_string(set.kind)}, {"radius", set.radius}, {"center", center_json(set.center)}};
    case SetKind::ball:
      return {{"kind", "ball"}, {"dim", set.dim}, {"radius", set.radius}, {"center", center_json(set.center)}};
    case SetKind::segment:
      return {{"kind", "segment"}, {"lo", set.lo}, {"hi", set.hi}, {"center", center_json(set.center)}};
    case SetKind::union_of: {
      json comps = json::array();
      for (const SetModel& c : set.components) comps.push_back(to_json(c));
      return {{"kind", "union"}, {"components", comps}, {"separation", set.separation}};
    }
  }
  return {};
}

KernelSpec kernel_from_json(const json& j) {
  Section s(j, "kernel");
  if (!s.has("family")) throw ConfigError("kernel.family is required");
  KernelSpec k;
  k.family = named(s, "family", "", [](const std::string& n) { return kernel_family_from_string(n); });
  k.s = s.number("s", k.s);
  k.c = s.number("c", k.c);
  k.alpha = s.number("alpha", k.alpha);
  s.finish();
  return k;
}

json to_json(const KernelSpec& k) {
  json out = {{"family", to_string(k.family)}};
  switch (k.family) {
    case KernelFamily::riesz: out["s"] = k.s; break;
    case KernelFamily::log: out["c"] = k.c; break;
    case KernelFamily::log_power:
      out["s"] = k.s;
      out["c"] = k.c;
      out["alpha"] = k.alpha;
      break;
    case KernelFamily::gaussian: out["c"] = k.c; break;
  }
  return out;
}

void RunConfig::resolve() {
  solver.seed = seed;
  solver.threads = threads;
  ratio.seed = seed;
  lebesgue.seed = seed;
  continuity.tol = tol;
  ratio.tol = tol;
  lebesgue.tol = tol;
  if (game_resolution == 0) game_resolution = default_game_resolution(set);
  if (verify_game_resolution == 0) verify_game_resolution = default_game_resolution(set);
}

RunConfig parse_run_config(const json& j) {
  RunConfig cfg;
  Section root(j, "");
  if (!root.has("kernel")) throw ConfigError("kernel is required");
  if (!root.has("set")) throw ConfigError("set is required");
  cfg.kernel = kernel_from_json(root.raw("kernel"));
  cfg.set = set_from_json(root.raw("set"));
  cfg.seed = root.u64("seed", cfg.seed);
  cfg.threads = root.count("threads", cfg.threads);
  cfg.output_dir = root.text("output_dir", "");
  cfg.n = root.count("n", cfg.n);
  if (cfg.n < 1) throw ConfigError("n must be at least 1");

  if (root.has("solver")) {
    Section s = root.child("solver");
    SolverConfig& c = cfg.solver;
    c.method = named(s, "method", std::string(to_string(c.method)),
                     [](const std::string& n) { return solver_method_from_string(n); });
    c.beta0 = s.number("beta0", c.beta0);
    c.beta_end = s.number("beta_end", c.beta_end);
    c.stages = s.count("stages", c.stages);
    c.restarts = s.count("restarts", c.restarts);
    c.inner_resolution = s.count("inner_resolution", c.inner_resolution);
    c.max_outer_iters = s.count("max_outer_iters", c.max_outer_iters);
    c.fd_step = s.number("fd_step", c.fd_step);
    s.finish();
    c.validate();
  }

  if (root.has("game")) {
    Section s = root.child("game");
    GameConfig& g = cfg.game;
    g.solver = named(s, "solver", std::string(to_string(g.solver)),
                     [](const std::string& n) { return game_solver_from_string(n); });
    g.max_iters = s.count("max_iters", g.max_iters);
    g.gap_tol = s.number("gap_tol", g.gap_tol);
    g.prune = s.number("prune", g.prune);
    g.polish = s.flag("polish", g.polish);
    g.certify_factor = s.count("certify_factor", g.certify_factor);
    g.constraint_factor = s.count("constraint_factor", g.constraint_factor);
    g.payoff.rule = named(s, "payoff_rule", std::string(to_string(g.payoff.rule)),
                          [](const std::string& n) { return payoff_rule_from_string(n); });
    g.payoff.cell_refinement = s.count("cell_refinement", g.payoff.cell_refinement);
    g.payoff.cap_diagonal = s.flag("cap_diagonal", g.payoff.cap_diagonal);
    g.payoff.coincident_meshes = s.flag("coincident_meshes", g.payoff.coincident_meshes);
    cfg.game_resolution = s.count("resolution", 0);
    if (s.has("matrix")) {
      const json& m = s.raw("matrix");
      if (!m.is_array() || m.empty()) throw ConfigError("game.matrix must be a non-empty array of rows");
      std::vector<std::vector<double>> rows;
      for (const json& r : m) {
        if (!r.is_array() || r.empty()) throw ConfigError("game.matrix rows must be non-empty arrays");
        std::vector<double> row;
        for (const json& e : r) {
          if (!e.is_number() || !std::isfinite(e.get<double>()))
            throw ConfigError("game.matrix entries must be finite numbers");
          row.push_back(e.get<double>());
        }
        if (!rows.empty() && row.size() != rows.front().size())
          throw ConfigError("game.matrix rows must all have the same length");
        rows.push_back(std::move(row));
      }
      cfg.toy_matrix = std::move(rows);
    }
    s.finish();
    if (g.max_iters == 0) throw ConfigError("game.max_iters must be positive");
    if (g.gap_tol < 0 || g.prune < 0) throw ConfigError("game.gap_tol and game.prune must be non-negative");
    if (g.certify_factor == 0) throw ConfigError("game.certify_factor must be positive");
  }

  if (root.has("verify")) {
    Section v = root.child("verify");
    cfg.n_list = v.counts("n_list", cfg.n_list);
    cfg.verify_game_resolution = v.count("game_resolution", 0);
    if (v.has("continuity")) {
      Section s = v.child("continuity");
      ContinuityConfig& c = cfg.continuity;
      c.scheme = named(s, "scheme", std::string(to_string(c.scheme)),
                       [](const std::string& n) { return approx_scheme_from_string(n); });
      c.n_list = s.counts("n_list", c.n_list);
      c.quadrature_resolution = s.count("quadrature_resolution", c.quadrature_resolution);
      c.reference_resolution = s.count("reference_resolution", c.reference_resolution);
      s.finish();
    }
    if (v.has("ratio")) {
      Section s = v.child("ratio");
      RatioScanConfig& r = cfg.ratio;
      r.samples = s.count("samples", r.samples);
      r.radii = s.numbers("radii", r.radii);
      r.local_resolution = s.count("local_resolution", r.local_resolution);
      r.max_kappa = s.number("max_kappa", r.max_kappa);
      s.finish();
    }
    if (v.has("lebesgue")) {
      Section s = v.child("lebesgue");
      LebesgueConfig& l = cfg.lebesgue;
      l.atoms = s.count("atoms", l.atoms);
      l.points = s.count("points", l.points);
      l.atom_points = s.count("atom_points", l.atom_points);
      l.radii = s.numbers("radii", l.radii);
      l.local_resolution = s.count("local_resolution", l.local_resolution);
      if (s.has("measure")) {
        try {
          cfg.lebesgue_measure = measure_from_json(s.raw("measure"));
          check_supported_on(*cfg.lebesgue_measure, cfg.set);
        } catch (const std::exception& e) {
          throw ConfigError(std::string("verify.lebesgue.measure: ") + e.what());
        }
      }
      s.finish();
    }
    v.finish();
    for (std::size_t n : cfg.n_list)
      if (n == 0) throw ConfigError("verify.n_list entries must be at least 1");
    if (cfg.n_list.empty()) throw ConfigError("verify.n_list must not be empty");
  }

  if (root.has("tolerances")) {
    Section s = root.child("tolerances");
    Tolerances& t = cfg.tol;
    t.ohtsuka_gap = s.number("ohtsuka_gap", t.ohtsuka_gap);
    t.continuity = s.number("continuity", t.continuity);
    t.limit_discrepancy = s.number("limit_discrepancy", t.limit_discrepancy);
    t.limit_gap = s.number("limit_gap", t.limit_gap);
    t.ratio_stability = s.number("ratio_stability", t.ratio_stability);
    t.case1_slack = s.number("case1_slack", t.case1_slack);
    t.lebesgue_error = s.number("lebesgue_error", t.lebesgue_error);
    t.min_principle = s.number("min_principle", t.min_principle);
    t.certify_slack = s.number("certify_slack", t.certify_slack);
    t.trend_slack = s.number("trend_slack", t.trend_slack);
    s.finish();
  }
  root.finish();

  try {
    check_admissible(cfg.kernel, cfg.set.hausdorff_dim(), cfg.set.diameter());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("kernel not admissible on this set: ") + e.what());
  }
  cfg.resolve();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_run_config(j);
}

json echo(const RunConfig& cfg) {
  const GameConfig& g = cfg.game;
  json game = {{"solver", to_string(g.solver)},
               {"max_iters", g.max_iters},
               {"gap_tol", g.gap_tol},
               {"prune", g.prune},
               {"polish", g.polish},
               {"certify_factor", g.certify_factor},
               {"constraint_factor", g.constraint_factor},
               {"payoff_rule", to_string(g.payoff.rule)},
               {"cell_refinement", g.payoff.cell_refinement},
               {"cap_diagonal", g.payoff.cap_diagonal},
               {"coincident_meshes", g.payoff.coincident_meshes},
               {"resolution", cfg.game_resolution}};
  if (cfg.toy_matrix) game["matrix"] = *cfg.toy_matrix;

  json solver = to_json(cfg.solver);
  solver.erase("seed");

  json lebesgue = {{"atoms", cfg.lebesgue.atoms},
                   {"points", cfg.lebesgue.points},
                   {"atom_points", cfg.lebesgue.atom_points},
                   {"radii", cfg.lebesgue.radii},
                   {"local_resolution", cfg.lebesgue.local_resolution}};
  if (cfg.lebesgue_measure) lebesgue["measure"] = to_json(*cfg.lebesgue_measure, cfg.set.ambient_dim());

  json verify = {{"n_list", cfg.n_list},
                 {"game_resolution", cfg.verify_game_resolution},
                 {"continuity",
                  {{"scheme", to_string(cfg.continuity.scheme)},
                   {"n_list", cfg.continuity.n_list},
                   {"quadrature_resolution", cfg.continuity.quadrature_resolution},
                   {"reference_resolution", cfg.continuity.reference_resolution}}},
                 {"ratio",
                  {{"samples", cfg.ratio.samples},
                   {"radii", cfg.ratio.radii},
                   {"local_resolution", cfg.ratio.local_resolution},
                   {"max_kappa", cfg.ratio.max_kappa}}},
                 {"lebesgue", lebesgue}};

  return {{"kernel", to_json(cfg.kernel)},
          {"set", to_json(cfg.set)},
          {"seed", cfg.seed},
          {"threads", cfg.threads},
          {"n", cfg.n},
          {"solver", solver},
          {"game", game},
          {"verify", verify},
          {"tolerances", to_json(cfg.tol)}};
}

void replace_nonfinite(json& j) {
  if (j.is_number_float()) {
    double x = j.get<double>();
    if (std::isnan(x)) j = "nan";
    else if (std::isinf(x)) j = x > 0 ? "inf" : "-inf";
  } else if (j.is_array() || j.is_object()) {
    for (auto& e : j) replace_nonfinite(e);
  }
}

}  // namespace polar
