#include "polar/cli.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polar/config.hpp"
#include "polar/errors.hpp"
#include "polar/potentials.hpp"

namespace polar::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "run config (JSON)")->required();
  sub->add_option("--out", c.out, "output directory (default: runs/<timestamp>-<command>)");
  sub->add_option("--seed", c.seed, "overrides the config seed");
  sub->add_option("--threads", c.threads, "worker cap, 0 = machine parallelism");
}

RunConfig load(const Common& c) {
  RunConfig cfg = load_run_config(c.config_path);
  if (c.seed) cfg.seed = *c.seed;
  if (c.threads) cfg.threads = *c.threads;
  cfg.resolve();
  return cfg;
}

fs::path output_dir(const Common& c, const RunConfig& cfg, const std::string& command) {
  fs::path dir;
  if (!c.out.empty()) {
    dir = c.out;
  } else if (!cfg.output_dir.empty()) {
    dir = cfg.output_dir;
  } else {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    localtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm);
    const fs::path base = fs::path("runs") / (std::string(stamp) + "-" + command);
    dir = base;
    for (int k = 1; fs::exists(dir); ++k) dir = base.string() + "-" + std::to_string(k);
  }
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

void write_json(const fs::path& p, json j) {
  replace_nonfinite(j);
  write_text(p, j.dump(2) + "\n");
}

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num(const Extended& v) { return v.is_infinite() ? "inf" : num(v.value()); }

std::string point_text(Vec3 p, int dim) {
  std::string s = "(";
  for (int k = 0; k < dim; ++k) s += (k ? ", " : "") + num(p[static_cast<std::size_t>(k)]);
  return s + ")";
}

std::string coord_header(int dim) {
  static const char* names[] = {"x", "y", "z"};
  std::string h;
  for (int k = 0; k < dim; ++k) h += std::string(k ? "," : "") + names[k];
  return h;
}

std::string coord_row(Vec3 p, int dim) {
  std::string r;
  for (int k = 0; k < dim; ++k) r += (k ? "," : "") + num(p[static_cast<std::size_t>(k)]);
  return r;
}

json run_header(const RunConfig& cfg, const std::string& command) {
  return {{"command", command}, {"kernel", to_json(cfg.kernel)}, {"set", to_json(cfg.set)}, {"seed", cfg.seed}};
}

int solve_discrete_cmd(const Common& c, std::optional<std::size_t> n_flag) {
  RunConfig cfg = load(c);
  if (n_flag) cfg.n = *n_flag;
  if (cfg.n < 1) throw ConfigError("--n must be at least 1");
  const fs::path dir = output_dir(c, cfg, "solve-discrete");
  write_json(dir / "config.json", echo(cfg));

  const SolveReport rep = solve_discrete(cfg.kernel, cfg.set, cfg.n, cfg.solver);
  const int dim = cfg.set.ambient_dim();

  json report = run_header(cfg, "solve-discrete");
  report["n"] = cfg.n;
  report["solver"] = to_json(cfg.solver);
  report["result"] = to_json(rep, dim);
  write_json(dir / "report.json", report);

  std::ostringstream pts;
  pts << "index," << coord_header(dim) << "\n";
  for (std::size_t i = 0; i < rep.best_config.size(); ++i)
    pts << i << "," << coord_row(rep.best_config.points[i], dim) << "\n";
  write_text(dir / "config_points.csv", pts.str());

  const Mesh mesh = make_mesh(cfg.set, rep.inner_resolution, 0.0);
  const std::vector<Extended> field =
      potential_field(cfg.kernel, counting_measure(rep.best_config), mesh.nodes);
  std::ostringstream pf;
  pf << coord_header(dim) << ",potential\n";
  for (std::size_t j = 0; j < mesh.size(); ++j) pf << coord_row(mesh.nodes[j], dim) << "," << num(field[j]) << "\n";
  write_text(dir / "potential_field.csv", pf.str());

  std::cout << "value: " << num(rep.value) << "\n";
  std::cout << "worst point: " << point_text(rep.worst_point, dim) << "\n";
  std::cout << "collapse detected: " << (rep.collapse_detected ? "true" : "false") << "\n";
  std::cout << "output: " << dir.string() << "\n";
  if (rep.stalled) {
    std::cerr << "warning: the winning restart ended below its starting value (solver stalled)\n";
    return kStalled;
  }
  return kOk;
}

int solve_continuous_cmd(const Common& c) {
  RunConfig cfg = load(c);
  const fs::path dir = output_dir(c, cfg, "solve-continuous");
  write_json(dir / "config.json", echo(cfg));

  json report = run_header(cfg, "solve-continuous");
  if (cfg.toy_matrix) {
    const PayoffMatrix m = PayoffMatrix::from_rows(*cfg.toy_matrix);
    const GameSolution g = solve_game(m, cfg.game);
    report["mode"] = "matrix";
    report["value"] = g.value;
    report["game"] = to_json(g);
    write_json(dir / "report.json", report);
    write_json(dir / "measure.json", {{"weights", g.weights}, {"column_weights", g.column_weights}});
    std::cout << "value: " << num(g.value) << "\n";
    std::cout << "output: " << dir.string() << "\n";
    return kOk;
  }

  const ContinuousResult r = continuous_polarization(cfg.kernel, cfg.set, cfg.game_resolution, cfg.game);
  const int dim = cfg.set.ambient_dim();
  report["mode"] = "set";
  report["resolution"] = cfg.game_resolution;
  report["payoff_rule"] = to_string(cfg.game.payoff.rule);
  report["value"] = r.t_estimate;
  report["certified"] = r.certified;
  report["support_size"] = r.support_size;
  report["cap_applied"] = r.cap_applied;
  report["game"] = to_json(r.game);
  write_json(dir / "report.json", report);
  write_json(dir / "measure.json", to_json(r.measure, dim));

  std::cout << "value: " << num(r.t_estimate) << "\n";
  std::cout << "certified: " << num(r.certified) << "\n";
  std::cout << "support size: " << r.support_size << "\n";
  std::cout << "output: " << dir.string() << "\n";
  return kOk;
}

// Per-radius worst error over regular points; one polyline instead of one
// zig-zag through every test point.
Table lebesgue_plot_table(const Table& t) {
  std::map<double, double> worst;
  for (const auto& row : t.rows) {
    if (row[1] != "regular" || !row[2].is_number() || !row[5].is_number()) continue;
    double& w = worst[row[2].get<double>()];
    w = std::max(w, row[5].get<double>());
  }
  Table out;
  out.columns = {"r", "max_rel_error"};
  for (const auto& [r, e] : worst) out.rows.push_back({r, e});
  return out;
}

std::string suite_svg(const SuiteReport& rep) {
  const Table& t = rep.table;
  if (rep.suite == "ohtsuka") return svg_loglog(t, "N", {"gap"}, "relative gap |P_hat - T_hat| / T_hat");
  if (rep.suite == "continuity")
    return svg_loglog(t, "N", {"rel_diff", "discrepancy"}, "polarization continuity");
  if (rep.suite == "limit_measure") return svg_loglog(t, "N", {"discrepancy", "gap"}, "limit measure");
  if (rep.suite == "ratio_bound") return svg_loglog(t, "r", {"max_ratio"}, "local ratio maxima");
  return svg_loglog(lebesgue_plot_table(t), "r", {"max_rel_error"}, "Lebesgue averages");
}

SuiteReport run_suite(const std::string& name, const RunConfig& cfg) {
  SweepConfig sweep;
  sweep.n_list = cfg.n_list;
  sweep.solver = cfg.solver;
  sweep.game = cfg.game;
  sweep.game_resolution = cfg.verify_game_resolution;
  sweep.tol = cfg.tol;
  if (name == "ohtsuka") return ohtsuka_sweep(cfg.kernel, cfg.set, sweep);
  if (name == "limit_measure") return limit_measure_check(cfg.kernel, cfg.set, sweep);
  if (name == "continuity") return continuity_check(cfg.kernel, cfg.set, cfg.continuity);
  if (name == "ratio_bound") return ratio_bound_scan(cfg.kernel, cfg.set, cfg.ratio);
  const DiscreteMeasure mu =
      cfg.lebesgue_measure ? *cfg.lebesgue_measure : lebesgue_default_measure(cfg.set, cfg.lebesgue.atoms);
  return lebesgue_point_scan(cfg.kernel, cfg.set, mu, cfg.lebesgue);
}

int verify_cmd(const Common& c, const std::string& suite) {
  static const std::vector<std::string> all = {"ohtsuka", "continuity", "limit_measure", "ratio_bound",
                                               "lebesgue"};
  std::vector<std::string> suites;
  if (suite == "all") {
    suites = all;
  } else if (std::find(all.begin(), all.end(), suite) != all.end()) {
    suites = {suite};
  } else {
    throw ConfigError("unknown suite '" + suite +
                      "' (expected ohtsuka, continuity, limit_measure, ratio_bound, lebesgue or all)");
  }
  RunConfig cfg = load(c);
  const fs::path dir = output_dir(c, cfg, "verify");
  write_json(dir / "config.json", echo(cfg));

  json summary = run_header(cfg, "verify");
  summary["suite"] = suite;
  json entries = json::array();
  bool ok = true;
  for (const std::string& name : suites) {
    const SuiteReport rep = run_suite(name, cfg);
    write_json(dir / (name + ".json"), rep.to_json());
    write_text(dir / (name + ".csv"), rep.table.to_csv());
    write_text(dir / (name + ".svg"), suite_svg(rep));
    json failed = json::array();
    for (const Assertion& a : rep.assertions) {
      std::cout << (a.pass ? "PASS " : "FAIL ") << name << "/" << a.name << " observed=" << num(a.observed)
                << " threshold=" << num(a.threshold) << "\n";
      if (!a.pass) failed.push_back(a.name);
    }
    ok = ok && rep.passed();
    entries.push_back({{"suite", name}, {"passed", rep.passed()}, {"failed", failed}});
  }
  summary["suites"] = entries;
  summary["passed"] = ok;
  write_json(dir / "summary.json", summary);
  std::cout << (ok ? "all assertions passed" : "assertion failures") << "; output: " << dir.string() << "\n";
  return ok ? kOk : kAssertionFailed;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Riesz-like polarization toolkit"};
  app.require_subcommand(1);

  Common dc, cc, vc;
  std::optional<std::size_t> n_flag;
  std::string suite = "all";

  CLI::App* discrete = app.add_subcommand("solve-discrete", "search for an optimal N-point configuration");
  add_common(discrete, dc);
  discrete->add_option("--n", n_flag, "point count (overrides the config)");

  CLI::App* continuous = app.add_subcommand("solve-continuous", "discretized continuous polarization game");
  add_common(continuous, cc);

  CLI::App* verify = app.add_subcommand("verify", "run verification suites");
  add_common(verify, vc);
  verify->add_option("--suite", suite, "ohtsuka, continuity, limit_measure, ratio_bound, lebesgue or all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (discrete->parsed()) return solve_discrete_cmd(dc, n_flag);
    if (continuous->parsed()) return solve_continuous_cmd(cc);
    return verify_cmd(vc, suite);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const ConstructionError& e) {
    std::cerr << "construction error: " << e.what() << "\n";
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
  } catch (const SizeError& e) {
    std::cerr << "size error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kConfigError;
}

}  // namespace polar::cli
