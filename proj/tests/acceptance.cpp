// Acceptance run: one PASS/FAIL line per criterion. With --criterion K only
// criterion K runs; the exit status is 0 iff every selected criterion passed.
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "polar/discrete.hpp"
#include "polar/game.hpp"
#include "polar/verify.hpp"

using namespace polar;
namespace fs = std::filesystem;

namespace {

const KernelSpec riesz = KernelSpec::riesz(0.5);

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Adaptive tanh-sinh for the uniform circle potential, folded onto [0, pi/2]
// so the only singular end is the exact abscissa 0.
double uniform_circle_oracle(double s) {
  constexpr double pi = std::numbers::pi;
  boost::math::quadrature::tanh_sinh<double> q;
  return 2.0 * q.integrate([s](double u) { return std::pow(2.0 * std::sin(u), -s); }, 0.0, pi / 2.0) / pi;
}

const Assertion& named(const SuiteReport& r, const std::string& name) {
  for (const Assertion& a : r.assertions)
    if (a.name == name) return a;
  throw std::runtime_error("missing assertion " + name);
}

Outcome ball_collapse() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  double worst_radius = 0.0;
  double worst_value_error = 0.0;
  for (std::size_t n : {2u, 4u, 8u}) {
    SolverConfig cfg;
    cfg.restarts = 16;
    const SolveReport r = solve_discrete(riesz, SetModel::ball(3, 1.0), n, cfg);
    for (const Vec3& p : r.best_config.points) worst_radius = std::max(worst_radius, norm(p));
    worst_value_error = std::max(worst_value_error, std::abs(r.value - 1.0));
  }
  const double secs = seconds_since(t0);
  ok = worst_radius <= 0.05 && worst_value_error <= 0.01 && secs <= 120.0;
  return {ok, "max |x| " + fmt("%.3g", worst_radius) + " <= 0.05, max |P - 1| " + fmt("%.3g", worst_value_error) +
                  " <= 0.01, " + fmt("%.1f", secs) + " s <= 120 s"};
}

Outcome circle_optimum() {
  const auto t0 = std::chrono::steady_clock::now();
  const ContinuousResult r = continuous_polarization(riesz, SetModel::circle(1.0), 256);
  const double secs = seconds_since(t0);
  const double oracle = uniform_circle_oracle(0.5);
  const double rel = std::abs(r.t_estimate - oracle) / oracle;
  const auto [lo, hi] = std::minmax_element(r.game.weights.begin(), r.game.weights.end());
  double mean = 0.0;
  for (double w : r.game.weights) mean += w;
  mean /= static_cast<double>(r.game.weights.size());
  const double spread = (*hi - *lo) / mean;
  const bool ok = rel <= 0.01 && spread <= 0.05 && secs <= 60.0;
  return {ok, "T_hat " + fmt("%.6f", r.t_estimate) + " vs oracle " + fmt("%.6f", oracle) + " rel " +
                  fmt("%.2e", rel) + " <= 0.01, weight spread " + fmt("%.2e", spread) + " <= 0.05, " +
                  fmt("%.1f", secs) + " s <= 60 s"};
}

Outcome ohtsuka() {
  const auto t0 = std::chrono::steady_clock::now();
  SweepConfig cfg;
  cfg.n_list = {1, 2, 4, 8, 16};
  const SuiteReport r = ohtsuka_sweep(riesz, SetModel::circle(1.0), cfg);
  const double secs = seconds_since(t0);
  const auto gaps = r.table.column("gap");
  const bool ok = gaps.back() <= 0.02 && gaps.back() <= gaps.front() && secs <= 300.0;
  return {ok, "gap N=16 " + fmt("%.4f", gaps.back()) + " <= 0.02 and <= gap N=1 " + fmt("%.4f", gaps.front()) +
                  ", " + fmt("%.1f", secs) + " s <= 300 s"};
}

Outcome continuity() {
  ContinuityConfig cfg;
  cfg.n_list = {16, 32, 64, 128, 256};
  const SuiteReport r = continuity_check(riesz, SetModel::circle(1.0), cfg);
  const auto rel = r.table.column("rel_diff");
  bool decreasing = true;
  for (std::size_t i = 1; i < rel.size(); ++i) decreasing = decreasing && rel[i] < rel[i - 1];
  const bool ok = rel.back() < 0.01 && decreasing;
  return {ok, "rel diff N=256 " + fmt("%.4f", rel.back()) + " < 0.01, N=16 " + fmt("%.4f", rel.front()) +
                  (decreasing ? ", strictly decreasing" : ", not decreasing")};
}

Outcome ratio_scan() {
  bool ok = true;
  std::string detail;
  for (const SetModel& s : {SetModel::circle(1.0), SetModel::segment(0, 1)}) {
    RatioScanConfig cfg;
    cfg.samples = 1000;
    const SuiteReport r = ratio_bound_scan(riesz, s, cfg);
    const Assertion& stab = named(r, "ratio_stability");
    const Assertion& case1 = named(r, "case1_bound");
    const auto radii = r.table.column("r");
    const bool deep = *std::min_element(radii.begin(), radii.end()) <= s.diameter() / 1000.0 * (1.0 + 1e-12);
    ok = ok && stab.pass && stab.threshold == 0.2 && case1.pass && deep;
    detail += std::string(to_string(s.kind)) + ": spread " + fmt("%.3f", stab.observed) + " <= 0.2, case-1 max " +
              fmt("%.4f", case1.observed) + " <= " + fmt("%.4f", case1.threshold) + "; ";
  }
  return {ok, detail};
}

Outcome lebesgue() {
  const SetModel circle = SetModel::circle(1.0);
  LebesgueConfig cfg;
  cfg.atoms = 64;
  const SuiteReport r = lebesgue_point_scan(riesz, circle, lebesgue_default_measure(circle, 64), cfg);
  const Assertion& err = named(r, "error_at_smallest_radius");
  const Assertion& atoms = named(r, "atoms_increasing");
  const auto radii = r.table.column("r");
  const bool deep = *std::min_element(radii.begin(), radii.end()) <= circle.diameter() / 1000.0;
  const bool ok = err.pass && err.threshold == 0.01 && atoms.pass && deep;
  return {ok, "max rel error at smallest r " + fmt("%.2e", err.observed) + " < 0.01, atoms increasing " +
                  (atoms.pass ? "yes" : "no")};
}

Outcome solver_oracle() {
  const SuiteReport r = solver_agreement(20, 50, 2024, 1e-4, 1e-9);
  const Assertion& v = named(r, "value_agreement");
  const Assertion& g = named(r, "simplex_gap");
  return {v.pass && g.pass && r.table.rows.size() == 20,
          "max |FP - LP| " + fmt("%.2e", v.observed) + " <= 1e-4, max simplex gap " + fmt("%.2e", g.observed) +
              " <= 1e-9"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path work = fs::path(POLAR_ACCEPT_WORKDIR) / "acceptance_runs";
  const fs::path configs = fs::path(POLAR_SOURCE_DIR) / "tools" / "configs";
  struct Job {
    std::string tag, args;
  };
  const Job jobs[] = {
      {"discrete", "solve-discrete --n 3 --config " + (configs / "circle.json").string()},
      {"continuous", "solve-continuous --config " + (configs / "circle.json").string()},
      {"verify", "verify --suite all --config " + (configs / "segment_gaussian.json").string()},
  };
  std::size_t compared = 0;
  std::string mismatch;
  for (const Job& job : jobs) {
    fs::path dirs[3];
    for (int k = 0; k < 3; ++k) {
      dirs[k] = work / (job.tag + "_" + std::to_string(k));
      fs::remove_all(dirs[k]);
      // The third rerun goes through a different worker count.
      const std::string cmd = std::string(POLARCTL) + " " + job.args + " --out " + dirs[k].string() +
                              (k == 2 ? " --threads 2" : "") + " >/dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) > 1) return {false, job.tag + " run failed: " + cmd};
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      if (entry.path().extension() != ".json") continue;
      const std::string ref = slurp(entry.path());
      for (int k = 1; k < 3; ++k) {
        // The config echo records the worker count, which run 2 changes.
        if (k == 2 && entry.path().filename() == "config.json") continue;
        ++compared;
        if (slurp(dirs[k] / entry.path().filename()) != ref) mismatch += job.tag + "/" + entry.path().filename().string() + " ";
      }
    }
  }
  return {mismatch.empty() && compared > 0,
          std::to_string(compared) + " JSON comparisons" + (mismatch.empty() ? ", all identical" : ", differ: " + mismatch)};
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "ball collapse", ball_collapse},
      {2, "circle continuous optimum", circle_optimum},
      {3, "discrete-to-continuous convergence on the circle", ohtsuka},
      {4, "polarization continuity on the circle", continuity},
      {5, "local ratio scan", ratio_scan},
      {6, "Lebesgue-point scan", lebesgue},
      {7, "fictitious play vs simplex", solver_oracle},
      {8, "byte-identical reruns", determinism},
  };
  int only = 0;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--criterion") only = std::atoi(argv[i + 1]);

  bool all_pass = true;
  for (const Criterion& c : all) {
    if (only && c.id != only) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
