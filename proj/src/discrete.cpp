#include "polar/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "polar/errors.hpp"
#include "polar/parallel.hpp"

namespace polar {

std::string_view to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::softmin_anneal: return "softmin_anneal";
    case SolverMethod::best_response: return "best_response";
    case SolverMethod::hybrid: return "hybrid";
  }
  return "hybrid";
}

SolverMethod solver_method_from_string(std::string_view name) {
  if (name == "softmin_anneal") return SolverMethod::softmin_anneal;
  if (name == "best_response") return SolverMethod::best_response;
  if (name == "hybrid") return SolverMethod::hybrid;
  throw ConfigError("unknown solver method: " + std::string(name));
}

void SolverConfig::validate() const {
  if (!(beta0 > 0.0 && beta0 < beta_end)) throw ConfigError("need 0 < beta0 < beta_end");
  if (stages < 1) throw ConfigError("stages must be at least 1");
  if (restarts < 1) throw ConfigError("restarts must be at least 1");
  if (!(fd_step > 0.0)) throw ConfigError("fd_step must be positive");
  if (inner_resolution == 1) throw ConfigError("inner_resolution must be 0 (auto) or at least 2");
}

std::size_t default_inner_resolution(const SetModel& set, std::size_t n) {
  switch (set.kind) {
    case SetKind::circle:
    case SetKind::segment:
    case SetKind::union_of: return std::max<std::size_t>(256, 32 * n);
    case SetKind::sphere2:
      return std::max<std::size_t>(24, static_cast<std::size_t>(std::ceil(6.0 * std::sqrt(n))));
    case SetKind::ball:
      if (set.dim == 1) return std::max<std::size_t>(256, 32 * n);
      return set.dim == 2 ? 24 : 6;
  }
  return 64;
}

InnerMin inner_min(const KernelSpec& kernel, const Configuration& config, const SetModel& set,
                   std::size_t resolution) {
  if (config.points.empty()) throw DomainError("inner_min needs at least one point");
  const PolarizationResult r = polarization(kernel, counting_measure(config), set, resolution, true);
  return {r.argmin, r.value};
}

namespace {

constexpr double kCoincidence = 1e-9;

// Potential contributions of each point at each evaluation node, kept so a
// single point can be moved in O(nodes).
class Evaluator {
 public:
  Evaluator(const KernelSpec& kernel, const SetModel& set, const Mesh& mesh)
      : kernel_(kernel), set_(set), mesh_(mesh) {
    const double total = mesh.total_weight();
    for (double w : mesh.weights) weights_.push_back(w / total);
  }

  void load(const std::vector<ChartPoint>& charts) {
    charts_ = charts;
    points_.clear();
    for (const ChartPoint& c : charts) points_.push_back(chart_to_point(set_, c));
    const std::size_t e = mesh_.size();
    f_.assign(points_.size() * e, 0.0);
    for (std::size_t i = 0; i < points_.size(); ++i) row(points_[i], &f_[i * e]);
    u_.assign(e, 0.0);
    for (std::size_t j = 0; j < e; ++j) u_[j] = column_sum(j, points_.size(), 0.0);
  }

  const std::vector<double>& field() const { return u_; }
  const std::vector<ChartPoint>& charts() const { return charts_; }
  const std::vector<Vec3>& points() const { return points_; }
  const Mesh& mesh() const { return mesh_; }

  // Field after moving point i to p, written into out.
  void trial(std::size_t i, Vec3 p, std::vector<double>& out) const {
    const std::size_t e = mesh_.size();
    scratch_.resize(e);
    row(p, scratch_.data());
    out.resize(e);
    const double* old = &f_[i * e];
    for (std::size_t j = 0; j < e; ++j) {
      if (std::isinf(u_[j]) || std::isinf(old[j]) || std::isinf(scratch_[j]))
        out[j] = column_sum(j, i, scratch_[j]);
      else
        out[j] = u_[j] - old[j] + scratch_[j];
    }
  }

  void commit(std::size_t i, const ChartPoint& c) {
    charts_[i] = c;
    points_[i] = chart_to_point(set_, c);
    const std::size_t e = mesh_.size();
    row(points_[i], &f_[i * e]);
    for (std::size_t j = 0; j < e; ++j) u_[j] = column_sum(j, points_.size(), 0.0);
  }

  // -(1/beta) log sum_j w_j exp(-beta U_j), skipping infinite nodes.
  double softmin(const std::vector<double>& u, double beta) const {
    const double m = finite_min(u);
    if (std::isinf(m)) return m;
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j)
      if (std::isfinite(u[j])) s += weights_[j] * std::exp(-beta * (u[j] - m));
    return m - std::log(s) / beta;
  }

  static double finite_min(const std::vector<double>& u) {
    double m = std::numeric_limits<double>::infinity();
    for (double v : u)
      if (v < m) m = v;
    return m;
  }

  static std::size_t argmin(const std::vector<double>& u) {
    std::size_t k = 0;
    for (std::size_t j = 1; j < u.size(); ++j)
      if (u[j] < u[k]) k = j;
    return k;
  }

 private:
  void row(Vec3 p, double* out) const {
    const double inv_n = 1.0 / static_cast<double>(points_.size());
    for (std::size_t j = 0; j < mesh_.size(); ++j) {
      const double t = distance(p, mesh_.nodes[j]);
      if (t <= kCoincidence && kernel_.unbounded())
        out[j] = std::numeric_limits<double>::infinity();
      else
        out[j] = inv_n * (t == 0.0 ? 1.0 : kernel_value(kernel_, t));
    }
  }

  // Column j with point `skip` replaced by `extra` (skip == N: nothing replaced).
  double column_sum(std::size_t j, std::size_t skip, double extra) const {
    const std::size_t e = mesh_.size();
    double s = extra;
    for (std::size_t k = 0; k < points_.size(); ++k)
      if (k != skip) s += f_[k * e + j];
    return s;
  }

  const KernelSpec& kernel_;
  const SetModel& set_;
  const Mesh& mesh_;
  std::vector<double> weights_;
  std::vector<ChartPoint> charts_;
  std::vector<Vec3> points_;
  std::vector<double> f_;
  std::vector<double> u_;
  mutable std::vector<double> scratch_;
};

int chart_dims(const SetModel& set, const ChartPoint& c) {
  return chart_component(set, c.component).chart_dim();
}

ChartPoint normalize_chart(const SetModel& set, const ChartPoint& c) {
  return canonical_chart(set, c);
}

std::vector<ChartPoint> initial_charts(const SetModel& set, std::size_t n, std::size_t restart,
                                       std::size_t restarts, std::mt19937_64& rng) {
  // Restart r draws a fraction r / (restarts - 1) of its points at random and
  // the rest from an evenly subsampled, randomly offset mesh.
  const std::size_t random_count =
      restarts <= 1 ? 0
                    : static_cast<std::size_t>(std::llround(static_cast<double>(n * restart) /
                                                            static_cast<double>(restarts - 1)));
  std::size_t res = 2;
  while (make_mesh(set, res, 0.0).size() < n) res *= 2;
  const Mesh mesh = make_mesh(set, res, uniform01(rng));
  std::vector<ChartPoint> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n - random_count; ++k) {
    const auto idx = static_cast<std::size_t>((static_cast<double>(k) + 0.5) *
                                              static_cast<double>(mesh.size()) /
                                              static_cast<double>(n));
    out.push_back(mesh.charts[std::min(idx, mesh.size() - 1)]);
  }
  while (out.size() < n) out.push_back(point_to_chart(set, random_point(set, rng)));
  return out;
}

// Random unit direction in a chart of the given dimension.
std::array<double, 3> random_direction(int dims, std::mt19937_64& rng) {
  std::array<double, 3> d{};
  if (dims == 1) {
    d[0] = uniform01(rng) < 0.5 ? -1.0 : 1.0;
  } else if (dims == 2) {
    const double a = 2.0 * M_PI * uniform01(rng);
    d[0] = std::cos(a);
    d[1] = std::sin(a);
  } else {
    const double z = 2.0 * uniform01(rng) - 1.0;
    const double a = 2.0 * M_PI * uniform01(rng);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    d = {rho * std::cos(a), rho * std::sin(a), z};
  }
  return d;
}

void anneal(Evaluator& ev, const SetModel& set, const SolverConfig& cfg, std::size_t restart,
            double& step, std::vector<TraceEntry>& trace) {
  const std::size_t n = ev.points().size();
  const double min_step = 1e-9 * set.diameter();
  const double max_step = 0.5 * set.diameter();
  std::vector<double> plus;
  std::vector<double> minus;
  std::vector<double> grad;
  for (std::size_t stage = 0; stage < cfg.stages; ++stage) {
    const double frac =
        cfg.stages == 1 ? 1.0 : static_cast<double>(stage) / static_cast<double>(cfg.stages - 1);
    const double beta = cfg.beta0 * std::pow(cfg.beta_end / cfg.beta0, frac);
    double current = ev.softmin(ev.field(), beta);
    step = std::max(step, 1e-4 * set.diameter());
    std::size_t accepted = 0;
    for (std::size_t it = 0; it < cfg.max_outer_iters && step > min_step; ++it) {
      grad.assign(3 * n, 0.0);
      double norm2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const ChartPoint base = ev.charts()[i];
        for (int k = 0; k < chart_dims(set, base); ++k) {
          ChartPoint a = base;
          ChartPoint b = base;
          a.u[static_cast<std::size_t>(k)] += cfg.fd_step;
          b.u[static_cast<std::size_t>(k)] -= cfg.fd_step;
          ev.trial(i, chart_to_point(set, a), plus);
          ev.trial(i, chart_to_point(set, b), minus);
          const double g = (ev.softmin(plus, beta) - ev.softmin(minus, beta)) / (2.0 * cfg.fd_step);
          if (std::isfinite(g)) {
            grad[3 * i + static_cast<std::size_t>(k)] = g;
            norm2 += g * g;
          }
        }
      }
      if (!(norm2 > 0.0)) break;
      const double scale = step / std::sqrt(norm2);
      std::vector<ChartPoint> moved = ev.charts();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < 3; ++k) moved[i].u[k] += scale * grad[3 * i + k];
        moved[i] = normalize_chart(set, moved[i]);
      }
      const std::vector<ChartPoint> before = ev.charts();
      ev.load(moved);
      const double candidate = ev.softmin(ev.field(), beta);
      if (candidate > current) {
        current = candidate;
        ++accepted;
        step = std::min(max_step, step * 1.5);
      } else {
        ev.load(before);
        step *= 0.5;
      }
    }
    trace.push_back({restart, "anneal", stage, beta, current, Evaluator::finite_min(ev.field()),
                     step, accepted});
  }
}

void best_response(Evaluator& ev, const SetModel& set, const SolverConfig& cfg,
                   std::size_t restart, double step, std::mt19937_64& rng,
                   std::vector<TraceEntry>& trace) {
  const std::size_t n = ev.points().size();
  const double min_step = 1e-9 * set.diameter();
  const double max_step = 0.5 * set.diameter();
  double rho = std::clamp(step, 1e-3 * set.diameter(), max_step);
  double current = Evaluator::finite_min(ev.field());
  std::vector<double> trial;
  for (std::size_t round = 0; round < cfg.max_outer_iters && rho > min_step; ++round) {
    std::size_t accepted = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 worst = ev.mesh().nodes[Evaluator::argmin(ev.field())];
      const Vec3 x = ev.points()[i];
      const ChartPoint base = ev.charts()[i];
      std::vector<ChartPoint> proposals;
      const double gap = distance(worst, x);
      if (gap > 0.0) {
        const Vec3 toward = x + (std::min(rho, gap) / gap) * (worst - x);
        proposals.push_back(point_to_chart(set, toward));
      }
      const auto dir = random_direction(chart_dims(set, base), rng);
      ChartPoint r = base;
      for (std::size_t k = 0; k < 3; ++k) r.u[k] += rho * dir[k];
      proposals.push_back(normalize_chart(set, r));
      for (const ChartPoint& c : proposals) {
        ev.trial(i, chart_to_point(set, c), trial);
        const double m = Evaluator::finite_min(trial);
        if (m > current) {
          current = m;
          ev.commit(i, c);
          ++accepted;
          break;
        }
      }
    }
    rho = accepted ? std::min(max_step, rho * 1.2) : rho * 0.5;
    trace.push_back({restart, "best_response", round, 0.0, current, current, rho, accepted});
  }
}

Configuration to_configuration(const Evaluator& ev) { return Configuration{ev.points()}; }

double certify(const KernelSpec& kernel, const Configuration& c, const SetModel& set,
               std::size_t resolution) {
  return inner_min(kernel, c, set, 4 * resolution).value.to_double();
}

}  // namespace

SolveReport solve_discrete(const KernelSpec& kernel, const SetModel& set, std::size_t n,
                           const SolverConfig& cfg) {
  if (n < 1) throw DomainError("solve_discrete needs N >= 1");
  cfg.validate();
  const std::size_t res =
      cfg.inner_resolution ? cfg.inner_resolution : default_inner_resolution(set, n);
  const Mesh mesh = make_mesh(set, res, 0.0);

  std::vector<RestartResult> results(cfg.restarts);
  parallel_for(cfg.restarts, cfg.threads, [&](std::size_t r) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed & 0xffffffffu),
                      static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    Evaluator ev(kernel, set, mesh);
    ev.load(initial_charts(set, n, r, cfg.restarts, rng));
    RestartResult& out = results[r];
    const Configuration start = to_configuration(ev);
    out.initial_value = certify(kernel, start, set, res);
    double step = 0.1 * set.diameter();
    if (cfg.method != SolverMethod::best_response) anneal(ev, set, cfg, r, step, out.trace);
    if (cfg.method != SolverMethod::softmin_anneal)
      best_response(ev, set, cfg, r, cfg.method == SolverMethod::hybrid ? step : 0.1 * set.diameter(),
                    rng, out.trace);
    out.config = to_configuration(ev);
    out.value = certify(kernel, out.config, set, res);
    if (out.value < out.initial_value) {
      // Keep the starting configuration when optimization lost ground.
      out.regressed = out.value < out.initial_value - 1e-9 * std::abs(out.initial_value);
      out.config = start;
      out.value = out.initial_value;
    }
  });

  SolveReport report;
  report.inner_resolution = res;
  for (std::size_t r = 0; r < results.size(); ++r) {
    report.restart_values.push_back(results[r].value);
    report.restart_initial_values.push_back(results[r].initial_value);
    if (r == 0 || results[r].value > results[report.best_restart].value) report.best_restart = r;
    report.trace.insert(report.trace.end(), results[r].trace.begin(), results[r].trace.end());
  }
  const RestartResult& best = results[report.best_restart];
  report.best_config = best.config;
  const InnerMin fine = inner_min(kernel, best.config, set, 4 * res);
  const InnerMin coarse = inner_min(kernel, best.config, set, res);
  report.value = fine.value.to_double();
  report.worst_point = fine.point;
  report.coarse_value = coarse.value.to_double();
  report.recertification_shift =
      std::abs(report.value - report.coarse_value) / std::max(std::abs(report.value), 1e-300);
  report.stalled = best.regressed;

  if (n >= 2) {
    Vec3 centroid;
    for (const Vec3& p : best.config.points) centroid = centroid + p;
    centroid = (1.0 / static_cast<double>(n)) * centroid;
    report.collapse_detected = std::all_of(best.config.points.begin(), best.config.points.end(),
                                           [&](Vec3 p) { return distance(p, centroid) <= 0.05; });
  }
  return report;
}

nlohmann::json to_json(const SolverConfig& cfg) {
  return {{"method", to_string(cfg.method)},
          {"beta0", cfg.beta0},
          {"beta_end", cfg.beta_end},
          {"stages", cfg.stages},
          {"restarts", cfg.restarts},
          {"seed", cfg.seed},
          {"inner_resolution", cfg.inner_resolution},
          {"max_outer_iters", cfg.max_outer_iters},
          {"fd_step", cfg.fd_step}};
}

nlohmann::json to_json(const SolveReport& r, int ambient_dim) {
  nlohmann::json points = nlohmann::json::array();
  for (const Vec3& p : r.best_config.points) points.push_back(point_json(p, ambient_dim));
  nlohmann::json trace = nlohmann::json::array();
  for (const TraceEntry& t : r.trace)
    trace.push_back({{"restart", t.restart},
                     {"phase", t.phase},
                     {"stage", t.stage},
                     {"beta", t.beta},
                     {"smoothed", t.smoothed},
                     {"mesh_min", t.mesh_min},
                     {"step", t.step},
                     {"accepted", t.accepted}});
  return {{"value", r.value},
          {"coarse_value", r.coarse_value},
          {"recertification_shift", r.recertification_shift},
          {"worst_point", point_json(r.worst_point, ambient_dim)},
          {"best_config", points},
          {"best_restart", r.best_restart},
          {"restart_values", r.restart_values},
          {"restart_initial_values", r.restart_initial_values},
          {"stalled", r.stalled},
          {"collapse_detected", r.collapse_detected},
          {"inner_resolution", r.inner_resolution},
          {"trace", trace}};
}

}  // namespace polar
