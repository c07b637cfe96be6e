#include "polar/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "polar/errors.hpp"
#include "polar/parallel.hpp"
#include "polar/potentials.hpp"

namespace polar {

namespace {

nlohmann::json cell(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

nlohmann::json cell(const Extended& v) { return v.is_infinite() ? nlohmann::json("inf") : nlohmann::json(v.value()); }

Assertion at_most(std::string name, double observed, double threshold, std::string detail = {}) {
  return {std::move(name), observed <= threshold, observed, threshold, std::move(detail)};
}

double relative(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

std::vector<double> Table::column(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw DomainError("no such column: " + std::string(name));
  const auto k = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  for (const auto& r : rows)
    out.push_back(r[k].is_number() ? r[k].get<double>() : std::numeric_limits<double>::infinity());
  return out;
}

std::string Table::to_csv() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < columns.size(); ++k) os << (k ? "," : "") << columns[k];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k) os << ',';
      if (r[k].is_string())
        os << r[k].get<std::string>();
      else
        os << r[k].dump();
    }
    os << '\n';
  }
  return os.str();
}

bool SuiteReport::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
}

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json as = nlohmann::json::array();
  for (const Assertion& a : assertions)
    as.push_back({{"name", a.name},
                  {"pass", a.pass},
                  {"observed", cell(a.observed)},
                  {"threshold", cell(a.threshold)},
                  {"detail", a.detail}});
  return {{"suite", suite},
          {"passed", passed()},
          {"assertions", as},
          {"table", {{"columns", table.columns}, {"rows", table.rows}}},
          {"info", info}};
}

nlohmann::json to_json(const Tolerances& t) {
  return {{"ohtsuka_gap", t.ohtsuka_gap},         {"continuity", t.continuity},
          {"limit_discrepancy", t.limit_discrepancy}, {"limit_gap", t.limit_gap},
          {"ratio_stability", t.ratio_stability}, {"case1_slack", t.case1_slack},
          {"lebesgue_error", t.lebesgue_error},   {"min_principle", t.min_principle},
          {"certify_slack", t.certify_slack},     {"trend_slack", t.trend_slack}};
}

std::size_t default_game_resolution(const SetModel& set) {
  switch (set.kind) {
    case SetKind::circle: return 256;
    case SetKind::segment: return 128;
    case SetKind::sphere2: return 12;
    case SetKind::union_of: return 64;
    case SetKind::ball: return set.dim == 1 ? 128 : (set.dim == 2 ? 16 : 6);
  }
  return 64;
}

// ---------------------------------------------------------------------------
// Ohtsuka sweep and limit measures

namespace {

struct DiscreteRun {
  std::size_t n = 0;
  SolveReport report;
};

std::vector<DiscreteRun> run_sweep(const KernelSpec& kernel, const SetModel& set,
                                   const SweepConfig& cfg) {
  if (cfg.n_list.empty()) throw ConfigError("N list must be nonempty");
  if (!std::is_sorted(cfg.n_list.begin(), cfg.n_list.end()))
    throw ConfigError("N list must be ascending");
  std::vector<DiscreteRun> runs(cfg.n_list.size());
  for (std::size_t k = 0; k < runs.size(); ++k) {
    runs[k].n = cfg.n_list[k];
    runs[k].report = solve_discrete(kernel, set, cfg.n_list[k], cfg.solver);
  }
  return runs;
}

Assertion weak_duality(const ContinuousResult& c, const GameConfig& game, const Tolerances& tol) {
  const double slack = game.gap_tol + tol.certify_slack * std::abs(c.t_estimate);
  Assertion a;
  a.name = "continuous_certificate";
  a.observed = c.t_estimate - c.certified;
  a.threshold = slack;
  a.pass = c.certified >= c.t_estimate - slack;
  a.detail = "certified fine-mesh P of the returned measure >= T_hat - (gap_tol + slack)";
  return a;
}

}  // namespace

SuiteReport ohtsuka_sweep(const KernelSpec& kernel, const SetModel& set, const SweepConfig& cfg) {
  const std::size_t res = cfg.game_resolution ? cfg.game_resolution : default_game_resolution(set);
  const ContinuousResult cont = continuous_polarization(kernel, set, res, cfg.game);
  const auto runs = run_sweep(kernel, set, cfg);

  SuiteReport rep;
  rep.suite = "ohtsuka";
  rep.table.columns = {"N", "P_hat", "T_hat", "gap"};
  for (const auto& r : runs)
    rep.table.rows.push_back({r.n, cell(r.report.value), cell(cont.t_estimate),
                              cell(relative(r.report.value, cont.t_estimate))});
  const auto gaps = rep.table.column("gap");
  rep.assertions.push_back(at_most("gap_trend", gaps.back(), gaps.front() + cfg.tol.trend_slack,
                                   "gap at the largest N <= gap at the smallest N"));
  rep.assertions.push_back(at_most("final_gap", gaps.back(), cfg.tol.ohtsuka_gap,
                                   "relative |P_hat - T_hat| / T_hat at the largest N"));
  rep.assertions.push_back(weak_duality(cont, cfg.game, cfg.tol));
  rep.info = {{"game_resolution", res},
              {"T_hat", cont.t_estimate},
              {"certified", cont.certified},
              {"game", to_json(cont.game)},
              {"support_size", cont.support_size}};
  return rep;
}

SuiteReport limit_measure_check(const KernelSpec& kernel, const SetModel& set,
                                const SweepConfig& cfg) {
  const std::size_t res = cfg.game_resolution ? cfg.game_resolution : default_game_resolution(set);
  const ContinuousResult cont = continuous_polarization(kernel, set, res, cfg.game);
  const ContinuousResult coarse =
      continuous_polarization(kernel, set, std::max<std::size_t>(2, res / 2), cfg.game);
  const std::size_t degree = default_family_degree(set);
  const double optimum_spread = weak_star_discrepancy(cont.smeared, coarse.smeared, set, degree);
  const bool non_unique = optimum_spread > cfg.tol.limit_discrepancy;
  const auto runs = run_sweep(kernel, set, cfg);

  SuiteReport rep;
  rep.suite = "limit_measure";
  rep.table.columns = {"N", "P_hat", "discrepancy", "gap"};
  for (const auto& r : runs) {
    const DiscreteMeasure nu = counting_measure(r.report.best_config);
    rep.table.rows.push_back({r.n, cell(r.report.value),
                              cell(weak_star_discrepancy(nu, cont.smeared, set, degree)),
                              cell(relative(r.report.value, cont.t_estimate))});
  }
  const auto disc = rep.table.column("discrepancy");
  const auto gaps = rep.table.column("gap");
  if (runs.size() >= 2) {
    Assertion shrink = at_most("discrepancy_shrinks", disc.back(), disc.front() + cfg.tol.trend_slack);
    Assertion final_disc = at_most("final_discrepancy", disc.back(), cfg.tol.limit_discrepancy);
    if (non_unique) {
      shrink.detail = final_disc.detail = "continuous optimum flagged non-unique; not enforced";
      shrink.pass = final_disc.pass = true;
    }
    rep.assertions.push_back(shrink);
    rep.assertions.push_back(final_disc);
    rep.assertions.push_back(at_most("gap_shrinks", gaps.back(), gaps.front() + cfg.tol.trend_slack));
    rep.assertions.push_back(at_most("final_gap", gaps.back(), cfg.tol.limit_gap));
  }
  rep.info = {{"game_resolution", res},
              {"T_hat", cont.t_estimate},
              {"family_degree", degree},
              {"optimum_spread", optimum_spread},
              {"non_unique", non_unique}};
  return rep;
}

// ---------------------------------------------------------------------------
// Continuity

std::string_view to_string(ApproxScheme s) {
  switch (s) {
    case ApproxScheme::quasi_uniform: return "quasi_uniform";
    case ApproxScheme::constant: return "constant";
    case ApproxScheme::dyadic_midpoint: return "dyadic_midpoint";
  }
  return "quasi_uniform";
}

ApproxScheme approx_scheme_from_string(std::string_view name) {
  if (name == "quasi_uniform") return ApproxScheme::quasi_uniform;
  if (name == "constant") return ApproxScheme::constant;
  if (name == "dyadic_midpoint") return ApproxScheme::dyadic_midpoint;
  throw ConfigError("unknown approximation scheme: " + std::string(name));
}

Assertion minimum_principle_shadow(const KernelSpec& kernel, const DiscreteMeasure& mu,
                                   const SetModel& set, std::size_t resolution, double tol) {
  Extended a = polarization(kernel, mu, set, resolution, false).value;
  Extended b = polarization(kernel, mu, set, 4 * resolution, false).value;
  for (const Vec3& e : interval_endpoints(set)) {
    const Extended u = potential(kernel, mu, e);
    a = min(a, u);
    b = min(b, u);
  }
  Assertion out;
  out.name = "minimum_principle";
  out.threshold = tol;
  if (a.is_infinite() || b.is_infinite()) {
    out.observed = std::numeric_limits<double>::infinity();
    out.pass = false;
    out.detail = "mesh minimum infinite";
    return out;
  }
  out.observed = relative(a.value(), b.value());
  out.pass = out.observed <= tol;
  return out;
}

namespace {

// Evaluation resolution that resolves the gaps between n atoms.
std::size_t eval_resolution(const SetModel& set, std::size_t atoms) {
  if (set.chart_dim() == 1) return std::max<std::size_t>(512, 8 * atoms);
  return std::max<std::size_t>(32, 4 * static_cast<std::size_t>(std::ceil(std::sqrt(atoms))));
}

DiscreteMeasure scheme_measure(const SetModel& set, ApproxScheme scheme, std::size_t n) {
  // Quasi-uniform: the offset-0 mesh. Dyadic midpoint: the offset-1/2 mesh,
  // i.e. cell midpoints of a dyadic subdivision when n is a power of two.
  const double offset = scheme == ApproxScheme::dyadic_midpoint ? 0.5 : 0.0;
  return mesh_measure(make_mesh(set, std::max<std::size_t>(2, n), offset));
}

}  // namespace

SuiteReport continuity_check(const KernelSpec& kernel, const SetModel& set,
                             const ContinuityConfig& cfg) {
  if (cfg.n_list.empty()) throw ConfigError("N list must be nonempty");
  SuiteReport rep;
  rep.suite = "continuity";
  rep.table.columns = {"N", "P_nu_N", "P_nu", "abs_diff", "rel_diff", "discrepancy"};

  double p_limit = 0.0;
  DiscreteMeasure reference;
  if (cfg.scheme == ApproxScheme::constant) {
    reference = scheme_measure(set, ApproxScheme::quasi_uniform, cfg.n_list.back());
    p_limit = polarization(kernel, reference, set, eval_resolution(set, reference.size()), true)
                  .value.to_double();
  } else {
    reference = mesh_measure(make_mesh(set, cfg.reference_resolution, 0.5));
    const std::size_t q = cfg.quadrature_resolution;
    const std::size_t res = set.chart_dim() == 1 ? 64 : 12;
    p_limit = minimize_over_set(set, res, true, [&](Vec3 y) {
                return Extended(hausdorff_potential(kernel, set, y, q));
              }).value.to_double();
  }

  const std::size_t degree = default_family_degree(set);
  std::vector<Assertion> shadows;
  for (std::size_t n : cfg.n_list) {
    const DiscreteMeasure nu =
        cfg.scheme == ApproxScheme::constant ? reference : scheme_measure(set, cfg.scheme, n);
    const std::size_t res = eval_resolution(set, nu.size());
    const double p = polarization(kernel, nu, set, res, true).value.to_double();
    rep.table.rows.push_back({n, cell(p), cell(p_limit), cell(std::abs(p - p_limit)),
                              cell(relative(p, p_limit)),
                              cell(weak_star_discrepancy(nu, reference, set, degree))});
    Assertion s = minimum_principle_shadow(kernel, nu, set, res, cfg.tol.min_principle);
    s.name = "minimum_principle_N" + std::to_string(n);
    shadows.push_back(s);
  }
  const auto rel = rep.table.column("rel_diff");
  const auto disc = rep.table.column("discrepancy");
  rep.assertions.push_back(at_most("final_difference", rel.back(), cfg.tol.continuity,
                                   "relative |P(nu_N) - P(nu)| at the largest N"));
  rep.assertions.push_back(at_most("difference_decreases", rel.back(), rel.front() + cfg.tol.trend_slack));
  rep.assertions.push_back(
      at_most("discrepancy_decreases", disc.back(), disc.front() + cfg.tol.trend_slack));
  rep.assertions.insert(rep.assertions.end(), shadows.begin(), shadows.end());
  rep.info = {{"scheme", to_string(cfg.scheme)},
              {"P_nu", p_limit},
              {"family_degree", degree},
              {"quadrature_resolution", cfg.quadrature_resolution}};
  return rep;
}

// ---------------------------------------------------------------------------
// Ratio scan

namespace {

// A point of the set at ambient distance `dist` from y, or nothing if the
// sampled direction leaves the set.
std::optional<Vec3> point_at_distance(const SetModel& set, Vec3 y, double dist, double u1,
                                      double u2) {
  const int comp = component_of(set, y);
  const SetModel& s = chart_component(set, comp);
  switch (s.kind) {
    case SetKind::circle: {
      if (dist > 2.0 * s.radius) return std::nullopt;
      ChartPoint c = point_to_chart(set, y);
      const double delta = 2.0 * std::asin(dist / (2.0 * s.radius));
      c.u[0] += u1 < 0.5 ? delta : -delta;
      return chart_to_point(set, c);
    }
    case SetKind::sphere2: {
      if (dist > 2.0 * s.radius) return std::nullopt;
      const Vec3 n = (1.0 / s.radius) * (y - s.center);
      const Vec3 helper = std::abs(n.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
      Vec3 e1 = cross(n, helper);
      e1 = (1.0 / norm(e1)) * e1;
      const Vec3 e2 = cross(n, e1);
      const double alpha = 2.0 * std::asin(dist / (2.0 * s.radius));
      const double phi = 2.0 * M_PI * u1;
      return s.center + s.radius * (std::cos(alpha) * n +
                                    std::sin(alpha) * (std::cos(phi) * e1 + std::sin(phi) * e2));
    }
    case SetKind::segment:
    case SetKind::ball: {
      const int dim = s.kind == SetKind::segment ? 1 : s.dim;
      Vec3 dir;
      if (dim == 1) {
        dir = {u1 < 0.5 ? 1.0 : -1.0, 0, 0};
      } else if (dim == 2) {
        dir = {std::cos(2 * M_PI * u1), std::sin(2 * M_PI * u1), 0};
      } else {
        const double z = 2 * u2 - 1;
        const double rho = std::sqrt(std::max(0.0, 1 - z * z));
        dir = {rho * std::cos(2 * M_PI * u1), rho * std::sin(2 * M_PI * u1), z};
      }
      for (double sign : {1.0, -1.0}) {
        const Vec3 x = y + (sign * dist) * dir;
        if (distance(project(s, x).point, x) <= 1e-12 * s.scale()) return x;
      }
      return std::nullopt;
    }
    case SetKind::union_of: break;
  }
  return std::nullopt;
}

// For sets with a boundary (segment, ball): the point at distance zeta from
// the boundary along the sampled direction. Placing y at a multiple of r
// keeps the boundary geometry identical across radii.
std::optional<Vec3> near_boundary(const SetModel& set, double zeta, double u1, double u2,
                                  double u3) {
  const SetModel* s = &set;
  if (set.kind == SetKind::union_of) {
    const auto k = static_cast<std::size_t>(u3 * static_cast<double>(set.components.size()));
    s = &set.components[std::min(k, set.components.size() - 1)];
  }
  if (s->kind == SetKind::segment) {
    if (zeta > s->hi - s->lo) return std::nullopt;
    const double x = u1 < 0.5 ? s->lo + zeta : s->hi - zeta;
    return s->center + Vec3{x, 0.0, 0.0};
  }
  if (s->kind == SetKind::ball) {
    if (zeta > s->radius) return std::nullopt;
    Vec3 dir;
    if (s->dim == 1) {
      dir = {u1 < 0.5 ? 1.0 : -1.0, 0, 0};
    } else if (s->dim == 2) {
      dir = {std::cos(2 * M_PI * u1), std::sin(2 * M_PI * u1), 0};
    } else {
      const double z = 2 * u2 - 1;
      const double rho = std::sqrt(std::max(0.0, 1 - z * z));
      dir = {rho * std::cos(2 * M_PI * u1), rho * std::sin(2 * M_PI * u1), z};
    }
    return s->center + (s->radius - zeta) * dir;
  }
  return std::nullopt;
}

bool has_boundary(const SetModel& set) {
  if (set.kind == SetKind::union_of)
    return std::any_of(set.components.begin(), set.components.end(), has_boundary);
  return set.kind == SetKind::segment || set.kind == SetKind::ball;
}

}  // namespace

SuiteReport ratio_bound_scan(const KernelSpec& kernel, const SetModel& set,
                             const RatioScanConfig& cfg) {
  const double diam = set.diameter();
  std::vector<double> radii = cfg.radii;
  if (radii.empty())
    for (double f : {11.0, 33.0, 100.0, 333.0, 1000.0}) radii.push_back(diam / f);
  for (double r : radii)
    if (!(r > 0.0 && r < diam / 10.0)) throw ConfigError("ratio scan radii must lie in (0, diam/10)");
  const double d = set.hausdorff_dim();
  const RieszLikeWitness w = default_witness(kernel, d, diam);
  const double case1_bound = std::pow(2.0, d - w.epsilon);

  // Half of the samples sit at zeta * r from the boundary when there is one,
  // zeta uniform in [0, 2]; the rest are uniform on the set.
  struct Sample {
    Vec3 y;
    bool boundary;
    double zeta;
    double kappa;
    double u1, u2, u3, u4, u5;
  };
  const std::size_t per_radius = std::max<std::size_t>(1, cfg.samples / radii.size());
  const bool boundary = has_boundary(set);
  std::mt19937_64 rng(cfg.seed);
  std::vector<Sample> samples;
  for (std::size_t k = 0; k < per_radius; ++k) {
    Sample smp{};
    smp.y = random_point(set, rng);
    smp.boundary = boundary && k % 2 == 1;
    smp.zeta = 2.0 * uniform01(rng);
    smp.kappa = cfg.max_kappa * (1.0 - uniform01(rng));  // (0, max_kappa]
    smp.u1 = uniform01(rng);
    smp.u2 = uniform01(rng);
    smp.u3 = uniform01(rng);
    smp.u4 = uniform01(rng);
    smp.u5 = uniform01(rng);
    samples.push_back(smp);
  }

  SuiteReport rep;
  rep.suite = "ratio_bound";
  rep.table.columns = {"r", "samples", "max_ratio", "case1_count", "case1_max"};
  double c0 = 0.0;
  double worst_case1 = 0.0;
  std::vector<double> maxima;
  for (double r : radii) {
    std::vector<double> ratio(samples.size(), -1.0);
    std::vector<char> case1(samples.size(), 0);
    parallel_for(samples.size(), 0, [&](std::size_t k) {
      const Sample& s = samples[k];
      Vec3 y = s.y;
      if (s.boundary) {
        const auto b = near_boundary(set, s.zeta * r, s.u3, s.u4, s.u5);
        if (!b) return;
        y = *b;
      }
      const auto x = point_at_distance(set, y, s.kappa * r, s.u1, s.u2);
      if (!x) return;
      const double dxy = distance(*x, y);
      if (!(dxy > 0.0)) return;
      ratio[k] = lemma_ratio(kernel, set, *x, y, r, cfg.local_resolution);
      case1[k] = dxy > 2.0 * r && dxy <= w.t_eps;
    });
    double m = 0.0;
    double m1 = 0.0;
    std::size_t used = 0;
    std::size_t n1 = 0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
      if (ratio[k] < 0.0) continue;
      ++used;
      m = std::max(m, ratio[k]);
      if (case1[k]) {
        ++n1;
        m1 = std::max(m1, ratio[k]);
      }
    }
    maxima.push_back(m);
    c0 = std::max(c0, m);
    worst_case1 = std::max(worst_case1, m1);
    rep.table.rows.push_back({cell(r), used, cell(m), n1, cell(m1)});
  }
  const double lo = *std::min_element(maxima.begin(), maxima.end());
  const double hi = *std::max_element(maxima.begin(), maxima.end());
  rep.assertions.push_back(at_most("ratio_stability", hi / lo - 1.0, cfg.tol.ratio_stability,
                                   "spread of per-radius maxima across the radius range"));
  rep.assertions.push_back(at_most("case1_bound", worst_case1, case1_bound + cfg.tol.case1_slack,
                                   "Case-1 ratios against 2^(d - eps)"));
  rep.assertions.push_back({"c0_finite", std::isfinite(c0), c0, std::numeric_limits<double>::infinity(), ""});
  rep.info = {{"C0_est", c0},
              {"d", d},
              {"epsilon", w.epsilon},
              {"t_eps", w.t_eps},
              {"case1_bound", case1_bound},
              {"samples_per_radius", per_radius}};
  return rep;
}

// ---------------------------------------------------------------------------
// Lebesgue points

DiscreteMeasure lebesgue_default_measure(const SetModel& set, std::size_t atoms) {
  Configuration c{make_mesh(set, atoms, 0.0).nodes};
  return counting_measure(c);
}

SuiteReport lebesgue_point_scan(const KernelSpec& kernel, const SetModel& set,
                                const DiscreteMeasure& mu, const LebesgueConfig& cfg) {
  const double diam = set.diameter();
  std::vector<double> radii = cfg.radii;
  if (radii.empty()) {
    // Start below half the closest atom spacing so each ball around an atom
    // holds only that atom.
    double spacing = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mu.size(); ++i)
      for (std::size_t j = i + 1; j < mu.size(); ++j)
        spacing = std::min(spacing, distance(mu.atoms[i], mu.atoms[j]));
    for (double r = std::min(diam / 10.0, 0.5 * spacing);; r *= 0.5) {
      radii.push_back(r);
      if (r <= diam / 1000.0) break;
    }
  }
  for (std::size_t k = 1; k < radii.size(); ++k)
    if (!(radii[k] < radii[k - 1])) throw ConfigError("Lebesgue radii must decrease");
  const double r_min = radii.back();

  struct TestPoint {
    Vec3 y;
    bool atom;
  };
  std::vector<TestPoint> pts;
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t guard = 0; pts.size() < cfg.points && guard < 100 * cfg.points + 100; ++guard) {
    const Vec3 y = random_point(set, rng);
    double nearest = std::numeric_limits<double>::infinity();
    for (const Vec3& a : mu.atoms) nearest = std::min(nearest, distance(a, y));
    if (nearest >= 10.0 * r_min) pts.push_back({y, false});
  }
  for (std::size_t k = 0; k < std::min(cfg.atom_points, mu.size()); ++k)
    pts.push_back({mu.atoms[k * mu.size() / std::max<std::size_t>(1, cfg.atom_points)], true});

  SuiteReport rep;
  rep.suite = "lebesgue";
  rep.table.columns = {"point", "kind", "r", "Phi", "U", "rel_error"};
  std::vector<std::vector<Extended>> phi(pts.size(), std::vector<Extended>(radii.size()));
  parallel_for(pts.size() * radii.size(), 0, [&](std::size_t idx) {
    const std::size_t p = idx / radii.size();
    const std::size_t k = idx % radii.size();
    phi[p][k] = lebesgue_average(kernel, mu, set, pts[p].y, radii[k], cfg.local_resolution);
  });

  double worst_error = 0.0;
  std::size_t finite_points = 0;
  bool atoms_increase = true;
  std::size_t infinite_atoms = 0;
  for (std::size_t p = 0; p < pts.size(); ++p) {
    const Extended u = potential(kernel, mu, pts[p].y);
    for (std::size_t k = 0; k < radii.size(); ++k) {
      double err = std::numeric_limits<double>::infinity();
      if (u.is_finite() && phi[p][k].is_finite()) err = std::abs(phi[p][k].value() - u.value()) / u.value();
      rep.table.rows.push_back({p, pts[p].atom ? "atom" : "regular", cell(radii[k]), cell(phi[p][k]),
                                cell(u), u.is_finite() ? cell(err) : nlohmann::json("inf")});
    }
    if (u.is_finite()) {
      ++finite_points;
      const Extended& last = phi[p].back();
      const double err = last.is_finite() ? std::abs(last.value() - u.value()) / u.value()
                                          : std::numeric_limits<double>::infinity();
      worst_error = std::max(worst_error, err);
    } else {
      ++infinite_atoms;
      for (std::size_t k = 1; k < radii.size(); ++k)
        if (!(phi[p][k - 1] < phi[p][k])) atoms_increase = false;
    }
  }
  if (finite_points)
    rep.assertions.push_back(at_most("error_at_smallest_radius", worst_error, cfg.tol.lebesgue_error,
                                     "max relative |Phi_r - U| / U at finite-potential points"));
  if (infinite_atoms)
    rep.assertions.push_back({"atoms_increasing", atoms_increase, atoms_increase ? 1.0 : 0.0, 1.0,
                              "Phi strictly increases as r shrinks at atoms"});
  rep.info = {{"radii", radii},
              {"finite_points", finite_points},
              {"infinite_atoms", infinite_atoms},
              {"atoms", mu.size()}};
  return rep;
}

// ---------------------------------------------------------------------------
// Solver cross-check

SuiteReport solver_agreement(std::size_t count, std::size_t max_dim, std::uint64_t seed,
                             double value_tol, double lp_gap_tol) {
  SuiteReport rep;
  rep.suite = "solver_agreement";
  rep.table.columns = {"index", "rows", "cols", "fp_value", "lp_value", "diff", "lp_gap"};
  std::mt19937_64 rng(seed);
  double worst_diff = 0.0;
  double worst_gap = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t lo = 2;
    const std::size_t rows =
        count <= 1 ? max_dim : lo + (max_dim - lo) * k / (count - 1);
    const std::size_t cols = std::max<std::size_t>(lo, rows - (k % 3));
    std::vector<std::vector<double>> entries(rows, std::vector<double>(cols));
    for (auto& r : entries)
      for (double& v : r) v = 0.05 + uniform01(rng);
    const PayoffMatrix m = PayoffMatrix::from_rows(entries);
    const GameSolution fp = fictitious_play(m, 50'000'000, value_tol);
    const GameSolution lp = lp_exact_small(m);
    const double diff = std::abs(fp.value - lp.value);
    worst_diff = std::max(worst_diff, diff);
    worst_gap = std::max(worst_gap, lp.duality_gap);
    rep.table.rows.push_back({k, rows, cols, cell(fp.value), cell(lp.value), cell(diff),
                              cell(lp.duality_gap)});
  }
  rep.assertions.push_back(at_most("value_agreement", worst_diff, value_tol));
  rep.assertions.push_back(at_most("simplex_gap", worst_gap, lp_gap_tol));
  return rep;
}

// ---------------------------------------------------------------------------
// SVG

std::string svg_loglog(const Table& t, std::string_view x, const std::vector<std::string>& ys,
                       std::string_view title) {
  constexpr double W = 640;
  constexpr double H = 420;
  constexpr double M = 60;
  const auto xs = t.column(x);
  std::vector<std::vector<double>> series;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (double v : xs)
    if (v > 0 && std::isfinite(v)) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
  for (const auto& name : ys) {
    series.push_back(t.column(name));
    for (double v : series.back())
      if (v > 0 && std::isfinite(v)) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
  }
  if (!(xmax > xmin)) xmax = xmin * 10, xmin = xmin / 10;
  if (!(ymax > ymin)) ymax = ymin * 10, ymin = ymin / 10;
  const double lx0 = std::log10(xmin), lx1 = std::log10(xmax);
  const double ly0 = std::log10(ymin), ly1 = std::log10(ymax);
  auto px = [&](double v) { return M + (std::log10(v) - lx0) / (lx1 - lx0) * (W - 2 * M); };
  auto py = [&](double v) { return H - M - (std::log10(v) - ly0) / (ly1 - ly0) * (H - 2 * M); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ostringstream os;
  char buf[128];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\">"
     << title << "</text>\n";
  os << "<line x1=\"" << M << "\" y1=\"" << H - M << "\" x2=\"" << W - M << "\" y2=\"" << H - M
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << M << "\" y1=\"" << M << "\" x2=\"" << M << "\" y2=\"" << H - M
     << "\" stroke=\"black\"/>\n";
  std::snprintf(buf, sizeof buf, "%.3g", xmin);
  os << "<text x=\"" << M << "\" y=\"" << H - M + 18 << "\" font-size=\"11\">" << buf << "</text>\n";
  std::snprintf(buf, sizeof buf, "%.3g", xmax);
  os << "<text x=\"" << W - M << "\" y=\"" << H - M + 18 << "\" font-size=\"11\" text-anchor=\"end\">"
     << buf << "</text>\n";
  std::snprintf(buf, sizeof buf, "%.3g", ymin);
  os << "<text x=\"" << M - 4 << "\" y=\"" << H - M << "\" font-size=\"11\" text-anchor=\"end\">" << buf
     << "</text>\n";
  std::snprintf(buf, sizeof buf, "%.3g", ymax);
  os << "<text x=\"" << M - 4 << "\" y=\"" << M + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << buf
     << "</text>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\" font-size=\"12\">" << x
     << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    os << "<polyline fill=\"none\" stroke=\"" << colors[s % 5] << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (!(xs[k] > 0 && series[s][k] > 0 && std::isfinite(series[s][k]))) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(xs[k]), py(series[s][k]));
      os << buf;
    }
    os << "\"/>\n";
    os << "<text x=\"" << W - M + 4 << "\" y=\"" << M + 16 * s << "\" font-size=\"12\" fill=\""
       << colors[s % 5] << "\">" << ys[s] << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace polar
