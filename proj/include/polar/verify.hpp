#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "polar/discrete.hpp"
#include "polar/game.hpp"
#include "polar/geometry.hpp"
#include "polar/kernels.hpp"
#include "polar/measures.hpp"

namespace polar {

struct Assertion {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// Rectangular table; cells are numbers, strings or "inf".
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;

  std::vector<double> column(std::string_view name) const;
  std::string to_csv() const;
};

struct SuiteReport {
  std::string suite;
  std::vector<Assertion> assertions;
  Table table;
  nlohmann::json info = nlohmann::json::object();

  bool passed() const;
  nlohmann::json to_json() const;
};

/// Artifact-level thresholds. Every one can be overridden from the run config.
struct Tolerances {
  double ohtsuka_gap = 0.02;           // relative |P - T| / T at the largest N
  double continuity = 0.01;            // relative |P(nu_N) - P(nu)| / P(nu) at the largest N
  double limit_discrepancy = 0.05;     // moment discrepancy at the largest N
  double limit_gap = 0.02;             // relative |P(nu_N) - T| / T at the largest N
  double ratio_stability = 0.2;        // max/min of per-radius ratio maxima minus 1
  double case1_slack = 1e-3;           // quadrature allowance on the 2^{d-eps} bound
  double lebesgue_error = 0.01;        // relative error at the smallest radius
  double min_principle = 1e-3;         // relative change of the mesh minimum under 4x refinement
  double certify_slack = 0.01;         // relative mesh slack in the weak-duality check
  double trend_slack = 1e-9;           // absolute slack for "last <= first" comparisons
};

nlohmann::json to_json(const Tolerances& t);

/// Default continuous-game resolution per set kind.
std::size_t default_game_resolution(const SetModel& set);

struct SweepConfig {
  std::vector<std::size_t> n_list{1, 2, 4, 8, 16};
  SolverConfig solver;
  GameConfig game;
  std::size_t game_resolution = 0;  // 0 = default_game_resolution
  Tolerances tol;
};

/// Rows (N, P_hat, T_hat, gap) with gap = |P_hat - T_hat| / T_hat. Asserts the
/// last gap is at most the first and within tol.ohtsuka_gap, plus weak
/// duality of the continuous certificate.
SuiteReport ohtsuka_sweep(const KernelSpec& kernel, const SetModel& set, const SweepConfig& cfg);

enum class ApproxScheme { quasi_uniform, constant, dyadic_midpoint };
std::string_view to_string(ApproxScheme s);
ApproxScheme approx_scheme_from_string(std::string_view name);

struct ContinuityConfig {
  ApproxScheme scheme = ApproxScheme::quasi_uniform;
  std::vector<std::size_t> n_list{16, 32, 64, 128, 256};
  std::size_t quadrature_resolution = 4000;  // Hausdorff-potential rule
  std::size_t reference_resolution = 4096;   // discrete stand-in for H_d|A in the discrepancy
  Tolerances tol;
};

/// nu_N from the scheme, nu its limit (normalized H_d|A except for the
/// constant scheme). Rows (N, P(nu_N), P(nu), abs_diff, rel_diff,
/// discrepancy). Asserts the relative difference at the largest N is below
/// tol.continuity, that it does not grow from first to last row, that the
/// discrepancy does not grow, and the minimum-principle shadow for each nu_N.
SuiteReport continuity_check(const KernelSpec& kernel, const SetModel& set,
                             const ContinuityConfig& cfg);

/// Fine-mesh minimum of U^mu (interval endpoints included) at `resolution`
/// versus 4 * resolution without refinement; passes when the relative change
/// is within `tol`.
Assertion minimum_principle_shadow(const KernelSpec& kernel, const DiscreteMeasure& mu,
                                   const SetModel& set, std::size_t resolution, double tol);

/// Rows (N, P_hat, discrepancy to the continuous optimum, gap). The optimum
/// is computed at two resolutions; when the two disagree by more than
/// tol.limit_discrepancy the optimum is flagged non-unique and the
/// discrepancy assertion is reported but does not fail the suite.
SuiteReport limit_measure_check(const KernelSpec& kernel, const SetModel& set,
                                const SweepConfig& cfg);

struct RatioScanConfig {
  std::size_t samples = 1000;  // total (x, y, r) triples, spread evenly over radii
  std::vector<double> radii;   // empty = diam * {1/11, 1/33, 1/100, 1/333, 1/1000}
  std::uint64_t seed = 0;
  std::size_t local_resolution = 1000;
  double max_kappa = 4.0;  // |x - y| / r is drawn uniformly from (0, max_kappa]
  Tolerances tol;
};

/// Samples (y, kappa, direction) once and reuses them at every radius so
/// the per-radius maxima are directly comparable. On sets with a boundary
/// every other sample places y at zeta * r from the boundary, zeta uniform in
/// [0, 2], so boundary effects are seen at every scale. Rows (r, samples, max_ratio,
/// case1_count, case1_max). Asserts the spread of per-radius maxima is within
/// tol.ratio_stability and every Case-1 ratio (|x-y| > 2r, |x-y| <= t_eps) is
/// at most 2^{d-eps} + tol.case1_slack.
SuiteReport ratio_bound_scan(const KernelSpec& kernel, const SetModel& set,
                             const RatioScanConfig& cfg);

struct LebesgueConfig {
  std::size_t atoms = 64;        // default measure: counting measure on an equally spaced mesh
  std::size_t points = 8;        // non-atom test points
  std::size_t atom_points = 4;   // atoms used as test points
  std::vector<double> radii;     // empty = r0 * 2^{-k} down to <= diam/1000, r0 = min(diam/10, half the closest atom spacing)
  std::uint64_t seed = 0;
  std::size_t local_resolution = 1000;
  Tolerances tol;
};

/// Rows (point, kind, r, Phi, U, rel_error). Asserts the relative error at the
/// smallest radius is below tol.lebesgue_error at finite-potential points and
/// that Phi strictly increases along the radii at atoms with infinite
/// potential.
SuiteReport lebesgue_point_scan(const KernelSpec& kernel, const SetModel& set,
                                const DiscreteMeasure& mu, const LebesgueConfig& cfg);

/// Default Lebesgue-scan measure: uniform counting measure on `atoms`
/// equally spaced mesh nodes.
DiscreteMeasure lebesgue_default_measure(const SetModel& set, std::size_t atoms);

/// Fictitious play against the simplex on `count` seeded random matrices
/// with sizes growing to max_dim. Rows (index, rows, cols, fp_value,
/// lp_value, diff, lp_gap).
SuiteReport solver_agreement(std::size_t count, std::size_t max_dim, std::uint64_t seed,
                             double value_tol = 1e-4, double lp_gap_tol = 1e-9);

/// Log-log line plot of y columns against x, one polyline per column.
std::string svg_loglog(const Table& t, std::string_view x, const std::vector<std::string>& ys,
                       std::string_view title);

}  // namespace polar
