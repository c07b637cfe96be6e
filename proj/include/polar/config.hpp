#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "polar/discrete.hpp"
#include "polar/game.hpp"
#include "polar/geometry.hpp"
#include "polar/kernels.hpp"
#include "polar/verify.hpp"

namespace polar {

/// Everything a CLI run needs, with defaults resolved.
///
/// JSON schema (every key optional except kernel and set; unknown keys are
/// rejected at every level):
///   kernel     {family: riesz|log|log_power|gaussian, s, c, alpha}
///   set        {kind: circle|sphere2|ball|segment|union, radius, dim, lo, hi,
///               center: [x, y, z], components: [set...], separation}
///   seed       integer
///   threads    integer, 0 = machine parallelism
///   output_dir string
///   n          point count for solve-discrete
///   solver     {method, beta0, beta_end, stages, restarts, inner_resolution,
///               max_outer_iters, fd_step}
///   game       {solver, max_iters, gap_tol, prune, polish, certify_factor,
///               constraint_factor,
///               payoff_rule, cell_refinement, cap_diagonal, coincident_meshes,
///               resolution, matrix}
///   verify     {n_list, game_resolution,
///               continuity: {scheme, n_list, quadrature_resolution, reference_resolution},
///               ratio: {samples, radii, local_resolution, max_kappa},
///               lebesgue: {atoms, points, atom_points, radii, local_resolution, measure}}
///   tolerances {ohtsuka_gap, continuity, limit_discrepancy, limit_gap,
///               ratio_stability, case1_slack, lebesgue_error, min_principle,
///               certify_slack, trend_slack}
struct RunConfig {
  KernelSpec kernel;
  SetModel set;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::string output_dir;  // empty = timestamped directory under runs/
  std::size_t n = 4;
  SolverConfig solver;
  GameConfig game;
  std::size_t game_resolution = 0;  // 0 = default_game_resolution
  std::optional<std::vector<std::vector<double>>> toy_matrix;
  std::vector<std::size_t> n_list{1, 2, 4, 8, 16};
  std::size_t verify_game_resolution = 0;
  ContinuityConfig continuity;
  RatioScanConfig ratio;
  LebesgueConfig lebesgue;
  std::optional<DiscreteMeasure> lebesgue_measure;
  Tolerances tol;

  /// Propagates seed, threads and tolerances into the per-module configs.
  void resolve();
};

/// Parses and validates, including kernel admissibility on the set.
/// Throws ConfigError with a readable message.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

/// Effective configuration with every default written out. Feeding it back
/// to parse_run_config yields the same run (output_dir is omitted).
nlohmann::json echo(const RunConfig& cfg);

SetModel set_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SetModel& set);
KernelSpec kernel_from_json(const nlohmann::json& j);
nlohmann::json to_json(const KernelSpec& k);

/// Replaces every non-finite number in the tree by the string "inf", "-inf"
/// or "nan" (JSON has no literal for them).
void replace_nonfinite(nlohmann::json& j);

}  // namespace polar
