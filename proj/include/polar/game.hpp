#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "polar/geometry.hpp"
#include "polar/kernels.hpp"
#include "polar/measures.hpp"
#include "polar/potentials.hpp"

namespace polar {

/// How a support node enters the payoff.
///   point          M[i][j] = f(|x_i - y_j|), node i is a point mass.
///   cell_average   node i carries mass spread over its cell, so M[i][j] is
///                  the cell average of f(|. - y_j|) over a finer sub-mesh.
///                  On 1-dimensional charts the cells are hat functions
///                  interpolating linearly between neighbouring support
///                  nodes, so the smeared density is continuous; elsewhere
///                  they are H_d-uniform Voronoi cells.
enum class PayoffRule { point, cell_average };

std::string_view to_string(PayoffRule rule);
PayoffRule payoff_rule_from_string(std::string_view name);

struct PayoffOptions {
  PayoffRule rule = PayoffRule::point;
  // Sub-mesh refinement factor for cell_average; 0 picks 64, 8 or 3 for
  // chart dimension 1, 2 or 3.
  std::size_t cell_refinement = 0;
  // Replace infinite entries by f(h/2), h the support spacing, instead of
  // failing. Needed only when interleaving cannot separate the meshes.
  bool cap_diagonal = false;
  // Build the constraint mesh at offset 0 (coincident with the support
  // mesh). Exercises the diagonal-infinity guard.
  bool coincident_meshes = false;
};

/// Row player (maximizer) picks a support node, column player (minimizer) a
/// constraint node.
struct PayoffMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> entries;  // row-major
  std::vector<Vec3> support_nodes;
  std::vector<Vec3> constraint_nodes;
  bool cap_applied = false;
  PayoffRule rule = PayoffRule::point;
  // cell_average only: sub-mesh nodes, their weight normalized within the
  // owning cell, and the owning support index.
  std::vector<Vec3> cell_nodes;
  std::vector<double> cell_weights;
  std::vector<std::size_t> cell_owner;

  double operator()(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }

  /// Plain matrix without geometry (toy games, solver tests).
  static PayoffMatrix from_rows(const std::vector<std::vector<double>>& rows);
};

/// Payoff for the discretized sup-inf: support mesh at offset 0, constraint
/// mesh at offset 0.5 so no support node coincides with a constraint node.
/// Throws ConstructionError ("diagonal infinity") if a coincident pair meets
/// an unbounded kernel and capping is off.
PayoffMatrix build_payoff(const KernelSpec& kernel, const SetModel& set,
                          std::size_t support_resolution, std::size_t constraint_resolution,
                          const PayoffOptions& options = {});

struct GameSolution {
  std::vector<double> weights;         // row player (measure) mixed strategy
  std::vector<double> column_weights;  // column player mixed strategy
  double value = 0.0;                  // bracket midpoint (FP) or LP optimum
  double lower = 0.0;                  // min_j (M^T w)_j
  double upper = 0.0;                  // max_i (M y)_i
  double duality_gap = 0.0;            // upper - lower
  std::size_t iterations = 0;
  bool converged = false;
  bool polished = false;  // strategies replaced by a verified equalizer solution
};

/// Alternating fictitious play (Brown-Robinson). Stops once the best
/// bracket satisfies upper - lower <= gap_tol or after max_iters rounds;
/// the returned strategies are the empirical mixtures that produced the
/// best lower and upper bounds. Ties go to the lowest index.
GameSolution fictitious_play(const PayoffMatrix& m, std::size_t max_iters, double gap_tol);

/// Exact value by dense tableau simplex on the normalized LP
///   max sum(q) s.t. M' q <= 1, q >= 0    (M' = M shifted to be positive)
/// with Dantzig pricing and a Bland's-rule fallback on degenerate streaks.
/// Throws SizeError beyond 200 x 200.
GameSolution lp_exact_small(const PayoffMatrix& m);

/// Support-equalizer polish of an approximate solution. For several support
/// guesses (R rows, C columns) read off `start` it solves
///   M_RCᵀ w = v 1, M_RC y = v 1, sum w = sum y = 1
/// by LU when |R| = |C| and by least squares otherwise, and keeps the
/// candidate whose full-matrix bracket upper - lower is smallest, provided
/// it beats the bracket of `start`. Returns `start` unchanged when no
/// candidate is nonnegative, consistent and better.
GameSolution polish_equalizer(const PayoffMatrix& m, const GameSolution& start);

enum class GameSolverKind { fictitious_play, simplex };

std::string_view to_string(GameSolverKind kind);
GameSolverKind game_solver_from_string(std::string_view name);

struct GameConfig {
  GameSolverKind solver = GameSolverKind::fictitious_play;
  std::size_t max_iters = 4'000'000;
  double gap_tol = 1e-4;
  double prune = 1e-8;
  bool polish = true;
  std::size_t certify_factor = 4;
  // Constraint mesh resolution as a multiple of the support resolution; 0
  // picks 2 on curves and surfaces and 1 on solids. A constraint mesh no
  // finer than the support lets the measure hide mass between constraint
  // nodes on intervals and the sphere, while on a solid the factor costs its
  // cube in columns and buys nothing measurable.
  std::size_t constraint_factor = 0;
  PayoffOptions payoff{PayoffRule::cell_average, 0, false, false};
};

/// Runs the configured solver, then the equalizer polish when enabled and
/// the solver is fictitious play.
GameSolution solve_game(const PayoffMatrix& m, const GameConfig& cfg);

struct ContinuousResult {
  double t_estimate = 0.0;
  DiscreteMeasure measure;  // pruned weights on support nodes
  DiscreteMeasure smeared;  // the measure the game actually optimizes (== measure for point rule)
  GameSolution game;
  double certified = 0.0;  // P_f(smeared) on the finer constraint mesh
  std::size_t support_size = 0;
  bool cap_applied = false;
};

/// Discretized continuous polarization T_f(A): support mesh at `resolution`,
/// constraint mesh at cfg.constraint_factor times that, game solve, pruning of weights below cfg.prune, and
/// certification on a cfg.certify_factor times finer constraint mesh.
ContinuousResult continuous_polarization(const KernelSpec& kernel, const SetModel& set,
                                         std::size_t resolution, const GameConfig& cfg = {});

nlohmann::json to_json(const GameSolution& g);

}  // namespace polar
