#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "polar/geometry.hpp"
#include "polar/kernels.hpp"
#include "polar/measures.hpp"
#include "polar/potentials.hpp"

namespace polar {

enum class SolverMethod { softmin_anneal, best_response, hybrid };

std::string_view to_string(SolverMethod m);
SolverMethod solver_method_from_string(std::string_view name);

struct SolverConfig {
  SolverMethod method = SolverMethod::hybrid;
  double beta0 = 10.0;
  double beta_end = 1e4;
  std::size_t stages = 20;
  std::size_t restarts = 16;
  std::uint64_t seed = 0;
  std::size_t inner_resolution = 0;  // 0 picks a per-set default, see default_inner_resolution
  std::size_t max_outer_iters = 200;  // ascent steps per stage, and best-response rounds
  double fd_step = 1e-5;
  std::size_t threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

/// Evaluation mesh resolution used when SolverConfig::inner_resolution is 0.
std::size_t default_inner_resolution(const SetModel& set, std::size_t n);

struct InnerMin {
  Vec3 point;
  Extended value;
};

/// inf over A of the counting-measure potential of `config`; identical to
/// polarization(counting_measure(config), set, resolution, true).
InnerMin inner_min(const KernelSpec& kernel, const Configuration& config, const SetModel& set,
                   std::size_t resolution);

struct TraceEntry {
  std::size_t restart = 0;
  std::string phase;  // "anneal" or "best_response"
  std::size_t stage = 0;
  double beta = 0.0;  // 0 for best-response rounds
  double smoothed = 0.0;
  double mesh_min = 0.0;
  double step = 0.0;
  std::size_t accepted = 0;
};

struct RestartResult {
  Configuration config;
  double initial_value = 0.0;  // certified value of the starting configuration
  double value = 0.0;          // certified value of the kept configuration
  bool regressed = false;      // optimization ended below the start; the start was kept
  std::vector<TraceEntry> trace;
};

struct SolveReport {
  Configuration best_config;
  double value = 0.0;  // inner_min on a 4x finer mesh with refinement
  Vec3 worst_point;
  double coarse_value = 0.0;  // inner_min at the working resolution
  double recertification_shift = 0.0;  // |value - coarse_value| / |value|
  std::size_t best_restart = 0;
  std::vector<double> restart_values;
  std::vector<double> restart_initial_values;
  std::vector<TraceEntry> trace;  // all restarts, restart-major
  bool stalled = false;  // the winning restart's optimizer ended below its start
  bool collapse_detected = false;  // N >= 2 and every point within 0.05 of the centroid
  std::size_t inner_resolution = 0;
};

/// Multistart search for P_f(A, N). Each restart starts from a seeded mix of
/// mesh-subsampled and uniformly random points, then runs the configured
/// method:
///   softmin_anneal  chart-space ascent of the mesh softmin
///                   S_beta = -(1/beta) log sum_j w_j exp(-beta U(y_j))
///                   over a geometric beta schedule
///   best_response   perturbs one point at a time against the current worst
///                   node, keeping moves that raise the mesh minimum
///   hybrid          anneal, then best-response polish
/// Each restart keeps the better of its start and its optimized
/// configuration. Restarts run concurrently; the best certified value wins,
/// ties to the lowest restart index.
SolveReport solve_discrete(const KernelSpec& kernel, const SetModel& set, std::size_t n,
                           const SolverConfig& cfg = {});

nlohmann::json to_json(const SolverConfig& cfg);
nlohmann::json to_json(const SolveReport& r, int ambient_dim);

}  // namespace polar
