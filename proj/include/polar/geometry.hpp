#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "polar/vec.hpp"

namespace polar {

enum class SetKind { circle, sphere2, ball, segment, union_of };

std::string to_string(SetKind kind);

/// Ambient tolerance for "lies on the set" checks, relative to the set scale.
inline constexpr double kAmbientTolerance = 1e-12;

/// A compact d-regular set. Circles lie in the xy-plane, segments on the
/// x-axis; every primitive is translated by `center`.
struct SetModel {
  SetKind kind = SetKind::circle;
  double radius = 1.0;
  int dim = 3;  // ball only
  double lo = 0.0;
  double hi = 1.0;  // segment only
  Vec3 center;
  std::vector<SetModel> components;  // union only
  double separation = 0.0;           // union only: declared lower bound on dist(A_i, A_j)

  static SetModel circle(double radius = 1.0, Vec3 center = {});
  static SetModel sphere2(double radius = 1.0, Vec3 center = {});
  static SetModel ball(int dim, double radius = 1.0, Vec3 center = {});
  static SetModel segment(double lo = 0.0, double hi = 1.0, Vec3 center = {});
  /// Throws DomainError unless the components' bounding balls are at least
  /// `separation` apart (separation <= 0 means "use the bounding-ball gap").
  static SetModel union_of(std::vector<SetModel> components, double separation = 0.0);

  /// Validates invariants (positive radius, lo < hi, separated unions).
  void validate() const;

  int ambient_dim() const;
  /// Regularity dimension; for unions the smallest component dimension.
  double hausdorff_dim() const;
  int chart_dim() const;
  double diameter() const;
  /// H_d(A) with H_d([0,1]^d) = 1; for unions the sum of component measures.
  double measure() const;
  /// Radius of a ball around `center` containing the set.
  double bounding_radius() const;
  Vec3 bounding_center() const;
  /// Length scale used for tolerances.
  double scale() const;

  bool contains(Vec3 p, double rel_tol = kAmbientTolerance) const;
};

/// Position in chart coordinates. `component` selects the union member.
struct ChartPoint {
  int component = 0;
  std::array<double, 3> u{};
};

/// Maps chart coordinates onto the set. Angles may take any real value;
/// ball and segment coordinates are projected onto the set.
Vec3 chart_to_point(const SetModel& set, const ChartPoint& c);
/// Chart coordinates of a point (projected onto the set first).
ChartPoint point_to_chart(const SetModel& set, Vec3 p);
/// Canonical chart representative: angles wrapped to [0, 2pi), polar angle in [0, pi].
ChartPoint canonical_chart(const SetModel& set, const ChartPoint& c);
/// The primitive set a chart point lives on.
const SetModel& chart_component(const SetModel& set, int component);

struct Projection {
  Vec3 point;
  // The nearest point was not unique (e.g. the center of a circle); the
  // fixed reference direction +x was used.
  bool degenerate = false;
};

/// Nearest point of the set to p.
Projection project(const SetModel& set, Vec3 p);

/// Index of the union component nearest to p (0 for primitives).
int component_of(const SetModel& set, Vec3 p);

/// Hausdorff-weighted node set.
struct Mesh {
  std::vector<Vec3> nodes;
  std::vector<double> weights;
  std::vector<ChartPoint> charts;
  std::vector<double> local_dim;  // d_k of the node's component
  double spacing = 0.0;           // max nearest-neighbour gap

  std::size_t size() const { return nodes.size(); }
  double total_weight() const;
};

/// Quasi-uniform mesh. `resolution` counts nodes per unit of the chart:
/// circle and segment have exactly `resolution` nodes, the sphere a
/// Fibonacci lattice of resolution^2 nodes, balls `resolution` radial
/// shells. `offset` in [0, 1) shifts nodes by offset * h along the chart so
/// meshes at offsets 0 and 0.5 interleave.
Mesh make_mesh(const SetModel& set, std::size_t resolution, double offset = 0.0);

/// Endpoints of the interval charts (segments, 1-dimensional balls, and such
/// union components). Interval meshes stop short of the upper end, so callers
/// that take an inf over A add these explicitly.
std::vector<Vec3> interval_endpoints(const SetModel& set);

/// Max nearest-neighbour distance of a point set (bucket grid search).
double max_nearest_neighbor_gap(std::span<const Vec3> nodes);

/// Chart-space bracket half-widths around `at` matching an ambient step h.
std::array<double, 3> chart_step(const SetModel& set, const ChartPoint& at, double h);

/// Quadrature rule over a local patch A ∩ B(y, r).
struct PatchRule {
  std::vector<Vec3> nodes;
  std::vector<double> weights;
  double measure = 0.0;  // sum of weights, approximates H_d(A ∩ B(y, r))
};

/// Quadrature for A ∩ B(y, r) around a point y of the set. On 1-dimensional
/// charts the rule is split at the chart positions of `singular` points and
/// geometrically graded towards them, so integrable singularities there are
/// resolved; on 2- and 3-dimensional sets the rule is polar around y.
/// `local_resolution` is the approximate node budget. Throws
/// ResolutionError if the patch has no nodes and DomainError for r <= 0 or,
/// on unions, r at or beyond the component separation.
PatchRule local_patch(const SetModel& set, Vec3 y, double r, std::size_t local_resolution,
                      std::span<const Vec3> singular = {});

/// Quadrature for all of A, graded around y (for potentials of H_d).
PatchRule whole_set_rule(const SetModel& set, Vec3 y, std::size_t resolution);

/// H_d(A ∩ B(y, r)).
double patch_measure(const SetModel& set, Vec3 y, double r, std::size_t local_resolution = 1000);

/// Uniformly distributed point on the set (H_d-uniform on each primitive;
/// union components chosen with equal probability).
Vec3 random_point(const SetModel& set, std::mt19937_64& rng);

/// Uniform double in [0, 1) built from raw engine bits (portable across
/// standard library implementations).
double uniform01(std::mt19937_64& rng);

struct RegularityRow {
  Vec3 y;
  double r = 0.0;
  double measure = 0.0;
  double ratio = 0.0;  // measure / r^d
};

struct RegularityProbe {
  double c_est = 0.0;
  double C_est = 0.0;
  std::vector<RegularityRow> table;
};

/// Empirical regularity constants: min and max of H_d(B(y,r) ∩ A) / r^d over
/// sampled points and radii log-spaced in [diam * 1e-3, diam).
RegularityProbe regularity_probe(const SetModel& set, std::size_t sample_points,
                                 std::size_t sample_radii, std::uint64_t seed);

}  // namespace polar
