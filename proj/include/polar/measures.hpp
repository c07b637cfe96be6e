#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "polar/geometry.hpp"
#include "polar/vec.hpp"

namespace polar {

/// Finite positive combination of point masses.
struct DiscreteMeasure {
  std::vector<Vec3> atoms;
  std::vector<double> weights;

  std::size_t size() const { return atoms.size(); }
  double total_mass() const;
  bool is_probability(double tol = 1e-12) const;
};

/// N-point multiset; repeated points are allowed.
struct Configuration {
  std::vector<Vec3> points;
  std::size_t size() const { return points.size(); }
};

/// Normalized counting measure (1/N) sum delta_x. Exactly coincident points
/// merge into one atom with the summed weight; near-duplicates stay apart.
DiscreteMeasure counting_measure(const Configuration& config);

/// Normalized H_d-weighted mesh measure (weights / total weight).
DiscreteMeasure mesh_measure(const Mesh& mesh);

/// Throws DomainError unless every atom lies on the set and the weights are
/// positive.
void check_supported_on(const DiscreteMeasure& mu, const SetModel& set);

/// Moment-family surrogate for weak-star distance:
///   max_k |∫ phi_k dmu - ∫ phi_k dnu|
/// over Fourier modes cos(k theta), sin(k theta), k <= degree (circle), real
/// orthonormal spherical harmonics of degree <= degree (sphere), and
/// monomials of total degree <= degree in coordinates scaled to the unit
/// ball (ball, segment, union; unions also compare component masses).
double weak_star_discrepancy(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             const SetModel& set, std::size_t family_degree);

/// Default family degree: 8 on the circle, 4 elsewhere.
std::size_t default_family_degree(const SetModel& set);

nlohmann::json to_json(const DiscreteMeasure& mu, int ambient_dim);
DiscreteMeasure measure_from_json(const nlohmann::json& j);
nlohmann::json point_json(Vec3 p, int ambient_dim);
Vec3 point_from_json(const nlohmann::json& j);

}  // namespace polar
