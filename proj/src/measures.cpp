#include "polar/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include <boost/math/special_functions/spherical_harmonic.hpp>

#include "polar/errors.hpp"

namespace polar {

double DiscreteMeasure::total_mass() const {
  double m = 0.0;
  for (double w : weights) m += w;
  return m;
}

bool DiscreteMeasure::is_probability(double tol) const {
  return std::abs(total_mass() - 1.0) <= tol &&
         std::all_of(weights.begin(), weights.end(), [](double w) { return w > 0.0; });
}

DiscreteMeasure counting_measure(const Configuration& config) {
  if (config.points.empty()) throw DomainError("counting measure of an empty configuration");
  const double w = 1.0 / static_cast<double>(config.size());
  DiscreteMeasure mu;
  // First-occurrence order is kept so the result is deterministic.
  std::map<std::tuple<double, double, double>, std::size_t> seen;
  std::vector<std::size_t> counts;
  for (const Vec3& p : config.points) {
    auto [it, inserted] = seen.try_emplace({p.x, p.y, p.z}, mu.atoms.size());
    if (inserted) {
      mu.atoms.push_back(p);
      counts.push_back(0);
    }
    ++counts[it->second];
  }
  mu.weights.resize(counts.size());
  double assigned = 0.0;
  for (std::size_t i = 0; i + 1 < counts.size(); ++i) {
    mu.weights[i] = static_cast<double>(counts[i]) * w;
    assigned += mu.weights[i];
  }
  // The last atom absorbs rounding so the masses sum to one.
  mu.weights.back() = 1.0 - assigned;
  return mu;
}

DiscreteMeasure mesh_measure(const Mesh& mesh) {
  DiscreteMeasure mu;
  mu.atoms = mesh.nodes;
  const double total = mesh.total_weight();
  mu.weights.reserve(mesh.size());
  for (double w : mesh.weights) mu.weights.push_back(w / total);
  return mu;
}

void check_supported_on(const DiscreteMeasure& mu, const SetModel& set) {
  if (mu.atoms.size() != mu.weights.size()) throw DomainError("atom/weight count mismatch");
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!(mu.weights[i] > 0.0)) throw DomainError("measure weights must be positive");
    if (!set.contains(mu.atoms[i])) throw DomainError("measure atom does not lie on the set");
  }
}

std::size_t default_family_degree(const SetModel& set) {
  return set.kind == SetKind::circle ? 8 : 4;
}

namespace {

template <typename Moment>
double max_moment_gap(const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::size_t count,
                      Moment&& moment) {
  double worst = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    double a = 0.0;
    double b = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) a += mu.weights[i] * moment(k, mu.atoms[i]);
    for (std::size_t i = 0; i < nu.size(); ++i) b += nu.weights[i] * moment(k, nu.atoms[i]);
    worst = std::max(worst, std::abs(a - b));
  }
  return worst;
}

}  // namespace

double weak_star_discrepancy(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             const SetModel& set, std::size_t degree) {
  check_supported_on(mu, set);
  check_supported_on(nu, set);
  const auto deg = static_cast<int>(degree);

  switch (set.kind) {
    case SetKind::circle: {
      auto angle = [&](Vec3 p) { return std::atan2(p.y - set.center.y, p.x - set.center.x); };
      // Moment 2k is cos(k theta), 2k+1 is sin(k theta).
      return max_moment_gap(mu, nu, 2 * (degree + 1), [&](std::size_t m, Vec3 p) {
        const double k = static_cast<double>(m / 2);
        return m % 2 == 0 ? std::cos(k * angle(p)) : std::sin(k * angle(p));
      });
    }
    case SetKind::sphere2: {
      std::vector<std::pair<int, int>> modes;
      for (int l = 0; l <= deg; ++l)
        for (int m = -l; m <= l; ++m) modes.emplace_back(l, m);
      return max_moment_gap(mu, nu, modes.size(), [&](std::size_t k, Vec3 p) {
        const Vec3 v = (1.0 / set.radius) * (p - set.center);
        const double theta = std::acos(std::clamp(v.z, -1.0, 1.0));
        const double phi = std::atan2(v.y, v.x);
        const auto [l, m] = modes[k];
        using boost::math::spherical_harmonic_i;
        using boost::math::spherical_harmonic_r;
        if (m == 0) return spherical_harmonic_r<double>(static_cast<unsigned>(l), 0, theta, phi);
        if (m > 0) return std::sqrt(2.0) * spherical_harmonic_r<double>(static_cast<unsigned>(l), m, theta, phi);
        return std::sqrt(2.0) * spherical_harmonic_i<double>(static_cast<unsigned>(l), -m, theta, phi);
      });
    }
    default: {
      const int amb = set.ambient_dim();
      const Vec3 c = set.bounding_center();
      const double r = set.bounding_radius();
      std::vector<std::array<int, 3>> exps;
      for (int a = 0; a <= deg; ++a)
        for (int b = 0; b <= (amb > 1 ? deg - a : 0); ++b)
          for (int e = 0; e <= (amb > 2 ? deg - a - b : 0); ++e) exps.push_back({a, b, e});
      double gap = max_moment_gap(mu, nu, exps.size(), [&](std::size_t k, Vec3 p) {
        const Vec3 v = (1.0 / r) * (p - c);
        return std::pow(v.x, exps[k][0]) * std::pow(v.y, exps[k][1]) * std::pow(v.z, exps[k][2]);
      });
      if (set.kind == SetKind::union_of) {
        gap = std::max(gap, max_moment_gap(mu, nu, set.components.size(), [&](std::size_t k, Vec3 p) {
                         return component_of(set, p) == static_cast<int>(k) ? 1.0 : 0.0;
                       }));
      }
      return gap;
    }
  }
}

nlohmann::json point_json(Vec3 p, int ambient_dim) {
  nlohmann::json a = nlohmann::json::array();
  for (int k = 0; k < ambient_dim; ++k) a.push_back(p[static_cast<std::size_t>(k)]);
  return a;
}

Vec3 point_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty() || j.size() > 3) throw DomainError("point must be an array of 1-3 numbers");
  Vec3 p;
  for (std::size_t k = 0; k < j.size(); ++k) p[k] = j[k].get<double>();
  return p;
}

nlohmann::json to_json(const DiscreteMeasure& mu, int ambient_dim) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const Vec3& p : mu.atoms) atoms.push_back(point_json(p, ambient_dim));
  return {{"atoms", atoms}, {"weights", mu.weights}};
}

DiscreteMeasure measure_from_json(const nlohmann::json& j) {
  DiscreteMeasure mu;
  for (const auto& a : j.at("atoms")) mu.atoms.push_back(point_from_json(a));
  mu.weights = j.at("weights").get<std::vector<double>>();
  if (mu.atoms.size() != mu.weights.size()) throw DomainError("atom/weight count mismatch");
  return mu;
}

}  // namespace polar
