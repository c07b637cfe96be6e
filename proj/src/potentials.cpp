#include "polar/potentials.hpp"

#include <cmath>

#include "polar/errors.hpp"

namespace polar {

Extended potential(const KernelSpec& kernel, const DiscreteMeasure& mu, Vec3 y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double t = distance(mu.atoms[i], y);
    if (t == 0.0) {
      if (kernel.unbounded()) return Extended::infinity();
      sum += mu.weights[i];
      continue;
    }
    sum += mu.weights[i] * kernel_value(kernel, t);
  }
  return sum;
}

std::vector<Extended> potential_field(const KernelSpec& kernel, const DiscreteMeasure& mu,
                                      std::span<const Vec3> nodes) {
  std::vector<Extended> out;
  out.reserve(nodes.size());
  for (const Vec3& y : nodes) out.push_back(potential(kernel, mu, y));
  return out;
}

double golden_section(const std::function<Extended(double)>& g, double a, double b, double tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  Extended gc = g(c);
  Extended gd = g(d);
  while (std::abs(b - a) > tol) {
    if (gc < gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - invphi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + invphi * (b - a);
      gd = g(d);
    }
    if (!(c < d)) break;
  }
  return gc < gd ? c : d;
}

PolarizationResult minimize_over_set(const SetModel& set, std::size_t resolution, bool refine,
                                     const PotentialFunction& u) {
  const Mesh mesh = make_mesh(set, resolution, 0.0);
  PolarizationResult best;
  best.value = Extended::infinity();
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const Extended v = u(mesh.nodes[i]);
    if (v < best.value || i == 0) {
      best.value = v;
      best.node_index = i;
    }
  }
  best.argmin = mesh.nodes[best.node_index];
  best.chart = mesh.charts[best.node_index];
  if (!refine) return best;

  best.refined = true;
  const int dims = chart_component(set, best.chart.component).chart_dim();
  constexpr double kTol = 1e-10;
  for (int sweep = 0; sweep < 20; ++sweep) {
    bool improved = false;
    for (int k = 0; k < dims; ++k) {
      const auto step = chart_step(set, best.chart, mesh.spacing);
      const double delta = step[static_cast<std::size_t>(k)];
      if (!(delta > 0.0)) continue;
      ChartPoint trial = best.chart;
      auto along = [&](double t) {
        trial.u[static_cast<std::size_t>(k)] = t;
        return u(chart_to_point(set, trial));
      };
      const double center = best.chart.u[static_cast<std::size_t>(k)];
      const double t = golden_section(along, center - delta, center + delta, kTol);
      const Extended v = along(t);
      if (v < best.value) {
        if (best.value.is_infinite() ||
            best.value.value() - v.value() > 1e-15 * std::abs(best.value.value()))
          improved = true;
        best.value = v;
        best.chart = trial;
      }
    }
    if (!improved) break;
  }
  best.chart = canonical_chart(set, best.chart);
  best.argmin = chart_to_point(set, best.chart);
  best.value = u(best.argmin);
  return best;
}

PolarizationResult polarization(const KernelSpec& kernel, const DiscreteMeasure& mu,
                                const SetModel& set, std::size_t resolution, bool refine) {
  return minimize_over_set(set, resolution, refine,
                           [&](Vec3 y) { return potential(kernel, mu, y); });
}

Extended lebesgue_average(const KernelSpec& kernel, const DiscreteMeasure& mu, const SetModel& set,
                          Vec3 y, double r, std::size_t local_resolution) {
  if (!(r > 0.0 && r < set.diameter())) throw DomainError("lebesgue_average needs 0 < r < diam");
  std::vector<Vec3> inside;
  for (const Vec3& a : mu.atoms)
    if (distance(a, y) <= 1.01 * r) inside.push_back(a);
  const PatchRule rule = local_patch(set, y, r, local_resolution, inside);
  Extended sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    sum += rule.weights[i] * potential(kernel, mu, rule.nodes[i]);
  return sum / rule.measure;
}

double lemma_ratio(const KernelSpec& kernel, const SetModel& set, Vec3 x, Vec3 y, double r,
                   std::size_t local_resolution) {
  const double r0 = set.diameter() / 10.0;
  if (!(r > 0.0 && r < r0)) throw DomainError("lemma_ratio needs 0 < r < diam/10");
  const double dxy = distance(x, y);
  if (dxy == 0.0 && kernel.unbounded())
    throw DomainError("lemma_ratio undefined at x = y for an unbounded kernel");
  const Vec3 singular[1] = {x};
  const PatchRule rule = local_patch(set, y, r, local_resolution, singular);
  double integral = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    integral += rule.weights[i] * kernel_eval(kernel, distance(x, rule.nodes[i])).value();
  const double fxy = kernel_eval(kernel, dxy).value();
  return integral / rule.measure / fxy;
}

double hausdorff_potential(const KernelSpec& kernel, const SetModel& set, Vec3 y,
                           std::size_t resolution) {
  const PatchRule rule = whole_set_rule(set, y, resolution);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    sum += rule.weights[i] * kernel_value(kernel, distance(rule.nodes[i], y));
  return sum / set.measure();
}

}  // namespace polar
