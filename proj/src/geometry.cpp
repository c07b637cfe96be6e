#include "polar/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <unordered_map>

#include <boost/math/quadrature/gauss.hpp>

#include "polar/errors.hpp"

namespace polar {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kGolden = std::numbers::phi;

double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

double unit_ball_volume(int dim) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return kPi;
    case 3: return 4.0 * kPi / 3.0;
  }
  return 0.0;
}

// Ten-point Gauss-Legendre rule on [-1, 1].
struct Legendre10 {
  std::array<double, 10> x{};
  std::array<double, 10> w{};
  Legendre10() {
    using rule = boost::math::quadrature::gauss<double, 10>;
    const auto& a = rule::abscissa();
    const auto& wt = rule::weights();
    std::size_t k = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      x[k] = -a[i];
      w[k++] = wt[i];
      x[k] = a[i];
      w[k++] = wt[i];
    }
  }
};

const Legendre10& legendre10() {
  static const Legendre10 rule;
  return rule;
}

void gl_piece(double a, double b, const std::function<void(double, double)>& emit) {
  const auto& g = legendre10();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < g.x.size(); ++i) emit(mid + half * g.x[i], half * g.w[i]);
}

// Gauss-Legendre in u on [0, 1] after x = end + sign * len * u^4. The map
// absorbs endpoint singularities up to t^{-3/4} and softens stronger ones.
void gl_power_piece(double end, double len, double sign, const std::function<void(double, double)>& emit) {
  constexpr int m = 4;
  const auto& g = legendre10();
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    const double u = 0.5 * (g.x[i] + 1.0);
    const double um1 = std::pow(u, m - 1);
    emit(end + sign * len * um1 * u, 0.5 * g.w[i] * len * m * um1);
  }
}

// Composite Gauss-Legendre on [a, b] with `pieces` equal pieces; the end
// pieces are geometrically graded (ratio 0.15, `levels` levels) towards the
// flagged endpoints.
void graded_rule(double a, double b, bool grade_left, bool grade_right, std::size_t pieces,
                 int levels, const std::function<void(double, double)>& emit) {
  if (!(b > a)) return;
  constexpr double sigma = 0.15;
  pieces = std::max<std::size_t>(pieces, (grade_left && grade_right) ? 2 : 1);
  const double len = (b - a) / static_cast<double>(pieces);
  for (std::size_t p = 0; p < pieces; ++p) {
    const double pa = a + len * static_cast<double>(p);
    const double pb = p + 1 == pieces ? b : pa + len;
    const bool left = grade_left && p == 0;
    const bool right = grade_right && p + 1 == pieces;
    if (!left && !right) {
      gl_piece(pa, pb, emit);
      continue;
    }
    const double l = pb - pa;
    // Geometric grading stops at 1e-6 of the scale and the power-mapped
    // piece takes over; its smallest node sits near 3e-14 of the scale, well
    // clear of rounding onto the singular endpoint.
    const double floor = 1e-6 * std::max({std::abs(pa), std::abs(pb), l});
    if (left) {
      double outer = l;
      for (int k = 0; k < levels && sigma * outer > floor; ++k) {
        gl_piece(pa + sigma * outer, pa + outer, emit);
        outer *= sigma;
      }
      gl_power_piece(pa, outer, 1.0, emit);
    } else {
      double outer = l;
      for (int k = 0; k < levels && sigma * outer > floor; ++k) {
        gl_piece(pb - outer, pb - sigma * outer, emit);
        outer *= sigma;
      }
      gl_power_piece(pb, outer, -1.0, emit);
    }
  }
}

// Splits [a, b] at the sorted interior points and grades towards each split.
void split_graded_rule(double a, double b, std::vector<double> splits, std::size_t budget,
                       bool grade_a, bool grade_b,
                       const std::function<void(double, double)>& emit) {
  std::sort(splits.begin(), splits.end());
  std::vector<double> cuts{a};
  for (double s : splits)
    if (s > cuts.back() && s < b) cuts.push_back(s);
  cuts.push_back(b);
  const std::size_t nsub = cuts.size() - 1;
  const std::size_t pieces = std::max<std::size_t>(1, budget / (10 * nsub));
  for (std::size_t i = 0; i < nsub; ++i) {
    const bool gl = i > 0 || grade_a;
    const bool gr = i + 1 < nsub || grade_b;
    graded_rule(cuts[i], cuts[i + 1], gl, gr, pieces, 20, emit);
  }
}

// Orthonormal frame (e1, e2) perpendicular to unit vector n.
std::pair<Vec3, Vec3> tangent_frame(Vec3 n) {
  const Vec3 ref = std::abs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  Vec3 e1 = cross(n, ref);
  e1 = (1.0 / norm(e1)) * e1;
  return {e1, cross(n, e1)};
}

std::vector<Vec3> fibonacci_directions(std::size_t n, double offset) {
  std::vector<Vec3> out;
  out.reserve(n);
  const double nn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) + offset;
    const double z = n == 1 ? 1.0 : std::clamp(1.0 - (2.0 * t + 1.0) / nn, -1.0, 1.0);
    const double phi = kTwoPi * (t / kGolden - std::floor(t / kGolden));
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    out.push_back({rho * std::cos(phi), rho * std::sin(phi), z});
  }
  return out;
}

Vec3 zero_beyond(Vec3 v, int dim) {
  if (dim < 3) v.z = 0.0;
  if (dim < 2) v.y = 0.0;
  return v;
}

Projection project_primitive(const SetModel& s, Vec3 p) {
  constexpr double eps = 4.0 * std::numeric_limits<double>::epsilon();
  switch (s.kind) {
    case SetKind::circle: {
      Vec3 v = p - s.center;
      v.z = 0.0;
      const double r = norm(v);
      if (r == 0.0) return {s.center + Vec3{s.radius, 0.0, 0.0}, true};
      if (std::abs(r - s.radius) <= eps * s.radius && p.z == s.center.z) return {p, false};
      return {s.center + (s.radius / r) * v, false};
    }
    case SetKind::sphere2: {
      const Vec3 v = p - s.center;
      const double r = norm(v);
      if (r == 0.0) return {s.center + Vec3{s.radius, 0.0, 0.0}, true};
      if (std::abs(r - s.radius) <= eps * s.radius) return {p, false};
      return {s.center + (s.radius / r) * v, false};
    }
    case SetKind::ball: {
      const Vec3 v = zero_beyond(p - s.center, s.dim);
      const double r = norm(v);
      if (r <= s.radius * (1.0 + eps)) return {s.center + v, false};
      return {s.center + (s.radius / r) * v, false};
    }
    case SetKind::segment: {
      const double x = std::clamp(p.x - s.center.x, s.lo, s.hi);
      return {s.center + Vec3{x, 0.0, 0.0}, false};
    }
    case SetKind::union_of:
      break;
  }
  return {p, false};
}

}  // namespace

std::string to_string(SetKind kind) {
  switch (kind) {
    case SetKind::circle: return "circle";
    case SetKind::sphere2: return "sphere2";
    case SetKind::ball: return "ball";
    case SetKind::segment: return "segment";
    case SetKind::union_of: return "union";
  }
  return "?";
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------
// SetModel

SetModel SetModel::circle(double radius, Vec3 center) {
  SetModel s;
  s.kind = SetKind::circle;
  s.radius = radius;
  s.center = center;
  s.validate();
  return s;
}

SetModel SetModel::sphere2(double radius, Vec3 center) {
  SetModel s;
  s.kind = SetKind::sphere2;
  s.radius = radius;
  s.center = center;
  s.validate();
  return s;
}

SetModel SetModel::ball(int dim, double radius, Vec3 center) {
  SetModel s;
  s.kind = SetKind::ball;
  s.dim = dim;
  s.radius = radius;
  s.center = center;
  s.validate();
  return s;
}

SetModel SetModel::segment(double lo, double hi, Vec3 center) {
  SetModel s;
  s.kind = SetKind::segment;
  s.lo = lo;
  s.hi = hi;
  s.center = center;
  s.validate();
  return s;
}

SetModel SetModel::union_of(std::vector<SetModel> components, double separation) {
  SetModel s;
  s.kind = SetKind::union_of;
  s.components = std::move(components);
  s.separation = separation;
  if (s.components.size() >= 2 && !(separation > 0.0)) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.components.size(); ++i)
      for (std::size_t j = i + 1; j < s.components.size(); ++j) {
        const auto& a = s.components[i];
        const auto& b = s.components[j];
        gap = std::min(gap, distance(a.bounding_center(), b.bounding_center()) -
                                a.bounding_radius() - b.bounding_radius());
      }
    s.separation = gap;
  }
  s.validate();
  return s;
}

void SetModel::validate() const {
  switch (kind) {
    case SetKind::circle:
    case SetKind::sphere2:
      if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("radius must be positive");
      break;
    case SetKind::ball:
      if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("radius must be positive");
      if (dim < 1 || dim > 3) throw DomainError("ball dimension must be 1, 2 or 3");
      break;
    case SetKind::segment:
      if (!(hi > lo) || !std::isfinite(hi - lo)) throw DomainError("segment needs lo < hi");
      break;
    case SetKind::union_of: {
      if (components.empty()) throw DomainError("union needs at least one component");
      for (const auto& c : components) {
        if (c.kind == SetKind::union_of) throw DomainError("nested unions are not supported");
        c.validate();
      }
      if (components.size() >= 2) {
        if (!(separation > 0.0)) throw DomainError("union components must be separated");
        for (std::size_t i = 0; i < components.size(); ++i)
          for (std::size_t j = i + 1; j < components.size(); ++j) {
            const auto& a = components[i];
            const auto& b = components[j];
            const double gap = distance(a.bounding_center(), b.bounding_center()) -
                               a.bounding_radius() - b.bounding_radius();
            if (gap < separation * (1.0 - 1e-12))
              throw DomainError("union components closer than the declared separation");
          }
      }
      break;
    }
  }
}

int SetModel::ambient_dim() const {
  auto lift = [](Vec3 c, int base) {
    if (c.z != 0.0) return 3;
    if (c.y != 0.0) return std::max(base, 2);
    return base;
  };
  switch (kind) {
    case SetKind::circle: return lift(center, 2);
    case SetKind::sphere2: return 3;
    case SetKind::ball: return lift(center, dim);
    case SetKind::segment: return lift(center, 1);
    case SetKind::union_of: {
      int a = 1;
      for (const auto& c : components) a = std::max(a, c.ambient_dim());
      return a;
    }
  }
  return 3;
}

double SetModel::hausdorff_dim() const {
  switch (kind) {
    case SetKind::circle:
    case SetKind::segment: return 1.0;
    case SetKind::sphere2: return 2.0;
    case SetKind::ball: return static_cast<double>(dim);
    case SetKind::union_of: {
      double d = 3.0;
      for (const auto& c : components) d = std::min(d, c.hausdorff_dim());
      return d;
    }
  }
  return 0.0;
}

int SetModel::chart_dim() const {
  switch (kind) {
    case SetKind::circle:
    case SetKind::segment: return 1;
    case SetKind::sphere2: return 2;
    case SetKind::ball: return dim;
    case SetKind::union_of: {
      int d = 0;
      for (const auto& c : components) d = std::max(d, c.chart_dim());
      return d;
    }
  }
  return 0;
}

double SetModel::diameter() const {
  switch (kind) {
    case SetKind::circle:
    case SetKind::sphere2:
    case SetKind::ball: return 2.0 * radius;
    case SetKind::segment: return hi - lo;
    case SetKind::union_of: {
      // Exact for coplanar circles and for spheres/balls; an upper bound otherwise.
      double d = 0.0;
      for (std::size_t i = 0; i < components.size(); ++i) {
        d = std::max(d, components[i].diameter());
        for (std::size_t j = i + 1; j < components.size(); ++j)
          d = std::max(d, distance(components[i].bounding_center(), components[j].bounding_center()) +
                              components[i].bounding_radius() + components[j].bounding_radius());
      }
      return d;
    }
  }
  return 0.0;
}

double SetModel::measure() const {
  switch (kind) {
    case SetKind::circle: return kTwoPi * radius;
    case SetKind::sphere2: return 4.0 * kPi * radius * radius;
    case SetKind::ball: return unit_ball_volume(dim) * std::pow(radius, dim);
    case SetKind::segment: return hi - lo;
    case SetKind::union_of: {
      double m = 0.0;
      for (const auto& c : components) m += c.measure();
      return m;
    }
  }
  return 0.0;
}

double SetModel::bounding_radius() const {
  switch (kind) {
    case SetKind::segment: return 0.5 * (hi - lo);
    case SetKind::union_of: {
      const Vec3 c = bounding_center();
      double r = 0.0;
      for (const auto& k : components)
        r = std::max(r, distance(c, k.bounding_center()) + k.bounding_radius());
      return r;
    }
    default: return radius;
  }
}

Vec3 SetModel::bounding_center() const {
  switch (kind) {
    case SetKind::segment: return center + Vec3{0.5 * (lo + hi), 0.0, 0.0};
    case SetKind::union_of: {
      Vec3 c;
      for (const auto& k : components) c = c + k.bounding_center();
      return (1.0 / static_cast<double>(components.size())) * c;
    }
    default: return center;
  }
}

double SetModel::scale() const { return std::max(1.0, bounding_radius()); }

bool SetModel::contains(Vec3 p, double rel_tol) const {
  return distance(project(*this, p).point, p) <= rel_tol * scale();
}

// ---------------------------------------------------------------------------
// Charts and projection

const SetModel& chart_component(const SetModel& set, int component) {
  if (set.kind != SetKind::union_of) return set;
  if (component < 0 || static_cast<std::size_t>(component) >= set.components.size())
    throw DomainError("chart component out of range");
  return set.components[static_cast<std::size_t>(component)];
}

Vec3 chart_to_point(const SetModel& set, const ChartPoint& c) {
  const SetModel& s = chart_component(set, c.component);
  switch (s.kind) {
    case SetKind::circle:
      return s.center + Vec3{s.radius * std::cos(c.u[0]), s.radius * std::sin(c.u[0]), 0.0};
    case SetKind::sphere2: {
      const double st = std::sin(c.u[0]);
      return s.center + s.radius * Vec3{st * std::cos(c.u[1]), st * std::sin(c.u[1]), std::cos(c.u[0])};
    }
    case SetKind::ball:
      return project_primitive(s, s.center + zero_beyond({c.u[0], c.u[1], c.u[2]}, s.dim)).point;
    case SetKind::segment:
      return s.center + Vec3{std::clamp(c.u[0], s.lo, s.hi), 0.0, 0.0};
    case SetKind::union_of:
      break;
  }
  throw DomainError("invalid chart");
}

ChartPoint point_to_chart(const SetModel& set, Vec3 p) {
  ChartPoint c;
  c.component = component_of(set, p);
  const SetModel& s = chart_component(set, c.component);
  const Vec3 q = project_primitive(s, p).point;
  const Vec3 v = q - s.center;
  switch (s.kind) {
    case SetKind::circle:
      c.u[0] = wrap_angle(std::atan2(v.y, v.x));
      break;
    case SetKind::sphere2:
      c.u[0] = std::acos(std::clamp(v.z / s.radius, -1.0, 1.0));
      c.u[1] = wrap_angle(std::atan2(v.y, v.x));
      break;
    case SetKind::ball:
      c.u = {v.x, v.y, v.z};
      break;
    case SetKind::segment:
      c.u[0] = v.x;
      break;
    case SetKind::union_of:
      break;
  }
  return c;
}

ChartPoint canonical_chart(const SetModel& set, const ChartPoint& c) {
  const SetModel& s = chart_component(set, c.component);
  if (s.kind == SetKind::circle) {
    ChartPoint out = c;
    out.u[0] = wrap_angle(c.u[0]);
    return out;
  }
  ChartPoint out = point_to_chart(s, chart_to_point(set, c));
  out.component = c.component;
  return out;
}

int component_of(const SetModel& set, Vec3 p) {
  if (set.kind != SetKind::union_of) return 0;
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.components.size(); ++i) {
    const double d = distance(project_primitive(set.components[i], p).point, p);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

Projection project(const SetModel& set, Vec3 p) {
  if (set.kind != SetKind::union_of) return project_primitive(set, p);
  return project_primitive(set.components[static_cast<std::size_t>(component_of(set, p))], p);
}

std::array<double, 3> chart_step(const SetModel& set, const ChartPoint& at, double h) {
  const SetModel& s = chart_component(set, at.component);
  switch (s.kind) {
    case SetKind::circle: return {h / s.radius, 0.0, 0.0};
    case SetKind::sphere2: {
      const double dt = h / s.radius;
      const double st = std::max(std::abs(std::sin(at.u[0])), dt);
      return {dt, std::min(kPi, dt / st), 0.0};
    }
    case SetKind::ball: return {h, s.dim > 1 ? h : 0.0, s.dim > 2 ? h : 0.0};
    case SetKind::segment: return {h, 0.0, 0.0};
    case SetKind::union_of: break;
  }
  return {};
}

// ---------------------------------------------------------------------------
// Meshes

double Mesh::total_weight() const {
  double t = 0.0;
  for (double w : weights) t += w;
  return t;
}

std::vector<Vec3> interval_endpoints(const SetModel& set) {
  std::vector<Vec3> out;
  if (set.kind == SetKind::union_of) {
    for (const SetModel& c : set.components) {
      const auto e = interval_endpoints(c);
      out.insert(out.end(), e.begin(), e.end());
    }
  } else if (set.kind == SetKind::segment) {
    out.push_back(set.center + Vec3{set.lo, 0.0, 0.0});
    out.push_back(set.center + Vec3{set.hi, 0.0, 0.0});
  } else if (set.kind == SetKind::ball && set.dim == 1) {
    out.push_back(set.center + Vec3{-set.radius, 0.0, 0.0});
    out.push_back(set.center + Vec3{set.radius, 0.0, 0.0});
  }
  return out;
}

double max_nearest_neighbor_gap(std::span<const Vec3> nodes) {
  const std::size_t n = nodes.size();
  if (n < 2) return 0.0;
  Vec3 lo = nodes[0];
  Vec3 hi = nodes[0];
  for (const auto& p : nodes)
    for (std::size_t k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  double extent = 0.0;
  int dims = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    extent = std::max(extent, hi[k] - lo[k]);
    if (hi[k] > lo[k]) ++dims;
  }
  if (extent == 0.0) return 0.0;
  const double cell = extent / std::max(1.0, std::pow(static_cast<double>(n), 1.0 / std::max(1, dims)));
  auto key = [&](std::int64_t i, std::int64_t j, std::int64_t k) {
    return (i * 73856093) ^ (j * 19349663) ^ (k * 83492791);
  };
  auto index = [&](const Vec3& p, std::size_t k) {
    return static_cast<std::int64_t>(std::floor((p[k] - lo[k]) / cell));
  };
  std::unordered_map<std::int64_t, std::vector<std::size_t>> grid;
  grid.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    grid[key(index(nodes[i], 0), index(nodes[i], 1), index(nodes[i], 2))].push_back(i);

  const std::int64_t max_ring = static_cast<std::int64_t>(std::ceil(extent / cell)) + 1;
  double gap = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ci = index(nodes[i], 0);
    const auto cj = index(nodes[i], 1);
    const auto ck = index(nodes[i], 2);
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t ring = 0; ring <= max_ring; ++ring) {
      for (std::int64_t a = -ring; a <= ring; ++a)
        for (std::int64_t b = -ring; b <= ring; ++b)
          for (std::int64_t c = -ring; c <= ring; ++c) {
            if (std::max({std::abs(a), std::abs(b), std::abs(c)}) != ring) continue;
            auto it = grid.find(key(ci + a, cj + b, ck + c));
            if (it == grid.end()) continue;
            for (std::size_t j : it->second)
              if (j != i) best = std::min(best, distance(nodes[i], nodes[j]));
          }
      if (best <= static_cast<double>(ring) * cell) break;
    }
    gap = std::max(gap, best);
  }
  return gap;
}

namespace {

void push_node(Mesh& m, Vec3 p, double w, ChartPoint c, double d) {
  m.nodes.push_back(p);
  m.weights.push_back(w);
  m.charts.push_back(c);
  m.local_dim.push_back(d);
}

void mesh_interval(Mesh& m, const SetModel& s, double a, double b, std::size_t n, double offset,
                   double d) {
  const double h = (b - a) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    ChartPoint c;
    c.u[0] = a + (static_cast<double>(i) + offset) * h;
    push_node(m, chart_to_point(s, c), h, c, d);
  }
}

void mesh_ball(Mesh& m, const SetModel& s, std::size_t k, double offset) {
  const double R = s.radius;
  const double h = R / static_cast<double>(k);
  std::vector<double> levels;
  for (std::size_t j = 0;; ++j) {
    const double rho = (static_cast<double>(j) + offset) * h;
    if (!(rho < R - 0.25 * h)) break;
    levels.push_back(rho);
  }
  levels.push_back(R);
  const double vol_unit = unit_ball_volume(s.dim);
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const double rho = levels[l];
    const double a = l == 0 ? 0.0 : 0.5 * (levels[l - 1] + rho);
    const double b = l + 1 == levels.size() ? R : 0.5 * (rho + levels[l + 1]);
    const double shell = vol_unit * (std::pow(b, s.dim) - std::pow(a, s.dim));
    if (rho == 0.0) {
      push_node(m, s.center, shell, ChartPoint{}, s.dim);
      continue;
    }
    if (s.dim == 2) {
      const auto n = static_cast<std::size_t>(std::max(1.0, std::round(kTwoPi * rho / h)));
      for (std::size_t i = 0; i < n; ++i) {
        const double ang = kTwoPi * (static_cast<double>(i) + offset) / static_cast<double>(n);
        ChartPoint c;
        c.u = {rho * std::cos(ang), rho * std::sin(ang), 0.0};
        push_node(m, chart_to_point(s, c), shell / static_cast<double>(n), c, 2.0);
      }
    } else {
      const auto n = static_cast<std::size_t>(std::max(1.0, std::round(4.0 * kPi * rho * rho / (h * h))));
      for (const Vec3& dir : fibonacci_directions(n, offset)) {
        ChartPoint c;
        c.u = {rho * dir.x, rho * dir.y, rho * dir.z};
        push_node(m, chart_to_point(s, c), shell / static_cast<double>(n), c, 3.0);
      }
    }
  }
}

void mesh_primitive(Mesh& m, const SetModel& s, std::size_t res, double offset) {
  switch (s.kind) {
    case SetKind::circle:
      mesh_interval(m, s, 0.0, kTwoPi, res, offset, 1.0);
      for (std::size_t i = m.weights.size() - res; i < m.weights.size(); ++i) m.weights[i] *= s.radius;
      break;
    case SetKind::segment:
      mesh_interval(m, s, s.lo, s.hi, res, offset, 1.0);
      break;
    case SetKind::sphere2: {
      const std::size_t n = res * res;
      const double w = s.measure() / static_cast<double>(n);
      for (const Vec3& dir : fibonacci_directions(n, offset)) {
        ChartPoint c;
        c.u[0] = std::acos(std::clamp(dir.z, -1.0, 1.0));
        c.u[1] = wrap_angle(std::atan2(dir.y, dir.x));
        push_node(m, s.center + s.radius * dir, w, c, 2.0);
      }
      break;
    }
    case SetKind::ball:
      if (s.dim == 1) {
        mesh_interval(m, s, -s.radius, s.radius, res, offset, 1.0);
      } else {
        mesh_ball(m, s, res, offset);
      }
      break;
    case SetKind::union_of:
      break;
  }
}

}  // namespace

Mesh make_mesh(const SetModel& set, std::size_t resolution, double offset) {
  if (resolution < 2) throw DomainError("mesh resolution must be at least 2");
  if (!(offset >= 0.0 && offset < 1.0)) throw DomainError("mesh offset must lie in [0, 1)");
  Mesh m;
  if (set.kind == SetKind::union_of) {
    for (std::size_t k = 0; k < set.components.size(); ++k) {
      const std::size_t first = m.size();
      mesh_primitive(m, set.components[k], resolution, offset);
      for (std::size_t i = first; i < m.size(); ++i) m.charts[i].component = static_cast<int>(k);
    }
  } else {
    mesh_primitive(m, set, resolution, offset);
  }
  if (set.kind == SetKind::circle)
    m.spacing = 2.0 * set.radius * std::sin(kPi / static_cast<double>(resolution));
  else
    m.spacing = max_nearest_neighbor_gap(m.nodes);
  return m;
}

// ---------------------------------------------------------------------------
// Local patches

namespace {

void patch_1d(PatchRule& rule, const SetModel& s, Vec3 y, double r, std::size_t budget,
              std::span<const Vec3> singular) {
  const bool circle = s.kind == SetKind::circle;
  double center_u = 0.0;
  double a = 0.0;
  double b = 0.0;
  if (circle) {
    center_u = point_to_chart(s, y).u[0];
    const double half = r >= 2.0 * s.radius ? kPi : 2.0 * std::asin(r / (2.0 * s.radius));
    a = center_u - half;
    b = center_u + half;
  } else {
    const double lo = s.kind == SetKind::segment ? s.lo : -s.radius;
    const double hi = s.kind == SetKind::segment ? s.hi : s.radius;
    center_u = std::clamp(y.x - s.center.x, lo, hi);
    a = std::max(lo, center_u - r);
    b = std::min(hi, center_u + r);
  }
  if (!(b > a)) return;

  std::vector<double> splits;
  bool grade_a = false;
  bool grade_b = false;
  for (const Vec3& p : singular) {
    if (distance(project_primitive(s, p).point, p) > 1e-9 * s.scale()) continue;
    double u = point_to_chart(s, p).u[0];
    if (circle) {
      u = center_u + std::remainder(u - center_u, kTwoPi);
    }
    if (u > a && u < b) splits.push_back(u);
    if (u == a) grade_a = true;
    if (u == b) grade_b = true;
  }
  const double jac = circle ? s.radius : 1.0;
  split_graded_rule(a, b, splits, budget, grade_a, grade_b, [&](double u, double w) {
    ChartPoint c;
    c.u[0] = u;
    rule.nodes.push_back(chart_to_point(s, c));
    rule.weights.push_back(w * jac);
  });
}

void patch_sphere(PatchRule& rule, const SetModel& s, Vec3 y, double r, std::size_t budget) {
  const Vec3 n = (1.0 / s.radius) * (project_primitive(s, y).point - s.center);
  const auto [e1, e2] = tangent_frame(n);
  const double beta = r >= 2.0 * s.radius ? kPi : 2.0 * std::asin(r / (2.0 * s.radius));
  const auto nphi = static_cast<std::size_t>(std::max(8.0, std::sqrt(static_cast<double>(budget))));
  const std::size_t pieces = std::max<std::size_t>(1, budget / (10 * nphi));
  const double R2 = s.radius * s.radius;
  const double dphi = kTwoPi / static_cast<double>(nphi);
  graded_rule(0.0, beta, true, false, pieces, 10, [&](double t, double wt) {
    const double st = std::sin(t);
    const double ct = std::cos(t);
    for (std::size_t j = 0; j < nphi; ++j) {
      const double phi = (static_cast<double>(j) + 0.5) * dphi;
      const Vec3 dir = ct * n + st * (std::cos(phi) * e1 + std::sin(phi) * e2);
      rule.nodes.push_back(s.center + s.radius * dir);
      rule.weights.push_back(R2 * st * wt * dphi);
    }
  });
}

// Polar rule around y over B(y, r) ∩ ball; each ray is integrated up to its
// exit from the ball, so no clipping error arises.
void patch_ball(PatchRule& rule, const SetModel& s, Vec3 y, double r, std::size_t budget) {
  const Vec3 v = zero_beyond(project_primitive(s, y).point - s.center, s.dim);
  const double v2 = dot(v, v);
  const double R2 = s.radius * s.radius;
  auto exit_distance = [&](Vec3 u) {
    const double b = dot(v, u);
    return std::max(0.0, -b + std::sqrt(std::max(0.0, b * b - (v2 - R2))));
  };
  auto emit_ray = [&](Vec3 u, double wdir, std::size_t pieces) {
    const double rmax = std::min(r, exit_distance(u));
    if (!(rmax > 0.0)) return;
    graded_rule(0.0, rmax, true, false, pieces, 8, [&](double rho, double wr) {
      rule.nodes.push_back(s.center + v + rho * u);
      rule.weights.push_back(std::pow(rho, s.dim - 1) * wr * wdir);
    });
  };
  if (s.dim == 2) {
    const auto nphi = static_cast<std::size_t>(std::max(32.0, std::sqrt(static_cast<double>(budget))));
    const std::size_t pieces = std::max<std::size_t>(1, budget / (10 * nphi));
    const double dphi = kTwoPi / static_cast<double>(nphi);
    for (std::size_t j = 0; j < nphi; ++j) {
      const double phi = (static_cast<double>(j) + 0.5) * dphi;
      emit_ray({std::cos(phi), std::sin(phi), 0.0}, dphi, pieces);
    }
  } else {
    const auto nt = static_cast<std::size_t>(std::max(8.0, std::cbrt(static_cast<double>(budget))));
    const std::size_t nphi = 2 * nt;
    const double dphi = kTwoPi / static_cast<double>(nphi);
    // Gauss-Legendre in cos(theta), split into pieces of 10 nodes.
    const std::size_t tpieces = std::max<std::size_t>(1, nt / 10);
    graded_rule(-1.0, 1.0, false, false, tpieces, 0, [&](double ct, double wt) {
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (std::size_t j = 0; j < nphi; ++j) {
        const double phi = (static_cast<double>(j) + 0.5) * dphi;
        emit_ray({st * std::cos(phi), st * std::sin(phi), ct}, wt * dphi, 1);
      }
    });
  }
}

void patch_primitive(PatchRule& rule, const SetModel& s, Vec3 y, double r, std::size_t budget,
                     std::span<const Vec3> singular) {
  switch (s.kind) {
    case SetKind::circle:
    case SetKind::segment: patch_1d(rule, s, y, r, budget, singular); break;
    case SetKind::ball:
      if (s.dim == 1)
        patch_1d(rule, s, y, r, budget, singular);
      else
        patch_ball(rule, s, y, r, budget);
      break;
    case SetKind::sphere2: patch_sphere(rule, s, y, r, budget); break;
    case SetKind::union_of: break;
  }
}

void finish(PatchRule& rule) {
  rule.measure = 0.0;
  for (double w : rule.weights) rule.measure += w;
}

}  // namespace

PatchRule local_patch(const SetModel& set, Vec3 y, double r, std::size_t local_resolution,
                      std::span<const Vec3> singular) {
  if (!(r > 0.0)) throw DomainError("patch radius must be positive");
  PatchRule rule;
  if (set.kind == SetKind::union_of) {
    if (set.components.size() > 1 && !(r < set.separation))
      throw DomainError("patch radius must stay below the union separation");
    patch_primitive(rule, set.components[static_cast<std::size_t>(component_of(set, y))], y, r,
                    local_resolution, singular);
  } else {
    patch_primitive(rule, set, y, r, local_resolution, singular);
  }
  finish(rule);
  if (rule.nodes.empty() || !(rule.measure > 0.0))
    throw ResolutionError("empty local patch at the given resolution");
  return rule;
}

PatchRule whole_set_rule(const SetModel& set, Vec3 y, std::size_t resolution) {
  PatchRule rule;
  const Vec3 single[1] = {y};
  auto add = [&](const SetModel& s, bool own) {
    const Vec3 at = project_primitive(s, y).point;
    const double big = 4.0 * s.bounding_radius() + 1.0;
    patch_primitive(rule, s, at, big, resolution,
                    own ? std::span<const Vec3>(single) : std::span<const Vec3>());
  };
  if (set.kind == SetKind::union_of) {
    const int own = component_of(set, y);
    for (std::size_t k = 0; k < set.components.size(); ++k)
      add(set.components[k], static_cast<int>(k) == own);
  } else {
    add(set, true);
  }
  finish(rule);
  return rule;
}

double patch_measure(const SetModel& set, Vec3 y, double r, std::size_t local_resolution) {
  return local_patch(set, y, r, local_resolution).measure;
}

Vec3 random_point(const SetModel& set, std::mt19937_64& rng) {
  const SetModel* s = &set;
  if (set.kind == SetKind::union_of) {
    const auto k = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(set.components.size()));
    s = &set.components[std::min(k, set.components.size() - 1)];
  }
  switch (s->kind) {
    case SetKind::circle: {
      ChartPoint c;
      c.u[0] = kTwoPi * uniform01(rng);
      return chart_to_point(*s, c);
    }
    case SetKind::sphere2: {
      const double z = 2.0 * uniform01(rng) - 1.0;
      const double phi = kTwoPi * uniform01(rng);
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      return s->center + s->radius * Vec3{rho * std::cos(phi), rho * std::sin(phi), z};
    }
    case SetKind::ball: {
      for (;;) {
        Vec3 v;
        for (int k = 0; k < s->dim; ++k) v[static_cast<std::size_t>(k)] = 2.0 * uniform01(rng) - 1.0;
        if (dot(v, v) <= 1.0) return s->center + s->radius * v;
      }
    }
    case SetKind::segment:
      return s->center + Vec3{s->lo + (s->hi - s->lo) * uniform01(rng), 0.0, 0.0};
    case SetKind::union_of:
      break;
  }
  return {};
}

RegularityProbe regularity_probe(const SetModel& set, std::size_t sample_points,
                                 std::size_t sample_radii, std::uint64_t seed) {
  RegularityProbe probe;
  std::mt19937_64 rng(seed);
  double r_max = set.diameter();
  if (set.kind == SetKind::union_of && set.components.size() > 1)
    r_max = std::min(r_max, set.separation);
  probe.c_est = std::numeric_limits<double>::infinity();
  probe.C_est = 0.0;
  for (std::size_t i = 0; i < sample_points; ++i) {
    const Vec3 y = random_point(set, rng);
    const double d = chart_component(set, component_of(set, y)).hausdorff_dim();
    for (std::size_t k = 0; k < sample_radii; ++k) {
      const double frac = static_cast<double>(k + 1) / static_cast<double>(sample_radii);
      const double r = 0.999 * r_max * std::pow(10.0, -3.0 * frac);
      const double m = patch_measure(set, y, r, 400);
      const double ratio = m / std::pow(r, d);
      probe.table.push_back({y, r, m, ratio});
      probe.c_est = std::min(probe.c_est, ratio);
      probe.C_est = std::max(probe.C_est, ratio);
    }
  }
  return probe;
}

}  // namespace polar
