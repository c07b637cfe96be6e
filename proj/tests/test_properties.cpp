// Randomized checks of invariants over generated sets, kernels and measures.
// Every generator is seeded, so a failure replays exactly.
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "polar/game.hpp"
#include "polar/potentials.hpp"
#include "polar/verify.hpp"

using namespace polar;

namespace {

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double a, double b) { return a + (b - a) * uniform01(rng); }
  std::size_t pick(std::size_t lo, std::size_t hi) { return lo + rng() % (hi - lo + 1); }

  SetModel set() {
    switch (rng() % 5) {
      case 0: return SetModel::circle(uniform(0.5, 2.0));
      case 1: return SetModel::sphere2(uniform(0.5, 2.0));
      case 2: return SetModel::ball(static_cast<int>(pick(1, 3)), uniform(0.5, 2.0));
      case 3: {
        const double lo = uniform(-1.0, 1.0);
        return SetModel::segment(lo, lo + uniform(0.5, 2.0));
      }
      default: return SetModel::union_of({SetModel::segment(0, 1), SetModel::segment(2, 2 + uniform(0.5, 1.5))});
    }
  }

  // Random weights (not uniform) on n random points of `s`.
  DiscreteMeasure measure(const SetModel& s, std::size_t n) {
    DiscreteMeasure mu;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mu.atoms.push_back(random_point(s, rng));
      mu.weights.push_back(uniform(0.1, 1.0));
      total += mu.weights.back();
    }
    for (double& w : mu.weights) w /= total;
    return mu;
  }

  PayoffMatrix matrix(std::size_t r, std::size_t c) {
    std::vector<std::vector<double>> rows(r, std::vector<double>(c));
    for (auto& row : rows)
      for (double& v : row) v = uniform(0.0, 1.0);
    return PayoffMatrix::from_rows(rows);
  }
};

double min_distance(const DiscreteMeasure& mu, Vec3 y) {
  double d = 1e300;
  for (const Vec3& a : mu.atoms) d = std::min(d, distance(a, y));
  return d;
}

}  // namespace

TEST_CASE("riesz kernels are riesz-like with eps = (d - s) / 2") {
  Gen g(101);
  for (int trial = 0; trial < 60; ++trial) {
    const double d = static_cast<double>(g.pick(1, 3));
    const double s = g.uniform(0.02, 0.98) * d;
    const double t_eps = g.uniform(0.1, 4.0);
    CAPTURE(d);
    CAPTURE(s);
    CHECK(verify_riesz_like(KernelSpec::riesz(s), {d, (d - s) / 2.0, t_eps}).pass);
  }
}

TEST_CASE("mesh weights converge to the Hausdorff measure") {
  Gen g(102);
  for (int trial = 0; trial < 10; ++trial) {
    const SetModel s = g.set();
    CAPTURE(to_string(s.kind));
    double prev = std::abs(make_mesh(s, 8).total_weight() - s.measure()) / s.measure();
    for (std::size_t k : {16u, 32u}) {
      const double err = std::abs(make_mesh(s, k).total_weight() - s.measure()) / s.measure();
      CHECK(err <= 0.5 * prev + 1e-12);
      prev = err;
    }
  }
}

TEST_CASE("regularity ratios stay in a fixed band down to diam / 1000") {
  Gen g(103);
  for (int trial = 0; trial < 8; ++trial) {
    const SetModel s = g.set();
    const RegularityProbe p = regularity_probe(s, 6, 12, g.rng());
    CAPTURE(to_string(s.kind));
    CHECK(p.c_est > 0.05);
    CHECK(p.C_est < 20.0);
    const auto smallest = std::min_element(p.table.begin(), p.table.end(),
                                           [](const auto& a, const auto& b) { return a.r < b.r; });
    CHECK(smallest->r <= s.diameter() / 1000.0 * (1.0 + 1e-9));
  }
}

TEST_CASE("potentials are linear in the measure") {
  Gen g(104);
  const KernelSpec kernels[] = {KernelSpec::riesz(0.5), KernelSpec::log(10.0), KernelSpec::gaussian(1.3)};
  for (int trial = 0; trial < 30; ++trial) {
    const SetModel s = g.set();
    const KernelSpec& k = kernels[trial % 3];
    const DiscreteMeasure mu = g.measure(s, g.pick(1, 6));
    const DiscreteMeasure nu = g.measure(s, g.pick(1, 6));
    const double a = g.uniform(0.1, 3.0);
    const double b = g.uniform(0.1, 3.0);
    DiscreteMeasure mix;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      mix.atoms.push_back(mu.atoms[i]);
      mix.weights.push_back(a * mu.weights[i]);
    }
    for (std::size_t i = 0; i < nu.size(); ++i) {
      mix.atoms.push_back(nu.atoms[i]);
      mix.weights.push_back(b * nu.weights[i]);
    }
    const Vec3 y = random_point(s, g.rng);
    const double lhs = potential(k, mix, y).value();
    const double rhs = a * potential(k, mu, y).value() + b * potential(k, nu, y).value();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("refined polarization does not grow with resolution for bounded kernels") {
  Gen g(105);
  const KernelSpec k = KernelSpec::gaussian(2.0);
  for (int trial = 0; trial < 12; ++trial) {
    const SetModel s = trial % 2 ? SetModel::circle(1.0) : SetModel::segment(0, 1);
    const DiscreteMeasure mu = g.measure(s, g.pick(1, 5));
    const double coarse = polarization(k, mu, s, 64, true).value.value();
    const double fine = polarization(k, mu, s, 128, true).value.value();
    CHECK(fine <= coarse + 1e-8);
  }
}

TEST_CASE("descent along converging measures and points") {
  // mu_n: n-node meshes on the circle converge to the uniform measure, and
  // y_n -> y. Past the transient the potentials never undercut the limit.
  Gen g(106);
  const SetModel circle = SetModel::circle(1.0);
  for (double c : {0.5, 2.0}) {
    const KernelSpec k = KernelSpec::gaussian(c);
    for (int trial = 0; trial < 5; ++trial) {
      const double t = g.uniform(0.0, 6.28);
      const Vec3 y{std::cos(t), std::sin(t), 0.0};
      const double limit = hausdorff_potential(k, circle, y);
      double tail = 1e300;
      for (std::size_t n : {256u, 512u, 1024u}) {
        const double tn = t + 1.0 / static_cast<double>(n * n);
        const DiscreteMeasure mu_n = mesh_measure(make_mesh(circle, n, g.uniform(0.0, 0.99)));
        tail = std::min(tail, potential(k, mu_n, {std::cos(tn), std::sin(tn), 0.0}).value());
      }
      CHECK(tail >= limit - 1e-6);
    }
  }
}

TEST_CASE("finite-potential points are Lebesgue points") {
  Gen g(107);
  const KernelSpec k = KernelSpec::riesz(0.5);
  const SetModel sets[] = {SetModel::circle(1.0), SetModel::segment(0, 1), SetModel::sphere2(1.0)};
  for (int trial = 0; trial < 12; ++trial) {
    const SetModel& s = sets[trial % 3];
    const DiscreteMeasure mu = g.measure(s, g.pick(1, 20));
    Vec3 y = random_point(s, g.rng);
    while (min_distance(mu, y) < 0.05 * s.diameter()) y = random_point(s, g.rng);
    const double u = potential(k, mu, y).value();
    const double phi = lebesgue_average(k, mu, s, y, s.diameter() / 1000.0).value();
    CAPTURE(to_string(s.kind));
    CHECK(std::abs(phi - u) / u < 0.01);
  }
}

TEST_CASE("fictitious play agrees with the simplex up to 200 x 200") {
  Gen g(108);
  for (auto [r, c] : {std::pair{40, 70}, {120, 90}, {200, 200}}) {
    const PayoffMatrix m = g.matrix(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    const GameSolution lp = lp_exact_small(m);
    const GameSolution fp = fictitious_play(m, 20'000'000, 2e-5);
    CAPTURE(r);
    CHECK(lp.duality_gap <= 1e-9);
    CHECK(std::abs(fp.value - lp.value) <= 1e-4);
  }
}

TEST_CASE("minimum principle shadow holds for random discrete measures") {
  Gen g(109);
  const KernelSpec k = KernelSpec::riesz(0.5);
  const SetModel sets[] = {SetModel::circle(1.0), SetModel::segment(0, 1), SetModel::sphere2(1.0)};
  for (int trial = 0; trial < 9; ++trial) {
    const SetModel& s = sets[trial % 3];
    const DiscreteMeasure mu = g.measure(s, g.pick(1, 8));
    const std::size_t res = s.chart_dim() == 1 ? 512 : 64;
    const Assertion a = minimum_principle_shadow(k, mu, s, res, 1e-3);
    CAPTURE(to_string(s.kind));
    CAPTURE(a.observed);
    CHECK(a.pass);
  }
}
