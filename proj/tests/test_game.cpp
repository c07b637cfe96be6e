#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>

#include "polar/errors.hpp"
#include "polar/game.hpp"

using namespace polar;

namespace {

const KernelSpec riesz = KernelSpec::riesz(0.5);

PayoffMatrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> rows(r, std::vector<double>(c));
  for (auto& row : rows)
    for (double& v : row) v = 0.05 + uniform01(rng);
  return PayoffMatrix::from_rows(rows);
}

double sum(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST_CASE("two by two circle payoff from chord lengths") {
  const PayoffMatrix m = build_payoff(riesz, SetModel::circle(1.0), 2, 2);
  REQUIRE(m.rows == 2);
  REQUIRE(m.cols == 2);
  // Support at angles 0 and pi, constraints at pi/2 and 3pi/2: every chord is sqrt 2.
  for (double v : m.entries) CHECK(v == doctest::Approx(std::pow(2.0, -0.25)).epsilon(1e-14));
  CHECK_FALSE(m.cap_applied);
}

TEST_CASE("gaussian segment payoff lies in (0, 1]") {
  const PayoffMatrix m = build_payoff(KernelSpec::gaussian(1.0), SetModel::segment(0, 1), 3, 3);
  for (double v : m.entries) {
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("coincident meshes hit the diagonal guard") {
  PayoffOptions opts;
  opts.coincident_meshes = true;
  try {
    build_payoff(riesz, SetModel::circle(1.0), 16, 16, opts);
    FAIL("expected a construction error");
  } catch (const ConstructionError& e) {
    CHECK(std::string(e.what()).find("diagonal infinity") != std::string::npos);
  }
  opts.cap_diagonal = true;
  const PayoffMatrix capped = build_payoff(riesz, SetModel::circle(1.0), 16, 16, opts);
  CHECK(capped.cap_applied);
  const double h = 2.0 * std::sin(std::numbers::pi / 16.0);
  CHECK(*std::max_element(capped.entries.begin(), capped.entries.end()) ==
        doctest::Approx(kernel_value(riesz, h / 2)));
  // Bounded kernels never need the cap.
  opts.cap_diagonal = false;
  CHECK_NOTHROW(build_payoff(KernelSpec::gaussian(1.0), SetModel::circle(1.0), 8, 8, opts));
}

TEST_CASE("interleaved payoffs are finite and positive on every set") {
  const SetModel sets[] = {SetModel::circle(1.0), SetModel::sphere2(1.0), SetModel::ball(3, 1.0),
                           SetModel::segment(0, 1),
                           SetModel::union_of({SetModel::segment(0, 1), SetModel::segment(2, 3)})};
  for (const SetModel& s : sets) {
    for (PayoffRule rule : {PayoffRule::point, PayoffRule::cell_average}) {
      PayoffOptions o;
      o.rule = rule;
      const PayoffMatrix m = build_payoff(riesz, s, 6, 6, o);
      for (double v : m.entries) {
        CHECK(std::isfinite(v));
        CHECK(v > 0.0);
      }
    }
  }
}

TEST_CASE("fictitious play examples") {
  const GameSolution id = fictitious_play(PayoffMatrix::from_rows({{1, 0}, {0, 1}}), 100000, 1e-6);
  CHECK(id.value == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(id.weights[0] == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(id.duality_gap <= 1e-6);
  CHECK(id.converged);

  const GameSolution one = fictitious_play(PayoffMatrix::from_rows({{2}}), 10, 1e-9);
  CHECK(one.value == 2.0);
  CHECK(one.weights == std::vector<double>{1.0});

  const PayoffMatrix r = random_matrix(10, 10, 42);
  const GameSolution fp = fictitious_play(r, 10'000'000, 1e-6);
  CHECK(std::abs(fp.value - lp_exact_small(r).value) <= 1e-4);
}

TEST_CASE("fictitious play reports non-convergence") {
  const GameSolution g = fictitious_play(random_matrix(30, 30, 7), 20, 1e-12);
  CHECK_FALSE(g.converged);
  CHECK(g.iterations == 20);
  CHECK(g.duality_gap > 0.0);
  CHECK(g.lower <= g.upper);
}

TEST_CASE("simplex examples") {
  CHECK(lp_exact_small(PayoffMatrix::from_rows({{1, 0}, {0, 1}})).value == doctest::Approx(0.5).epsilon(1e-12));
  const GameSolution s = lp_exact_small(PayoffMatrix::from_rows({{3, 1}, {1, 3}}));
  CHECK(s.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.weights[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.duality_gap <= 1e-9);
  CHECK_THROWS_AS(lp_exact_small(random_matrix(201, 3, 1)), SizeError);
}

TEST_CASE("simplex and fictitious play agree on a 16-node circle payoff") {
  const PayoffMatrix m = build_payoff(riesz, SetModel::circle(1.0), 16, 16);
  const GameSolution lp = lp_exact_small(m);
  const GameSolution fp = fictitious_play(m, 1'000'000, 1e-6);
  CHECK(std::abs(lp.value - fp.value) / lp.value <= 0.02);
  CHECK(lp.duality_gap <= 1e-9);
}

TEST_CASE("simplex handles degenerate games") {
  // Duplicate rows and columns, all-equal entries, dominated strategies.
  const PayoffMatrix flat = PayoffMatrix::from_rows({{1, 1, 1}, {1, 1, 1}});
  CHECK(lp_exact_small(flat).value == doctest::Approx(1.0));
  const PayoffMatrix dup = PayoffMatrix::from_rows({{2, 1, 1}, {2, 1, 1}, {0.5, 3, 3}});
  const GameSolution g = lp_exact_small(dup);
  CHECK(g.duality_gap <= 1e-9);
  CHECK(g.value == doctest::Approx(11.0 / 7.0).epsilon(1e-12));  // mix 5/7 on the first row
  CHECK(std::abs(fictitious_play(dup, 1'000'000, 1e-7).value - g.value) <= 1e-5);
}

TEST_CASE("strategies are probability vectors and respect the value bracket") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PayoffMatrix m = random_matrix(5 + seed, 8 + seed, seed);
    for (const GameSolution& g : {lp_exact_small(m), fictitious_play(m, 200000, 1e-5)}) {
      CHECK(std::abs(sum(g.weights) - 1.0) <= 1e-12);
      CHECK(std::abs(sum(g.column_weights) - 1.0) <= 1e-12);
      for (double w : g.weights) CHECK(w >= 0.0);
      double low = 1e300;
      for (std::size_t j = 0; j < m.cols; ++j) {
        double v = 0;
        for (std::size_t i = 0; i < m.rows; ++i) v += g.weights[i] * m(i, j);
        low = std::min(low, v);
      }
      CHECK(low >= g.value - g.duality_gap - 1e-12);
    }
  }
}

TEST_CASE("equalizer polish never worsens the bracket") {
  const PayoffMatrix m = build_payoff(riesz, SetModel::circle(1.0), 64, 64);
  const GameSolution fp = fictitious_play(m, 20000, 1e-9);
  const GameSolution p = polish_equalizer(m, fp);
  CHECK(p.duality_gap <= fp.duality_gap);
  if (p.polished) CHECK(p.duality_gap < 1e-9);
}

TEST_CASE("scale equivariance") {
  const PayoffMatrix m = random_matrix(12, 9, 5);
  PayoffMatrix scaled = m;
  for (double& v : scaled.entries) v *= 3.5;
  const GameSolution a = lp_exact_small(m);
  const GameSolution b = lp_exact_small(scaled);
  CHECK(b.value == doctest::Approx(3.5 * a.value).epsilon(1e-10));
  std::set<std::size_t> sa, sb;
  for (std::size_t i = 0; i < m.rows; ++i) {
    if (a.weights[i] > 1e-9) sa.insert(i);
    if (b.weights[i] > 1e-9) sb.insert(i);
  }
  CHECK(sa == sb);
}

TEST_CASE("continuous polarization on the 3-ball concentrates at the center") {
  const ContinuousResult r = continuous_polarization(riesz, SetModel::ball(3, 1.0), 6);
  CHECK(std::abs(r.t_estimate - 1.0) <= 0.02);
  double near = 0;
  for (std::size_t i = 0; i < r.measure.size(); ++i)
    if (norm(r.measure.atoms[i]) <= 0.1) near += r.measure.weights[i];
  CHECK(near >= 0.9);
}

TEST_CASE("continuous polarization on the segment is internally consistent") {
  GameConfig cfg;
  const ContinuousResult r = continuous_polarization(KernelSpec::gaussian(1.0), SetModel::segment(0, 1), 64, cfg);
  CHECK(r.measure.is_probability(1e-12));
  const double slack = cfg.gap_tol + 0.01 * r.t_estimate;
  CHECK(r.certified >= r.t_estimate - slack);
  CHECK(r.certified <= r.t_estimate + slack);
  for (double w : r.measure.weights) CHECK(w >= cfg.prune);
}

TEST_CASE("weak duality across sets") {
  const SetModel sets[] = {SetModel::circle(1.0), SetModel::segment(0, 1), SetModel::sphere2(1.0)};
  const std::size_t res[] = {64, 64, 6};
  for (std::size_t k = 0; k < 3; ++k) {
    GameConfig cfg;
    const ContinuousResult r = continuous_polarization(riesz, sets[k], res[k], cfg);
    CHECK(r.certified >= r.t_estimate - (cfg.gap_tol + 0.01 * r.t_estimate));
  }
}

TEST_CASE("circle estimates stabilize with resolution") {
  std::vector<double> t;
  for (std::size_t res : {32u, 64u, 128u, 256u})
    t.push_back(continuous_polarization(riesz, SetModel::circle(1.0), res).t_estimate);
  CHECK(std::abs(t[3] - t[2]) / t[3] < 0.01);
}

TEST_CASE("game solution json") {
  const GameSolution g = lp_exact_small(PayoffMatrix::from_rows({{1, 0}, {0, 1}}));
  const auto j = to_json(g);
  CHECK(j.at("value").get<double>() == doctest::Approx(0.5));
  CHECK(j.at("weights").size() == 2);
}
