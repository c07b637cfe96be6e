#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "polar/errors.hpp"
#include "polar/verify.hpp"

using namespace polar;

namespace {

const KernelSpec riesz = KernelSpec::riesz(0.5);
const SetModel circle = SetModel::circle(1.0);

const Assertion& find(const SuiteReport& r, const std::string& name) {
  const auto it = std::find_if(r.assertions.begin(), r.assertions.end(),
                               [&](const Assertion& a) { return a.name == name; });
  REQUIRE(it != r.assertions.end());
  return *it;
}

bool has(const SuiteReport& r, const std::string& name) {
  return std::any_of(r.assertions.begin(), r.assertions.end(),
                     [&](const Assertion& a) { return a.name == name; });
}

SweepConfig small_sweep(std::vector<std::size_t> n_list) {
  SweepConfig c;
  c.n_list = std::move(n_list);
  c.solver.restarts = 2;
  c.solver.seed = 1;
  return c;
}

}  // namespace

TEST_CASE("ohtsuka sweep on the ball sees the center for every N") {
  SweepConfig c = small_sweep({1, 2});
  c.game_resolution = 4;
  const SuiteReport r = ohtsuka_sweep(riesz, SetModel::ball(3, 1.0), c);
  for (double p : r.table.column("P_hat")) CHECK(p == doctest::Approx(1.0).epsilon(0.01));
  for (double t : r.table.column("T_hat")) CHECK(t == doctest::Approx(1.0).epsilon(0.02));
  CHECK(r.passed());
}

TEST_CASE("ohtsuka sweep on the segment with a gaussian kernel") {
  const SuiteReport r = ohtsuka_sweep(KernelSpec::gaussian(1.0), SetModel::segment(0, 1), small_sweep({1, 2, 4}));
  REQUIRE(r.table.rows.size() == 3);
  CHECK(find(r, "gap_trend").pass);
  CHECK(find(r, "continuous_certificate").pass);
  const auto p = r.table.column("P_hat");
  CHECK(p.front() <= p.back() + 1e-9);
}

TEST_CASE("continuity with a constant sequence has a zero difference column") {
  ContinuityConfig c;
  c.scheme = ApproxScheme::constant;
  c.n_list = {8, 16, 32};
  const SuiteReport r = continuity_check(riesz, circle, c);
  for (double d : r.table.column("abs_diff")) CHECK(d == 0.0);
  for (double d : r.table.column("discrepancy")) CHECK(d == 0.0);
  CHECK(r.passed());
}

TEST_CASE("continuity on the segment with dyadic midpoints") {
  ContinuityConfig c;
  c.scheme = ApproxScheme::dyadic_midpoint;
  c.n_list = {16, 32, 64};
  const SuiteReport r = continuity_check(riesz, SetModel::segment(0, 1), c);
  const auto d = r.table.column("rel_diff");
  for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i] < d[i - 1]);
  CHECK(find(r, "difference_decreases").pass);
  CHECK(has(r, "minimum_principle_N64"));
}

TEST_CASE("continuity limit on the circle is the quadrature constant") {
  ContinuityConfig c;
  c.n_list = {16, 32};
  const SuiteReport r = continuity_check(riesz, circle, c);
  CHECK(r.info.at("P_nu").get<double>() == doctest::Approx(1.1803405990160516).epsilon(1e-6));
}

TEST_CASE("limit measure with a single N has no trend assertions") {
  SweepConfig c = small_sweep({2});
  c.game_resolution = 64;
  const SuiteReport r = limit_measure_check(KernelSpec::gaussian(1.0), SetModel::segment(0, 1), c);
  CHECK(r.table.rows.size() == 1);
  CHECK(r.assertions.empty());
}

TEST_CASE("limit measure on the ball converges to the point mass") {
  SweepConfig c = small_sweep({1, 2});
  c.game_resolution = 4;
  const SuiteReport r = limit_measure_check(riesz, SetModel::ball(3, 1.0), c);
  for (double d : r.table.column("discrepancy")) CHECK(d <= 0.05);
  for (double g : r.table.column("gap")) CHECK(g <= 0.02);
}

TEST_CASE("ratio scan on the circle respects the case 1 bound") {
  RatioScanConfig c;
  c.samples = 200;
  c.seed = 2;
  const SuiteReport r = ratio_bound_scan(riesz, circle, c);
  CHECK(r.table.rows.size() == 5);
  const Assertion& case1 = find(r, "case1_bound");
  CHECK(case1.pass);
  CHECK(case1.threshold == doctest::Approx(std::pow(2.0, 0.75) + 1e-3));
  CHECK(find(r, "c0_finite").pass);
}

TEST_CASE("ratio scan rejects radii at or above diam / 10") {
  RatioScanConfig c;
  c.radii = {0.2};
  CHECK_THROWS(ratio_bound_scan(riesz, circle, c));
}

TEST_CASE("lebesgue scan on the 64-atom circle measure") {
  LebesgueConfig c;
  const SuiteReport r = lebesgue_point_scan(riesz, circle, lebesgue_default_measure(circle, 64), c);
  CHECK(find(r, "error_at_smallest_radius").pass);
  CHECK(find(r, "atoms_increasing").pass);
  const auto radii = r.table.column("r");
  CHECK(*std::min_element(radii.begin(), radii.end()) <= circle.diameter() / 1000.0);
}

TEST_CASE("lebesgue scan with a bounded kernel") {
  LebesgueConfig c;
  c.atoms = 16;
  c.atom_points = 2;
  const SuiteReport r = lebesgue_point_scan(KernelSpec::gaussian(1.0), circle, lebesgue_default_measure(circle, 16), c);
  CHECK(r.passed());
}

TEST_CASE("minimum principle shadow for a single atom") {
  const Assertion a = minimum_principle_shadow(riesz, counting_measure({{{1, 0, 0}}}), circle, 64, 1e-3);
  CHECK(a.pass);
  CHECK(a.observed <= 1e-12);
}

TEST_CASE("solver agreement on random matrices") {
  const SuiteReport r = solver_agreement(20, 50, 9);
  CHECK(r.table.rows.size() == 20);
  CHECK(find(r, "value_agreement").pass);
  CHECK(find(r, "simplex_gap").pass);
}

TEST_CASE("reports serialize and tables export") {
  const SuiteReport r = solver_agreement(3, 5, 1);
  const auto j = r.to_json();
  CHECK(j.at("suite") == "solver_agreement");
  CHECK(j.at("passed").get<bool>() == r.passed());
  const std::string csv = r.table.to_csv();
  CHECK(csv.rfind("index,rows,cols,fp_value,lp_value,diff,lp_gap\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  const std::string svg = svg_loglog(r.table, "rows", {"lp_value"}, "values");
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("tolerances json lists every field") {
  CHECK(to_json(Tolerances{}).size() == 10);
  CHECK(approx_scheme_from_string("dyadic_midpoint") == ApproxScheme::dyadic_midpoint);
  CHECK_THROWS(approx_scheme_from_string("random"));
}
