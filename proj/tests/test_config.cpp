#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>

#include "polar/config.hpp"
#include "polar/errors.hpp"

using namespace polar;
using nlohmann::json;

namespace {

std::string error_of(const json& j) {
  try {
    parse_run_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

json circle_riesz() {
  return json::parse(R"({"kernel": {"family": "riesz", "s": 0.5}, "set": {"kind": "circle"}})");
}

}  // namespace

TEST_CASE("minimal config fills defaults") {
  const RunConfig c = parse_run_config(circle_riesz());
  CHECK(c.kernel.family == KernelFamily::riesz);
  CHECK(c.set.kind == SetKind::circle);
  CHECK(c.n == 4);
  CHECK(c.solver.restarts == 16);
  CHECK(c.game.payoff.rule == PayoffRule::cell_average);
  CHECK(c.game_resolution > 0);
  CHECK(c.n_list == std::vector<std::size_t>{1, 2, 4, 8, 16});
}

TEST_CASE("unknown keys are rejected with their path") {
  json j = circle_riesz();
  j["sovler"] = json::object();
  CHECK(error_of(j).find("'sovler'") != std::string::npos);

  j = circle_riesz();
  j["verify"]["continuity"]["schem"] = "constant";
  CHECK(error_of(j).find("verify.continuity.schem") != std::string::npos);

  j = circle_riesz();
  j["set"]["radious"] = 2.0;
  CHECK(error_of(j).find("set.radious") != std::string::npos);
}

TEST_CASE("type and value errors") {
  json j = circle_riesz();
  j["n"] = -3;
  CHECK(error_of(j).find("non-negative integer") != std::string::npos);
  j = circle_riesz();
  j["game"]["payoff_rule"] = "median";
  CHECK(error_of(j).find("unknown value 'median'") != std::string::npos);
  j = circle_riesz();
  j["set"]["kind"] = "torus";
  CHECK(error_of(j).find("torus") != std::string::npos);
  j = circle_riesz();
  j.erase("kernel");
  CHECK_FALSE(error_of(j).empty());
  j = circle_riesz();
  j["solver"]["beta0"] = 1e5;
  CHECK_FALSE(error_of(j).empty());
}

TEST_CASE("admissibility is checked before any computation") {
  json j = circle_riesz();
  j["kernel"]["s"] = 1.0;  // s must stay below d = 1
  CHECK(error_of(j).find("not admissible") != std::string::npos);
  j = circle_riesz();
  j["kernel"] = {{"family", "log"}, {"c", 2.0}};  // c must exceed the diameter 2
  CHECK(error_of(j).find("not admissible") != std::string::npos);
  j["kernel"]["c"] = 2.5;
  CHECK(error_of(j).empty());
}

TEST_CASE("echo round trips") {
  json j = circle_riesz();
  j["seed"] = 42;
  j["solver"] = {{"restarts", 3}, {"method", "best_response"}};
  j["game"] = {{"gap_tol", 1e-5}};
  j["verify"] = {{"n_list", {1, 2}}, {"ratio", {{"radii", {0.1, 0.01}}}}};
  j["tolerances"] = {{"continuity", 0.05}};
  const RunConfig a = parse_run_config(j);
  const json e = echo(a);
  const RunConfig b = parse_run_config(e);
  CHECK(echo(b) == e);
  CHECK(b.solver.restarts == 3);
  CHECK(b.solver.seed == 42);
  CHECK(b.ratio.seed == 42);
  CHECK(b.continuity.tol.continuity == 0.05);
  CHECK(b.game.gap_tol == 1e-5);
  CHECK_FALSE(e.contains("output_dir"));
}

TEST_CASE("set and kernel json") {
  const SetModel u = SetModel::union_of({SetModel::segment(0, 1), SetModel::segment(2, 3)});
  const SetModel back = set_from_json(to_json(u));
  CHECK(back.kind == SetKind::union_of);
  CHECK(back.components.size() == 2);
  CHECK(back.components[1].lo == 2.0);
  const KernelSpec k = KernelSpec::log_power(0.5, 3.0, 1.5);
  const KernelSpec kb = kernel_from_json(to_json(k));
  CHECK(kb.family == KernelFamily::log_power);
  CHECK(kb.alpha == 1.5);
  CHECK(set_from_json(json::parse(R"({"kind": "ball", "dim": 2})")).dim == 2);
  CHECK_THROWS_AS(set_from_json(json::parse(R"({"kind": "ball", "dim": 4})")), ConfigError);
}

TEST_CASE("infinities serialize as strings") {
  json j = {{"a", std::numeric_limits<double>::infinity()},
            {"b", {1.0, -std::numeric_limits<double>::infinity()}},
            {"c", {{"d", std::nan("")}}},
            {"e", 2.5}};
  replace_nonfinite(j);
  CHECK(j["a"] == "inf");
  CHECK(j["b"][1] == "-inf");
  CHECK(j["c"]["d"] == "nan");
  CHECK(j["e"] == 2.5);
}

TEST_CASE("toy matrix mode") {
  json j = json::parse(R"({"kernel": {"family": "gaussian", "c": 1.0}, "set": {"kind": "segment"},
                           "game": {"solver": "simplex", "matrix": [[1, 0], [0, 1]]}})");
  const RunConfig c = parse_run_config(j);
  REQUIRE(c.toy_matrix.has_value());
  CHECK(c.toy_matrix->size() == 2);
  j["game"]["matrix"] = {{1, 0}, {0}};
  CHECK_FALSE(error_of(j).empty());
}

TEST_CASE("loading a missing file is a config error") {
  CHECK_THROWS_AS(load_run_config("/nonexistent/config.json"), ConfigError);
}
