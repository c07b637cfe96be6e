#include <doctest.h>

#include <cmath>
#include <random>

#include "polar/errors.hpp"
#include "polar/kernels.hpp"

using namespace polar;

TEST_CASE("riesz evaluation and the infinity token") {
  const KernelSpec k = KernelSpec::riesz(0.5);
  CHECK(kernel_eval(k, 4.0).value() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(kernel_eval(k, 0.0).is_infinite());
  CHECK(kernel_eval(k, 0.0).to_string() == "inf");
  CHECK_THROWS_AS(kernel_eval(k, -1.0), DomainError);
}

TEST_CASE("gaussian is bounded at the diagonal") {
  const KernelSpec k = KernelSpec::gaussian(1.0);
  CHECK(kernel_eval(k, 0.0).is_finite());
  CHECK(kernel_eval(k, 0.0).value() == 1.0);
  CHECK(kernel_eval(k, 2.0).value() == doctest::Approx(std::exp(-4.0)));
}

TEST_CASE("log kernels reject t >= c") {
  CHECK(kernel_eval(KernelSpec::log(4.0), 2.0).value() == doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(kernel_eval(KernelSpec::log(4.0), 4.0), DomainError);
  CHECK_THROWS_AS(kernel_eval(KernelSpec::log_power(0.5, 3.0, 2.0), 5.0), DomainError);
  CHECK(kernel_eval(KernelSpec::log(4.0), 0.0).is_infinite());
}

TEST_CASE("inverse examples") {
  CHECK(kernel_inverse(KernelSpec::riesz(0.5), 0.5) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(kernel_inverse(KernelSpec::riesz(1.0), 10.0) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(kernel_inverse(KernelSpec::log(4.0), std::log(2.0)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(kernel_inverse(KernelSpec::riesz(0.5), -1.0), DomainError);
  CHECK_THROWS_AS(kernel_inverse(KernelSpec::gaussian(1.0), 1.5), DomainError);
}

TEST_CASE("inverse round trip within 1e-12 across families") {
  const KernelSpec specs[] = {KernelSpec::riesz(0.3), KernelSpec::riesz(1.7), KernelSpec::log(3.0),
                              KernelSpec::log_power(0.5, 3.0, 1.5), KernelSpec::gaussian(2.0)};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> t(1e-4, 2.5);
  for (const KernelSpec& k : specs) {
    for (int i = 0; i < 500; ++i) {
      const double u = kernel_value(k, t(rng));
      const double back = kernel_value(k, kernel_inverse(k, u));
      CHECK(std::abs(back - u) / u <= 1e-12);
    }
  }
}

TEST_CASE("admissibility on a set") {
  CHECK_NOTHROW(check_admissible(KernelSpec::riesz(0.5), 1.0, 2.0));
  CHECK_THROWS_AS(check_admissible(KernelSpec::riesz(1.0), 1.0, 2.0), DomainError);
  CHECK_THROWS_AS(check_admissible(KernelSpec::riesz(0.0), 1.0, 2.0), DomainError);
  CHECK_THROWS_AS(check_admissible(KernelSpec::log(2.0), 1.0, 2.0), DomainError);
  CHECK_NOTHROW(check_admissible(KernelSpec::log(2.5), 1.0, 2.0));
  CHECK_THROWS_AS(check_admissible(KernelSpec::gaussian(0.0), 1.0, 2.0), DomainError);
}

TEST_CASE("riesz-like witness checks") {
  SUBCASE("s=0.5, d=1, eps=0.25 passes") {
    const auto r = verify_riesz_like(KernelSpec::riesz(0.5), {1.0, 0.25, 1.0});
    CHECK(r.pass);
    CHECK(r.limit_at_zero.is_finite());
    CHECK(r.limit_at_zero.value() == 0.0);
  }
  SUBCASE("s=0.9, d=1, eps=0.5 fails") {
    const auto r = verify_riesz_like(KernelSpec::riesz(0.9), {1.0, 0.5, 1.0});
    CHECK_FALSE(r.pass);
    CHECK(r.limit_at_zero.is_infinite());
  }
  SUBCASE("log c=4, d=1, eps=0.5") {
    // g(t) = t^{1/2} log(4/t) has g' = t^{-1/2} (log(4/t)/2 - 1), which turns
    // negative past t = 4/e^2 ~ 0.541. On (0, 1] the check must fail; on
    // (0, 0.5] it must pass.
    const KernelSpec k = KernelSpec::log(4.0);
    const auto full = verify_riesz_like(k, {1.0, 0.5, 1.0});
    CHECK_FALSE(full.pass);
    CHECK(full.worst_at > 4.0 / std::exp(2.0));
    CHECK(verify_riesz_like(k, {1.0, 0.5, 0.5}).pass);
  }
  SUBCASE("malformed witnesses are reported, not thrown") {
    CHECK_FALSE(verify_riesz_like(KernelSpec::riesz(0.5), {1.0, 1.5, 1.0}).pass);
    CHECK_FALSE(verify_riesz_like(KernelSpec::riesz(0.5), {1.0, 0.25, 1.0}, 1).pass);
  }
}

TEST_CASE("default witnesses pass for admissible parameters") {
  for (double s : {0.1, 0.5, 0.9})
    CHECK(verify_riesz_like(KernelSpec::riesz(s), default_witness(KernelSpec::riesz(s), 1.0, 2.0)).pass);
  for (double s : {0.5, 1.5, 2.9})
    CHECK(verify_riesz_like(KernelSpec::riesz(s), default_witness(KernelSpec::riesz(s), 3.0, 2.0)).pass);
  const KernelSpec lg = KernelSpec::log(4.0);
  CHECK(verify_riesz_like(lg, default_witness(lg, 1.0, 2.0)).pass);
  const KernelSpec lp = KernelSpec::log_power(0.5, 3.0, 2.0);
  CHECK(verify_riesz_like(lp, default_witness(lp, 1.0, 2.0)).pass);
  const KernelSpec g = KernelSpec::gaussian(1.0);
  CHECK(verify_riesz_like(g, default_witness(g, 1.0, 1.0)).pass);
}

TEST_CASE("strict monotonicity up to the diameter") {
  const KernelSpec specs[] = {KernelSpec::riesz(0.5), KernelSpec::log(2.5),
                              KernelSpec::log_power(0.2, 2.5, 2.0), KernelSpec::gaussian(1.0)};
  for (const KernelSpec& k : specs) {
    double prev = kernel_value(k, 1e-6);
    for (int i = 1; i <= 2000; ++i) {
      const double t = 1e-6 + 2.0 * i / 2000.0;
      const double v = kernel_value(k, t);
      CHECK(v < prev);
      prev = v;
    }
  }
}
