#include "polar/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "polar/errors.hpp"

namespace polar {

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::riesz: return "riesz";
    case KernelFamily::log: return "log";
    case KernelFamily::log_power: return "log_power";
    case KernelFamily::gaussian: return "gaussian";
  }
  return "?";
}

KernelFamily kernel_family_from_string(std::string_view name) {
  if (name == "riesz") return KernelFamily::riesz;
  if (name == "log") return KernelFamily::log;
  if (name == "log_power") return KernelFamily::log_power;
  if (name == "gaussian") return KernelFamily::gaussian;
  throw DomainError("unknown kernel family '" + std::string(name) + "'");
}

KernelSpec KernelSpec::riesz(double s) { return {KernelFamily::riesz, s, 1.0, 1.0}; }
KernelSpec KernelSpec::log(double c) { return {KernelFamily::log, 0.0, c, 1.0}; }
KernelSpec KernelSpec::log_power(double s, double c, double alpha) {
  return {KernelFamily::log_power, s, c, alpha};
}
KernelSpec KernelSpec::gaussian(double c) { return {KernelFamily::gaussian, 0.0, c, 1.0}; }

namespace {

void check_parameters(const KernelSpec& k) {
  switch (k.family) {
    case KernelFamily::riesz:
      if (!(k.s > 0.0)) throw DomainError("riesz kernel needs s > 0");
      break;
    case KernelFamily::log:
      if (!(k.c > 0.0)) throw DomainError("log kernel needs c > 0");
      break;
    case KernelFamily::log_power:
      if (!(k.s > 0.0) || !(k.c > 0.0) || !(k.alpha > 0.0))
        throw DomainError("log_power kernel needs s > 0, c > 0, alpha > 0");
      break;
    case KernelFamily::gaussian:
      if (!(k.c > 0.0)) throw DomainError("gaussian kernel needs c > 0");
      break;
  }
}

// Solves f(t) = u on (0, c) for the log_power family by bisection in log t.
double invert_log_power(const KernelSpec& k, double u) {
  double lo = std::log(k.c) - 800.0;  // f(lo) astronomically large
  double hi = std::log(k.c);          // f -> 0 as t -> c
  for (int it = 0; it < 4000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double t = std::exp(mid);
    if (kernel_value(k, t) > u)
      lo = mid;
    else
      hi = mid;
  }
  const double t_lo = std::exp(lo);
  const double t_hi = std::exp(hi);
  return std::abs(kernel_value(k, t_lo) - u) <= std::abs(kernel_value(k, t_hi) - u) ? t_lo : t_hi;
}

}  // namespace

double kernel_value(const KernelSpec& k, double t) {
  switch (k.family) {
    case KernelFamily::riesz:
      return k.s == 0.5 ? 1.0 / std::sqrt(t) : std::pow(t, -k.s);
    case KernelFamily::log:
      return std::log(k.c / t);
    case KernelFamily::log_power:
      return std::pow(t, -k.s) * std::pow(std::log(k.c / t), k.alpha);
    case KernelFamily::gaussian:
      return std::exp(-k.c * t * t);
  }
  return 0.0;
}

Extended kernel_eval(const KernelSpec& k, double t) {
  check_parameters(k);
  if (!(t >= 0.0)) throw DomainError("kernel argument must be nonnegative");
  if (t == 0.0) return k.unbounded() ? Extended::infinity() : Extended(1.0);
  if ((k.family == KernelFamily::log || k.family == KernelFamily::log_power) && t >= k.c)
    throw DomainError("log kernel evaluated at t >= c, where f is not positive");
  return kernel_value(k, t);
}

double kernel_inverse(const KernelSpec& k, double u) {
  check_parameters(k);
  if (!(u > 0.0) || !std::isfinite(u)) throw DomainError("kernel_inverse needs a finite u > 0");
  switch (k.family) {
    case KernelFamily::riesz:
      return std::pow(u, -1.0 / k.s);
    case KernelFamily::log:
      return k.c * std::exp(-u);
    case KernelFamily::log_power:
      return invert_log_power(k, u);
    case KernelFamily::gaussian:
      if (!(u < 1.0)) throw DomainError("gaussian kernel takes values in (0, 1) for t > 0");
      return std::sqrt(-std::log(u) / k.c);
  }
  return 0.0;
}

void check_admissible(const KernelSpec& k, double d, double diam) {
  check_parameters(k);
  if ((k.family == KernelFamily::riesz || k.family == KernelFamily::log_power) && !(k.s < d))
    throw DomainError("kernel exponent s must satisfy s < d (got s=" + std::to_string(k.s) +
                      ", d=" + std::to_string(d) + ")");
  if ((k.family == KernelFamily::log || k.family == KernelFamily::log_power) && !(k.c > diam))
    throw DomainError("log kernels need c > diam(A) (got c=" + std::to_string(k.c) +
                      ", diam=" + std::to_string(diam) + ")");
}

RieszLikeWitness default_witness(const KernelSpec& k, double d, double diam) {
  switch (k.family) {
    case KernelFamily::riesz:
      return {d, 0.5 * (d - k.s), diam};
    case KernelFamily::log: {
      // t^{d/2} log(c/t) increases exactly while t < c e^{-2/d}.
      const double eps = 0.5 * d;
      return {d, eps, std::min(1.0, k.c * std::exp(-1.0 / (d - eps)))};
    }
    case KernelFamily::log_power: {
      const double eps = 0.5 * (d - k.s);
      return {d, eps, std::min(1.0, k.c * std::exp(-k.alpha / (d - eps - k.s)))};
    }
    case KernelFamily::gaussian: {
      const double eps = 0.5 * d;
      return {d, eps, std::min(diam, std::sqrt((d - eps) / (2.0 * k.c)))};
    }
  }
  return {};
}

RieszLikeReport verify_riesz_like(const KernelSpec& k, const RieszLikeWitness& w,
                                  std::size_t grid_size) {
  RieszLikeReport report;
  report.grid_size = grid_size;
  if (!(w.epsilon > 0.0 && w.epsilon < w.d) || !(w.t_eps > 0.0) || grid_size < 2) {
    report.pass = false;
    report.worst_decrease = 1.0;
    return report;
  }
  const double power = w.d - w.epsilon;

  const double singular = (k.family == KernelFamily::riesz || k.family == KernelFamily::log_power)
                              ? k.s
                              : 0.0;
  const double exponent = power - singular;
  if (exponent > 0.0)
    report.limit_at_zero = 0.0;
  else if (exponent == 0.0 && k.family == KernelFamily::riesz)
    report.limit_at_zero = 1.0;
  else
    report.limit_at_zero = Extended::infinity();

  const double t_min = w.t_eps * 1e-10;
  const double ratio = std::pow(w.t_eps / t_min, 1.0 / static_cast<double>(grid_size - 1));
  double prev = 0.0;
  report.pass = true;
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double t = i + 1 == grid_size ? w.t_eps : t_min * std::pow(ratio, static_cast<double>(i));
    if ((k.family == KernelFamily::log || k.family == KernelFamily::log_power) && t >= k.c) {
      report.pass = false;
      report.worst_at = t;
      report.worst_decrease = 1.0;
      break;
    }
    const double g = std::pow(t, power) * kernel_value(k, t);
    if (i > 0) {
      const double decrease = (prev - g) / std::abs(prev);
      if (decrease > report.worst_decrease) {
        report.worst_decrease = decrease;
        report.worst_at = t;
      }
      if (decrease > 1e-10) report.pass = false;
    }
    prev = g;
  }
  return report;
}

}  // namespace polar
