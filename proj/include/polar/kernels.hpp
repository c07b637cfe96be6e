#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "polar/extended.hpp"

namespace polar {

enum class KernelFamily { riesz, log, log_power, gaussian };

std::string_view to_string(KernelFamily family);
KernelFamily kernel_family_from_string(std::string_view name);

/// Radial kernel K(x, y) = f(|x - y|) from one of the Riesz-like families:
///
///   riesz      f(t) = t^{-s}
///   log        f(t) = log(c / t)
///   log_power  f(t) = t^{-s} log(c / t)^alpha
///   gaussian   f(t) = exp(-c t^2)
struct KernelSpec {
  KernelFamily family = KernelFamily::riesz;
  double s = 0.5;
  double c = 1.0;
  double alpha = 1.0;

  static KernelSpec riesz(double s);
  static KernelSpec log(double c);
  static KernelSpec log_power(double s, double c, double alpha);
  static KernelSpec gaussian(double c);

  /// True when f(t) -> infinity as t -> 0+.
  bool unbounded() const { return family != KernelFamily::gaussian; }
};

/// f(t) for t > 0; the formal limit f(0+) at t == 0 (infinity token for the
/// unbounded families). Throws DomainError for t < 0 or t >= c on the log
/// families, where f would not be positive.
Extended kernel_eval(const KernelSpec& spec, double t);

/// Fast path for hot loops: f(t) for t > 0 without domain checks.
double kernel_value(const KernelSpec& spec, double t);

/// f^{-1}(u) for u in the range of f on (0, infinity).
double kernel_inverse(const KernelSpec& spec, double u);

/// Checks parameter sanity and admissibility on a set of regularity
/// dimension d and diameter diam: 0 < s < d for the power families,
/// c > diam for the log families, c > 0 for gaussian.
void check_admissible(const KernelSpec& spec, double d, double diam);

/// Witness for the Riesz-like condition: t^{d - epsilon} f(t) is
/// nondecreasing on (0, t_eps].
struct RieszLikeWitness {
  double d = 1.0;
  double epsilon = 0.5;
  double t_eps = 1.0;
};

RieszLikeWitness default_witness(const KernelSpec& spec, double d, double diam);

struct RieszLikeReport {
  bool pass = false;
  // lim_{t -> 0+} t^{d - epsilon} f(t).
  Extended limit_at_zero;
  // Largest relative decrease seen between consecutive grid points.
  double worst_decrease = 0.0;
  double worst_at = 0.0;
  std::size_t grid_size = 0;
};

/// Samples g(t) = t^{d - epsilon} f(t) on a geometric grid of (0, t_eps] and
/// reports whether g is nondecreasing within a relative slack of 1e-10.
/// Failures are reported, never thrown.
RieszLikeReport verify_riesz_like(const KernelSpec& spec, const RieszLikeWitness& witness,
                                  std::size_t grid_size = 10000);

}  // namespace polar
