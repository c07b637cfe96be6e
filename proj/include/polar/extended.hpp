#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace polar {

/// Nonnegative extended real: a finite double or the +infinity token.
///
/// Kernel values at zero distance and potentials at atoms of an unbounded
/// kernel are infinite. The token propagates through addition and positive
/// scaling and loses every min against a finite value.
class Extended {
 public:
  constexpr Extended() = default;
  constexpr Extended(double v) : value_(v) {}  // NOLINT(implicit)

  static constexpr Extended infinity() {
    Extended e;
    e.infinite_ = true;
    return e;
  }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr bool is_finite() const { return !infinite_; }

  /// Finite value; throws on the infinity token.
  double value() const {
    if (infinite_) throw std::domain_error("extended value is infinite");
    return value_;
  }

  /// Maps the token to IEEE +inf; only for output and plotting.
  double to_double() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  std::string to_string() const;

  friend constexpr Extended operator+(Extended a, Extended b) {
    if (a.infinite_ || b.infinite_) return infinity();
    return Extended(a.value_ + b.value_);
  }
  Extended& operator+=(Extended b) { return *this = *this + b; }

  // Scaling by a positive weight. Zero weight times infinity is not needed
  // anywhere (atoms carry positive mass) and is rejected.
  friend Extended operator*(double w, Extended a) {
    if (a.infinite_) {
      if (!(w > 0.0)) throw std::domain_error("nonpositive scale of infinity");
      return infinity();
    }
    return Extended(w * a.value_);
  }
  friend Extended operator/(Extended a, double w) { return (1.0 / w) * a; }

  friend constexpr bool operator<(Extended a, Extended b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.value_ < b.value_;
  }
  friend constexpr bool operator>(Extended a, Extended b) { return b < a; }
  friend constexpr bool operator<=(Extended a, Extended b) { return !(b < a); }
  friend constexpr bool operator>=(Extended a, Extended b) { return !(a < b); }
  friend constexpr bool operator==(Extended a, Extended b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

inline Extended min(Extended a, Extended b) { return b < a ? b : a; }
inline Extended max(Extended a, Extended b) { return a < b ? b : a; }

inline std::string Extended::to_string() const {
  if (infinite_) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value_);
  return buf;
}

}  // namespace polar
