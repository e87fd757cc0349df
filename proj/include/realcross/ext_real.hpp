#pragma once

#include <cmath>
#include <string>

namespace realcross {

/// Real number extended with signed infinities, tagged explicitly so that
/// limits such as θ(α → ±∞) are exact instead of flowing through IEEE inf.
class ExtReal {
 public:
  enum class Kind { finite, pos_inf, neg_inf };

  constexpr ExtReal() = default;
  constexpr ExtReal(double x) : value_(x) {}  // NOLINT: implicit from finite reals

  static constexpr ExtReal plus_infinity() { return ExtReal(Kind::pos_inf); }
  static constexpr ExtReal minus_infinity() { return ExtReal(Kind::neg_inf); }
  /// Infinity carrying the sign of `sign` (sign must be nonzero).
  static constexpr ExtReal infinity_with_sign(double sign) {
    return sign < 0.0 ? minus_infinity() : plus_infinity();
  }

  constexpr Kind kind() const { return kind_; }
  constexpr bool is_finite() const { return kind_ == Kind::finite; }
  constexpr bool is_infinite() const { return kind_ != Kind::finite; }
  /// Finite value; ±HUGE_VAL for the infinite kinds.
  double value() const {
    switch (kind_) {
      case Kind::pos_inf:
        return HUGE_VAL;
      case Kind::neg_inf:
        return -HUGE_VAL;
      default:
        return value_;
    }
  }

  constexpr ExtReal operator-() const {
    switch (kind_) {
      case Kind::pos_inf:
        return minus_infinity();
      case Kind::neg_inf:
        return plus_infinity();
      default:
        return ExtReal(-value_);
    }
  }

  friend constexpr bool operator==(const ExtReal& a, const ExtReal& b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::finite || a.value_ == b.value_);
  }

  std::string to_string() const;

 private:
  constexpr explicit ExtReal(Kind k) : kind_(k) {}

  Kind kind_ = Kind::finite;
  double value_ = 0.0;
};

}  // namespace realcross
