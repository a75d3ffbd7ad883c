#pragma once

#include <string_view>

namespace qpn {

// Four-valued qualitative sign.  Zero is compatible with either weak
// direction; Ambiguous absorbs everything.
enum class Sign { Positive, Negative, Zero, Ambiguous };

constexpr std::string_view symbol(Sign s) {
  switch (s) {
    case Sign::Positive: return "+";
    case Sign::Negative: return "-";
    case Sign::Zero: return "0";
    case Sign::Ambiguous: return "?";
  }
  return "?";
}

constexpr std::string_view name(Sign s) {
  switch (s) {
    case Sign::Positive: return "Positive";
    case Sign::Negative: return "Negative";
    case Sign::Zero: return "Zero";
    case Sign::Ambiguous: return "Ambiguous";
  }
  return "Ambiguous";
}

constexpr Sign negate(Sign s) {
  switch (s) {
    case Sign::Positive: return Sign::Negative;
    case Sign::Negative: return Sign::Positive;
    default: return s;
  }
}

// Least upper bound in the sign lattice: the strongest sign consistent with
// both arguments holding.
constexpr Sign join(Sign lhs, Sign rhs) {
  if (lhs == Sign::Zero) return rhs;
  if (rhs == Sign::Zero) return lhs;
  if (lhs == rhs) return lhs;
  return Sign::Ambiguous;
}

// Sign of a sum of two terms with the given signs; Ambiguous when the terms
// may cancel.
constexpr Sign add(Sign lhs, Sign rhs) { return join(lhs, rhs); }

// Sign of a real value with tolerance.
constexpr Sign sign_of(double value, double tol) {
  if (value > tol) return Sign::Positive;
  if (value < -tol) return Sign::Negative;
  return Sign::Zero;
}

// True when a value of sign `actual` satisfies the weak relation expressed by
// `claimed` (e.g. a Zero observation is consistent with a Negative claim).
constexpr bool consistent_with(Sign claimed, Sign actual) {
  if (claimed == Sign::Ambiguous) return true;
  if (actual == Sign::Zero) return true;
  return claimed == actual;
}

}  // namespace qpn
