#pragma once

// Classical qualitative properties decided directly from CPT inequalities:
// qualitative influence, additive synergy and product synergy I.  Every
// check quantifies over all value pairs, all thresholds/outcomes and all
// instantiations x of the remaining parents.

#include <optional>
#include <string>
#include <vector>

#include "qpn/model.hpp"
#include "qpn/sign.hpp"

namespace qpn {

inline constexpr double kDefaultTolerance = 1e-9;

// One instance of a defining inequality: lhs is the side that must be the
// larger one for a Positive sign.
struct InequalityInstance {
  std::size_t a_hi = 0, a_lo = 0;  // a_1 > a_2 (index a_hi < a_lo)
  std::optional<std::pair<std::size_t, std::size_t>> b_pair;
  std::size_t x = 0;               // compound outcome of the other parents
  std::size_t c = 0;               // threshold (tail checks) or outcome (product)
  double lhs = 0.0, rhs = 0.0;
};

struct SignWitness {
  Sign sign = Sign::Zero;
  // First instance seen strictly in each direction, if any.
  std::optional<InequalityInstance> increase;
  std::optional<InequalityInstance> decrease;

  // An instance refuting `requested`, if one exists.
  std::optional<InequalityInstance> violation(Sign requested) const {
    switch (requested) {
      case Sign::Positive: return decrease;
      case Sign::Negative: return increase;
      case Sign::Zero: return increase ? increase : decrease;
      case Sign::Ambiguous: return std::nullopt;
    }
    return std::nullopt;
  }
  // Present iff the sign is Ambiguous: the instance breaking the majority
  // direction first seen.
  std::optional<InequalityInstance> witness() const {
    if (sign != Sign::Ambiguous) return std::nullopt;
    return decrease;
  }
  bool holds(Sign requested) const { return requested == Sign::Ambiguous || !violation(requested); }
};

namespace detail {

class SignAccumulator {
 public:
  explicit SignAccumulator(double eps) : eps_(eps) {}

  void add(const InequalityInstance& inst) {
    const double d = inst.lhs - inst.rhs;
    if (d > eps_) {
      if (!out_.increase) out_.increase = inst;
    } else if (d < -eps_) {
      if (!out_.decrease) out_.decrease = inst;
    }
  }

  SignWitness finish() {
    if (out_.increase && out_.decrease) out_.sign = Sign::Ambiguous;
    else if (out_.increase) out_.sign = Sign::Positive;
    else if (out_.decrease) out_.sign = Sign::Negative;
    else out_.sign = Sign::Zero;
    return out_;
  }

 private:
  double eps_;
  SignWitness out_;
};

inline void require_parent(const Network& net, VarId parent, VarId child) {
  if (!net.is_parent(parent, child))
    throw PreconditionError("'" + net.name(parent) + "' is not a parent of '" + net.name(child) + "'");
}

}  // namespace detail

// S^delta(cause, effect): Pr(c >= c_0 | a_1 x) vs Pr(c >= c_0 | a_2 x).
inline SignWitness qualitative_influence(const Network& net, VarId cause, VarId effect,
                                         double eps = kDefaultTolerance) {
  detail::require_parent(net, cause, effect);
  const VarId keep[1] = {cause};
  const CompoundCpt t = compound_parents(net, effect, keep);
  const std::size_t n_a = net.cardinality(cause);
  detail::SignAccumulator acc(eps);
  for (std::size_t a1 = 0; a1 < n_a; ++a1)
    for (std::size_t a2 = a1 + 1; a2 < n_a; ++a2)
      for (std::size_t x = 0; x < t.n_x; ++x)
        for (std::size_t c0 = 0; c0 + 1 < t.n_c; ++c0) {
          const std::size_t k1[1] = {a1}, k2[1] = {a2};
          acc.add({a1, a2, std::nullopt, x, c0, t.tail(k1, x, c0), t.tail(k2, x, c0)});
        }
  return acc.finish();
}

// Y^delta({a, b}, effect): four-term additive comparison of cumulative tails.
inline SignWitness additive_synergy(const Network& net, std::pair<VarId, VarId> pair, VarId effect,
                                    double eps = kDefaultTolerance) {
  detail::require_parent(net, pair.first, effect);
  detail::require_parent(net, pair.second, effect);
  const CompoundCpt t = compound_parents(net, effect, pair);
  const std::size_t n_a = net.cardinality(pair.first), n_b = net.cardinality(pair.second);
  detail::SignAccumulator acc(eps);
  auto tail = [&](std::size_t a, std::size_t b, std::size_t x, std::size_t c0) {
    const std::size_t k[2] = {a, b};
    return t.tail(k, x, c0);
  };
  for (std::size_t a1 = 0; a1 < n_a; ++a1)
    for (std::size_t a2 = a1 + 1; a2 < n_a; ++a2)
      for (std::size_t b1 = 0; b1 < n_b; ++b1)
        for (std::size_t b2 = b1 + 1; b2 < n_b; ++b2)
          for (std::size_t x = 0; x < t.n_x; ++x)
            for (std::size_t c0 = 0; c0 + 1 < t.n_c; ++c0)
              acc.add({a1, a2, std::make_pair(b1, b2), x, c0,
                       tail(a1, b1, x, c0) + tail(a2, b2, x, c0),
                       tail(a1, b2, x, c0) + tail(a2, b1, x, c0)});
  return acc.finish();
}

// X^delta({a, b}, c_0) per instantiation x of the other parents.
inline SignWitness product_synergy_1(const Network& net, VarId child, std::pair<VarId, VarId> pair,
                                     std::size_t c_outcome, double eps = kDefaultTolerance) {
  detail::require_parent(net, pair.first, child);
  detail::require_parent(net, pair.second, child);
  if (c_outcome >= net.cardinality(child))
    throw PreconditionError("outcome index out of range for '" + net.name(child) + "'");
  const CompoundCpt t = compound_parents(net, child, pair);
  const std::size_t n_a = net.cardinality(pair.first), n_b = net.cardinality(pair.second);
  detail::SignAccumulator acc(eps);
  for (std::size_t a1 = 0; a1 < n_a; ++a1)
    for (std::size_t a2 = a1 + 1; a2 < n_a; ++a2)
      for (std::size_t b1 = 0; b1 < n_b; ++b1)
        for (std::size_t b2 = b1 + 1; b2 < n_b; ++b2)
          for (std::size_t x = 0; x < t.n_x; ++x)
            acc.add({a1, a2, std::make_pair(b1, b2), x, c_outcome,
                     t.prob(a1, b1, x, c_outcome) * t.prob(a2, b2, x, c_outcome),
                     t.prob(a1, b2, x, c_outcome) * t.prob(a2, b1, x, c_outcome)});
  return acc.finish();
}

}  // namespace qpn
