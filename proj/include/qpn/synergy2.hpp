#pragma once

// Product synergy II: for every a_1 > a_2 and b_1 > b_2 the synergy matrix
//
//   D_ij = Pr(c_0|a_1 b_1 x_i) Pr(c_0|a_2 b_2 x_j) - Pr(c_0|a_2 b_1 x_i) Pr(c_0|a_1 b_2 x_j)
//
// over the compound outcomes x_i of the remaining parents must be half
// negative (positive) semi-definite for a negative (positive) synergy.  Since
// p^T D p is the marginalized cross-product difference for the prior p on x,
// the verdict decides the sign of intercausal reasoning between independent
// causes a and b for every distribution of x.  For a binary effect observed
// indirectly with likelihood ratio lambda, the sign of the intercausal
// influence is the sign of (lambda - 1)(lambda p^T D_C p - p^T D_notC p).

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qpn/copositivity.hpp"
#include "qpn/model.hpp"
#include "qpn/qual.hpp"
#include "qpn/sign.hpp"

namespace qpn {

using ValuePair = std::pair<std::size_t, std::size_t>;  // (higher, lower) outcome index

struct SynergyMatrix {
  ValuePair a_pair;
  ValuePair b_pair;
  std::size_t c_outcome = 0;
  Matrix entries;
  std::vector<std::string> x_labels;
};

namespace detail {

inline void check_pair(const ValuePair& p, std::size_t cardinality, const std::string& what) {
  if (!(p.first < p.second && p.second < cardinality))
    throw PreconditionError(what + " pair must satisfy higher > lower (index " +
                            std::to_string(p.first) + " < " + std::to_string(p.second) +
                            ") within range");
}

inline Matrix synergy_entries(const CompoundCpt& t, ValuePair a, ValuePair b, std::size_t c0) {
  const auto n = static_cast<Eigen::Index>(t.n_x);
  Matrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto xi = static_cast<std::size_t>(i), xj = static_cast<std::size_t>(j);
      d(i, j) = t.prob(a.first, b.first, xi, c0) * t.prob(a.second, b.second, xj, c0) -
                t.prob(a.second, b.first, xi, c0) * t.prob(a.first, b.second, xj, c0);
    }
  return d;
}

inline CompoundCpt pair_table(const Network& net, VarId child, VarId a, VarId b) {
  detail::require_parent(net, a, child);
  detail::require_parent(net, b, child);
  return compound_parents(net, child, std::make_pair(a, b));
}

}  // namespace detail

inline SynergyMatrix build_D(const Network& net, VarId child, VarId a, VarId b, std::size_t c_outcome,
                             ValuePair a_pair, ValuePair b_pair) {
  const CompoundCpt t = detail::pair_table(net, child, a, b);
  detail::check_pair(a_pair, net.cardinality(a), "a");
  detail::check_pair(b_pair, net.cardinality(b), "b");
  if (c_outcome >= t.n_c) throw PreconditionError("outcome index out of range");
  return {a_pair, b_pair, c_outcome, detail::synergy_entries(t, a_pair, b_pair, c_outcome), t.x_labels};
}

struct PairClassification {
  SynergyMatrix matrix;
  HalfDefiniteness definiteness;
  Sign sign = Sign::Zero;
};

// A prior over the compound outcomes together with the form value it yields
// for matrix per_pair[pair].
struct PriorWitness {
  std::size_t pair = 0;
  Vector prior;
  double value = 0.0;
};

struct SynergyVerdict {
  std::vector<PairClassification> per_pair;
  Sign overall = Sign::Zero;
  // Filled for Ambiguous verdicts: priors with p^T D p > 0 and < 0.
  std::optional<PriorWitness> positive_witness;
  std::optional<PriorWitness> negative_witness;
};

inline Sign sign_of(Definiteness d) {
  switch (d) {
    case Definiteness::HalfPosSemiDef: return Sign::Positive;
    case Definiteness::HalfNegSemiDef: return Sign::Negative;
    case Definiteness::ZeroMatrix: return Sign::Zero;
    default: return Sign::Ambiguous;
  }
}

inline SynergyVerdict product_synergy_2(const Network& net, VarId child, std::pair<VarId, VarId> pair,
                                        std::size_t c_outcome, const ClassifyOptions& opt = {}) {
  const auto [a, b] = pair;
  const CompoundCpt t = detail::pair_table(net, child, a, b);
  if (c_outcome >= t.n_c) throw PreconditionError("outcome index out of range");
  SynergyVerdict out;
  bool undetermined = false;
  for (std::size_t a1 = 0; a1 < net.cardinality(a); ++a1)
    for (std::size_t a2 = a1 + 1; a2 < net.cardinality(a); ++a2)
      for (std::size_t b1 = 0; b1 < net.cardinality(b); ++b1)
        for (std::size_t b2 = b1 + 1; b2 < net.cardinality(b); ++b2) {
          PairClassification pc;
          pc.matrix = {{a1, a2}, {b1, b2}, c_outcome,
                       detail::synergy_entries(t, {a1, a2}, {b1, b2}, c_outcome), t.x_labels};
          pc.definiteness = classify_half_definite(pc.matrix.entries, opt);
          pc.sign = sign_of(pc.definiteness.cls);
          undetermined = undetermined || pc.definiteness.cls == Definiteness::Undetermined;
          out.per_pair.push_back(std::move(pc));
        }

  bool neither = false;
  out.overall = Sign::Zero;
  for (const auto& pc : out.per_pair) {
    if (pc.definiteness.cls == Definiteness::Neither) neither = true;
    if (pc.definiteness.cls != Definiteness::Undetermined) out.overall = join(out.overall, pc.sign);
  }
  if (undetermined && !neither && out.overall != Sign::Ambiguous)
    throw LimitError("synergy matrix too large for an exact half-definiteness decision");
  if (undetermined) out.overall = Sign::Ambiguous;

  if (out.overall == Sign::Ambiguous) {
    for (std::size_t i = 0; i < out.per_pair.size(); ++i) {
      const auto& hd = out.per_pair[i].definiteness;
      const Matrix& d = out.per_pair[i].matrix.entries;
      if (!out.positive_witness && hd.positive_witness()) {
        const Vector& v = *hd.positive_witness();
        out.positive_witness = PriorWitness{i, v / v.sum(), quadratic_form(d, v / v.sum())};
      }
      if (!out.negative_witness && hd.negative_witness()) {
        const Vector& v = *hd.negative_witness();
        out.negative_witness = PriorWitness{i, v / v.sum(), quadratic_form(d, v / v.sum())};
      }
    }
  }
  return out;
}

// Precondition for deciding intercausal signs from product synergy: a and b
// are distinct parents of child, d-separated without evidence (no common
// ancestor, neither an ancestor of the other), and each remaining parent of
// child is likewise independent of both a and b.
inline void check_intercausal_structure(const Network& net, VarId a, VarId b, VarId child) {
  if (a == b) throw PreconditionError("intercausal pair must name two distinct variables");
  detail::require_parent(net, a, child);
  detail::require_parent(net, b, child);
  const auto anc_a = net.ancestor_mask(a);
  const auto anc_b = net.ancestor_mask(b);
  for (std::size_t i = 0; i < net.size(); ++i)
    if (anc_a[i] && anc_b[i])
      throw PreconditionError("'" + net.name(a) + "' and '" + net.name(b) +
                              "' are not independent: shared ancestor '" + net.variables()[i].name + "'");
  for (VarId x : net.parents(child)) {
    if (x == a || x == b) continue;
    const auto anc_x = net.ancestor_mask(x);
    for (std::size_t i = 0; i < net.size(); ++i)
      if (anc_x[i] && (anc_a[i] || anc_b[i]))
        throw PreconditionError("other parent '" + net.name(x) + "' of '" + net.name(child) +
                                "' depends on the pair through '" + net.variables()[i].name + "'");
  }
}

// Sign of the intercausal influence between a and b once child = c_outcome
// is observed, valid for every distribution of the remaining parents.
inline Sign intercausal_sign_observed(const Network& net, VarId a, VarId b, VarId child,
                                      std::size_t c_outcome, const ClassifyOptions& opt = {}) {
  check_intercausal_structure(net, a, b, child);
  return product_synergy_2(net, child, {a, b}, c_outcome, opt).overall;
}

// The quadratic forms behind intercausal reasoning with indirect evidence on
// a binary child, for one (a_pair, b_pair) and one prior p on x.
struct LambdaForm {
  double q_c = 0.0;     // p^T D_C p
  double q_cbar = 0.0;  // p^T D_notC p
  double y = 0.0;       // marginalized additive-synergy expression for C

  // (lambda - 1)(lambda q_C - q_notC)
  double product_form(double lambda) const { return (lambda - 1.0) * (lambda * q_c - q_cbar); }
  // (lambda - 1)((lambda - 1) q_C + y); identical to product_form because
  // q_C - q_notC = y for a binary child.
  double additive_form(double lambda) const { return (lambda - 1.0) * ((lambda - 1.0) * q_c + y); }
};

inline LambdaForm lambda_form(const Network& net, VarId child, VarId a, VarId b, ValuePair a_pair,
                              ValuePair b_pair, const Vector& x_prior) {
  if (!net.variable(child).is_binary())
    throw PreconditionError("indirect-evidence analysis needs a binary effect");
  const CompoundCpt t = detail::pair_table(net, child, a, b);
  detail::check_pair(a_pair, net.cardinality(a), "a");
  detail::check_pair(b_pair, net.cardinality(b), "b");
  if (static_cast<std::size_t>(x_prior.size()) != t.n_x)
    throw PreconditionError("prior size does not match the compound variable");
  if (x_prior.minCoeff() < 0.0 || std::abs(x_prior.sum() - 1.0) > kRowSumTolerance)
    throw PreconditionError("prior must be a probability distribution");

  LambdaForm f;
  f.q_c = quadratic_form(detail::synergy_entries(t, a_pair, b_pair, 0), x_prior);
  f.q_cbar = quadratic_form(detail::synergy_entries(t, a_pair, b_pair, 1), x_prior);
  auto marginal = [&](std::size_t ai, std::size_t bi) {
    double s = 0.0;
    for (std::size_t x = 0; x < t.n_x; ++x) s += x_prior(static_cast<Eigen::Index>(x)) * t.prob(ai, bi, x, 0);
    return s;
  };
  f.y = marginal(a_pair.first, b_pair.first) + marginal(a_pair.second, b_pair.second) -
        marginal(a_pair.first, b_pair.second) - marginal(a_pair.second, b_pair.first);
  return f;
}

inline double lambda_form(const Network& net, VarId child, VarId a, VarId b, ValuePair a_pair,
                          ValuePair b_pair, const Vector& x_prior, double lambda) {
  if (!(lambda >= 0.0)) throw PreconditionError("lambda must be non-negative");
  return lambda_form(net, child, a, b, a_pair, b_pair, x_prior).product_form(lambda);
}

struct SecondZero {
  std::optional<double> lambda;  // q_notC / q_C, when the form is quadratic
  bool in_range = false;         // lambda >= 0
  bool degenerate = false;       // q_C == 0: linear in lambda, single zero at 1
};

inline SecondZero second_zero(const LambdaForm& f, double tol = 1e-15) {
  SecondZero z;
  if (std::abs(f.q_c) <= tol) {
    z.degenerate = true;
    return z;
  }
  z.lambda = f.q_cbar / f.q_c;
  if (std::abs(*z.lambda) <= 1e-12) z.lambda = 0.0;
  z.in_range = *z.lambda >= 0.0;
  return z;
}

inline SecondZero second_zero(const Network& net, VarId child, VarId a, VarId b, ValuePair a_pair,
                              ValuePair b_pair, const Vector& x_prior) {
  return second_zero(lambda_form(net, child, a, b, a_pair, b_pair, x_prior));
}

struct IndirectSetup {
  Sign delta1 = Sign::Ambiguous;  // product synergy for C
  Sign delta2 = Sign::Ambiguous;  // product synergy for notC
  Sign delta3 = Sign::Ambiguous;  // additive synergy of a, b on c
  Sign delta4 = Sign::Ambiguous;  // qualitative influence of c on the evidence node
};

// Evidence of likelihood ratio lambda falls into one of three regimes; the
// sign of the c -> d influence selects it when d is observed at its higher
// value.
enum class EvidenceRegime { Opposing, Neutral, Supporting };  // lambda < 1, = 1, > 1

inline EvidenceRegime regime_of_lambda(double lambda) {
  if (lambda > 1.0) return EvidenceRegime::Supporting;
  if (lambda < 1.0) return EvidenceRegime::Opposing;
  return EvidenceRegime::Neutral;
}

// Sign of the intercausal influence within an evidence regime, derived from
// the sign structure of (lambda - 1)(lambda q_C - q_notC) with sign(q_C) =
// delta1, sign(q_notC) = delta2 and q_C - q_notC carrying delta3:
//   lambda > 1:      lambda q_C - q_notC = (lambda-1) q_C + y = lambda q_C + (-q_notC)
//   0 < lambda < 1:  q_notC - lambda q_C = (1-lambda) q_notC - lambda y = q_notC + (-lambda q_C)
// The sign is resolved whenever one of the two splits has compatible terms.
// This subsumes both classical rules (delta4 = +, delta1 = delta3 gives
// delta1; delta4 = -, delta2 != delta3 gives delta2 for nonzero delta2) and
// the interval rule for delta1 != delta2.
inline Sign indirect_sign_in_regime(Sign delta1, Sign delta2, Sign delta3, EvidenceRegime regime) {
  if (delta1 == Sign::Ambiguous || delta2 == Sign::Ambiguous || delta3 == Sign::Ambiguous)
    return Sign::Ambiguous;
  switch (regime) {
    case EvidenceRegime::Neutral:
      return Sign::Zero;
    case EvidenceRegime::Supporting: {
      const Sign s = add(delta1, delta3);
      return s != Sign::Ambiguous ? s : add(delta1, negate(delta2));
    }
    case EvidenceRegime::Opposing: {
      const Sign s = add(delta2, negate(delta3));
      return s != Sign::Ambiguous ? s : add(delta2, negate(delta1));
    }
  }
  return Sign::Ambiguous;
}

// Prediction for d observed at its higher value: a positive c -> d influence
// means lambda > 1, a negative one lambda < 1, zero means no support.
inline Sign indirect_sign_predict(const IndirectSetup& s) {
  if (s.delta4 == Sign::Ambiguous) return Sign::Ambiguous;
  const EvidenceRegime regime = s.delta4 == Sign::Positive   ? EvidenceRegime::Supporting
                                : s.delta4 == Sign::Negative ? EvidenceRegime::Opposing
                                                             : EvidenceRegime::Neutral;
  return indirect_sign_in_regime(s.delta1, s.delta2, s.delta3, regime);
}

// delta1..delta3 from the network; delta4 is supplied by the caller (either
// from an explicit evidence node or from a likelihood ratio).
inline IndirectSetup indirect_setup(const Network& net, VarId child, std::pair<VarId, VarId> pair,
                                    Sign delta4, const ClassifyOptions& opt = {}) {
  if (!net.variable(child).is_binary())
    throw PreconditionError("indirect-evidence analysis needs a binary effect");
  IndirectSetup s;
  s.delta1 = product_synergy_2(net, child, pair, 0, opt).overall;
  s.delta2 = product_synergy_2(net, child, pair, 1, opt).overall;
  s.delta3 = additive_synergy(net, pair, child, opt.eps).sign;
  s.delta4 = delta4;
  return s;
}

inline IndirectSetup indirect_setup(const Network& net, VarId child, std::pair<VarId, VarId> pair,
                                    VarId evidence_node, const ClassifyOptions& opt = {}) {
  return indirect_setup(net, child, pair, qualitative_influence(net, child, evidence_node, opt.eps).sign,
                        opt);
}

// Synergy matrix of a binary leaky Noisy-OR gate with parents a, b, x of
// strengths p, q, r and leak l, for the effect present.
inline Matrix noisy_or_D_closed_form(double p, double q, double r, double l) {
  for (double v : {p, q, r, l})
    if (!(v >= 0.0 && v <= 1.0)) throw PreconditionError("noisy-or parameters must lie in [0,1]");
  const double k = 1.0 - l;
  Matrix d(2, 2);
  d(0, 0) = -k * p * q * (1.0 - r);
  d(0, 1) = -k * p * (q + (1.0 - q) * r);
  d(1, 0) = -k * p * (q - r);
  d(1, 1) = -k * p * q;
  return d;
}

}  // namespace qpn
