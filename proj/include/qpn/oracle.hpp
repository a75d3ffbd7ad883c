#pragma once

// Brute-force exact inference by enumerating the full joint distribution.
// Serves as ground truth for every qualitative prediction; refuses networks
// whose joint state space exceeds kMaxJointStates.

#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "qpn/model.hpp"
#include "qpn/sign.hpp"

namespace qpn {

inline constexpr std::size_t kMaxJointStates = std::size_t{1} << 24;

// Soft evidence on a single variable given as a likelihood vector over its
// outcomes.  Only ratios matter.
struct VirtualEvidence {
  VarId var{};
  std::vector<double> likelihood;
};

struct Evidence {
  std::map<VarId, std::size_t> hard;
  std::optional<VirtualEvidence> soft;

  Evidence& observe(VarId v, std::size_t outcome) {
    hard[v] = outcome;
    return *this;
  }
  Evidence with(VarId v, std::size_t outcome) const {
    Evidence e = *this;
    e.hard[v] = outcome;
    return e;
  }
  bool observed(VarId v) const {
    return hard.count(v) > 0 || (soft && soft->var == v);
  }
};

// Virtual evidence [lambda, 1] on a binary variable: lambda is the
// likelihood ratio Pr(d | first outcome) / Pr(d | second outcome).
inline Evidence likelihood_ratio_evidence(VarId binary_var, double lambda) {
  Evidence ev;
  ev.soft = VirtualEvidence{binary_var, {lambda, 1.0}};
  return ev;
}

struct Posterior {
  VarId variable{};
  std::vector<double> probs;
};

namespace detail {

inline void check_evidence(const Network& net, const Evidence& ev) {
  for (const auto& [v, o] : ev.hard) {
    if (index_of(v) >= net.size()) throw PreconditionError("evidence on unknown variable");
    if (o >= net.cardinality(v))
      throw PreconditionError("evidence outcome out of range for '" + net.name(v) + "'");
  }
  if (ev.soft) {
    const auto& s = *ev.soft;
    if (ev.hard.count(s.var))
      throw PreconditionError("'" + net.name(s.var) + "' has both hard and virtual evidence");
    if (s.likelihood.size() != net.cardinality(s.var))
      throw PreconditionError("likelihood vector size mismatch for '" + net.name(s.var) + "'");
    bool any = false;
    for (double l : s.likelihood) {
      if (!std::isfinite(l) || l < 0.0)
        throw PreconditionError("likelihood entries must be finite and non-negative");
      any = any || l > 0.0;
    }
    if (!any) throw PreconditionError("likelihood vector is all zero");
  }
}

inline void check_state_space(const Network& net) {
  double states = 1.0;
  for (const auto& v : net.variables()) states *= static_cast<double>(v.cardinality());
  if (states > static_cast<double>(kMaxJointStates))
    throw LimitError("joint state space exceeds 2^24 entries");
}

}  // namespace detail

// Calls fn(assignment, weight) for every full assignment consistent with the
// hard evidence; weight is the joint probability times the (normalized)
// virtual-evidence likelihood.
template <typename Fn>
void enumerate_joint(const Network& net, const Evidence& ev, Fn&& fn) {
  detail::check_evidence(net, ev);
  detail::check_state_space(net);

  std::vector<double> likelihood;
  if (ev.soft) {
    likelihood = ev.soft->likelihood;
    const double top = *std::max_element(likelihood.begin(), likelihood.end());
    for (double& l : likelihood) l /= top;
  }

  const auto& order = net.topological_order();
  std::vector<std::size_t> assign(net.size(), 0);
  std::vector<std::size_t> parent_digits;
  // Depth-first over the topological order, pruning zero-weight prefixes.
  auto recurse = [&](auto&& self, std::size_t depth, double weight) -> void {
    if (depth == order.size()) {
      fn(static_cast<const std::vector<std::size_t>&>(assign), weight);
      return;
    }
    const VarId v = order[depth];
    const Cpt& cpt = net.cpt(v);
    parent_digits.resize(cpt.parents.size());
    for (std::size_t i = 0; i < cpt.parents.size(); ++i) parent_digits[i] = assign[index_of(cpt.parents[i])];
    const auto& row = cpt.row(parent_digits);
    auto hit = ev.hard.find(v);
    const std::size_t lo = hit == ev.hard.end() ? 0 : hit->second;
    const std::size_t hi = hit == ev.hard.end() ? row.size() : hit->second + 1;
    for (std::size_t o = lo; o < hi; ++o) {
      double w = weight * row[o];
      if (ev.soft && ev.soft->var == v) w *= likelihood[o];
      if (w == 0.0) continue;
      assign[index_of(v)] = o;
      self(self, depth + 1, w);
    }
  };
  recurse(recurse, 0, 1.0);
}

inline double evidence_weight(const Network& net, const Evidence& ev) {
  double total = 0.0;
  enumerate_joint(net, ev, [&](const auto&, double w) { total += w; });
  return total;
}

inline Posterior posterior(const Network& net, VarId query, const Evidence& ev) {
  if (ev.hard.count(query))
    throw PreconditionError("query variable '" + net.name(query) + "' is observed");
  Posterior post{query, std::vector<double>(net.cardinality(query), 0.0)};
  double total = 0.0;
  enumerate_joint(net, ev, [&](const std::vector<std::size_t>& a, double w) {
    post.probs[a[index_of(query)]] += w;
    total += w;
  });
  if (!(total > 0.0)) throw PreconditionError("evidence has zero probability");
  for (double& p : post.probs) p /= total;
  return post;
}

// Joint distribution of `vars` given the evidence, flattened lexicographically
// (first variable most significant).
inline std::vector<double> joint_marginal(const Network& net, std::span<const VarId> vars,
                                          const Evidence& ev = {}) {
  std::vector<std::size_t> radices;
  for (VarId v : vars) radices.push_back(net.cardinality(v));
  std::vector<double> out(radix_product(radices), 0.0);
  std::vector<std::size_t> digits(vars.size());
  double total = 0.0;
  enumerate_joint(net, ev, [&](const std::vector<std::size_t>& a, double w) {
    for (std::size_t i = 0; i < vars.size(); ++i) digits[i] = a[index_of(vars[i])];
    out[encode_digits(digits, radices)] += w;
    total += w;
  });
  if (!(total > 0.0)) throw PreconditionError("evidence has zero probability");
  for (double& p : out) p /= total;
  return out;
}

// Pr(A | b = B, ev) - Pr(A | b = notB, ev) for binary a and b.
inline double intercausal_influence(const Network& net, VarId a, VarId b, const Evidence& ev) {
  if (!net.variable(a).is_binary() || !net.variable(b).is_binary())
    throw PreconditionError("scalar intercausal influence needs binary variables");
  if (ev.observed(a) || ev.observed(b))
    throw PreconditionError("intercausal influence: a and b must be unobserved");
  return posterior(net, a, ev.with(b, 0)).probs[0] - posterior(net, a, ev.with(b, 1)).probs[0];
}

struct DominanceCheck {
  Sign sign = Sign::Zero;
  double max_diff = 0.0;  // largest Pr(a >= a_i | b1) - Pr(a >= a_i | b2)
  double min_diff = 0.0;
};

// Qualitative influence of b on a in the posterior given ev: compares the
// cumulative tails Pr(a >= a_i | b_1, ev) and Pr(a >= a_i | b_2, ev) for all
// b_1 > b_2 and every nontrivial cut point i.
inline DominanceCheck influence_sign(const Network& net, VarId a, VarId b, const Evidence& ev,
                                     double tol = 1e-12) {
  if (ev.observed(a) || ev.observed(b))
    throw PreconditionError("influence_sign: a and b must be unobserved");
  const std::size_t n_a = net.cardinality(a), n_b = net.cardinality(b);
  std::vector<std::vector<double>> post(n_b);
  for (std::size_t j = 0; j < n_b; ++j) post[j] = posterior(net, a, ev.with(b, j)).probs;
  DominanceCheck out;
  bool first = true;
  for (std::size_t b1 = 0; b1 < n_b; ++b1)
    for (std::size_t b2 = b1 + 1; b2 < n_b; ++b2) {
      double t1 = 0.0, t2 = 0.0;
      for (std::size_t i = 0; i + 1 < n_a; ++i) {
        t1 += post[b1][i];
        t2 += post[b2][i];
        const double d = t1 - t2;
        out.max_diff = first ? d : std::max(out.max_diff, d);
        out.min_diff = first ? d : std::min(out.min_diff, d);
        first = false;
        out.sign = join(out.sign, sign_of(d, tol));
      }
    }
  return out;
}

using SweepSeries = std::vector<std::pair<double, double>>;

inline SweepSeries sweep_prior(const Network& net, VarId root, std::span<const double> grid,
                               VarId a, VarId b, const Evidence& ev) {
  if (!net.is_root(root) || !net.variable(root).is_binary())
    throw PreconditionError("sweep target '" + net.name(root) + "' must be a binary root");
  SweepSeries out;
  out.reserve(grid.size());
  for (double g : grid) {
    if (!(g >= 0.0 && g <= 1.0)) throw PreconditionError("prior grid values must lie in [0,1]");
    const Network swept = net.with_prior(root, {g, 1.0 - g});
    out.emplace_back(g, intercausal_influence(swept, a, b, ev));
  }
  return out;
}

inline SweepSeries sweep_lambda(const Network& net, VarId c, std::span<const double> grid, VarId a,
                                VarId b) {
  if (!net.variable(c).is_binary())
    throw PreconditionError("likelihood-ratio sweep needs a binary effect");
  SweepSeries out;
  out.reserve(grid.size());
  for (double lambda : grid) {
    if (!std::isfinite(lambda) || lambda < 0.0)
      throw PreconditionError("lambda must be finite and non-negative");
    out.emplace_back(lambda, intercausal_influence(net, a, b, likelihood_ratio_evidence(c, lambda)));
  }
  return out;
}

inline void write_sweep_csv(std::ostream& os, const SweepSeries& series) {
  const auto old = os.precision(17);
  os << "param,influence\n";
  for (const auto& [param, value] : series) os << param << ',' << value << '\n';
  os.precision(old);
}

}  // namespace qpn
