#pragma once

// Discrete Bayesian belief networks: variables with ordered outcomes, CPTs,
// leaky Noisy-OR gates, structural validation and parent compounding.
//
// Conventions:
//   * outcomes are listed from the highest value to the lowest, so outcome
//     index i < j means outcome i is the higher value.  Binary variables use
//     [true, false].
//   * CPT rows are ordered lexicographically over parent outcome indices, the
//     first listed parent being the most significant digit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "qpn/error.hpp"

namespace qpn {

inline constexpr double kRowSumTolerance = 1e-9;

enum class VarId : std::size_t {};

constexpr std::size_t index_of(VarId v) { return static_cast<std::size_t>(v); }
constexpr VarId var_id(std::size_t i) { return static_cast<VarId>(i); }

struct Variable {
  std::string name;
  std::vector<std::string> outcomes;

  std::size_t cardinality() const { return outcomes.size(); }
  bool is_binary() const { return outcomes.size() == 2; }

  std::optional<std::size_t> outcome_index(std::string_view label) const {
    auto it = std::find(outcomes.begin(), outcomes.end(), label);
    if (it == outcomes.end()) return std::nullopt;
    return static_cast<std::size_t>(it - outcomes.begin());
  }
};

// Mixed-radix helpers shared by CPT rows, compound variables and the joint
// enumeration.  The first digit is the most significant.
inline std::size_t radix_product(std::span<const std::size_t> radices) {
  return std::accumulate(radices.begin(), radices.end(), std::size_t{1},
                         std::multiplies<>());
}

inline std::size_t encode_digits(std::span<const std::size_t> digits,
                                 std::span<const std::size_t> radices) {
  std::size_t code = 0;
  for (std::size_t i = 0; i < radices.size(); ++i) code = code * radices[i] + digits[i];
  return code;
}

inline std::vector<std::size_t> decode_digits(std::size_t code,
                                              std::span<const std::size_t> radices) {
  std::vector<std::size_t> digits(radices.size());
  for (std::size_t i = radices.size(); i-- > 0;) {
    digits[i] = code % radices[i];
    code /= radices[i];
  }
  return digits;
}

struct Cpt {
  VarId child{};
  std::vector<VarId> parents;
  std::vector<std::size_t> radices;  // parent cardinalities, same order
  std::vector<std::vector<double>> rows;

  std::size_t row_index(std::span<const std::size_t> parent_outcomes) const {
    return encode_digits(parent_outcomes, radices);
  }
  const std::vector<double>& row(std::span<const std::size_t> parent_outcomes) const {
    return rows[row_index(parent_outcomes)];
  }
  std::optional<std::size_t> parent_position(VarId v) const {
    auto it = std::find(parents.begin(), parents.end(), v);
    if (it == parents.end()) return std::nullopt;
    return static_cast<std::size_t>(it - parents.begin());
  }
};

// Leaky Noisy-OR gate over binary parents.  A present parent i (outcome index
// 0) independently produces the effect with probability strengths[i]; the
// leak produces it with probability `leak` regardless of the parents.
struct NoisyOrSpec {
  VarId child{};
  std::vector<VarId> parents;
  std::vector<double> strengths;
  double leak = 0.0;
};

// Pr(child = false | parents) = (1 - leak) * prod over present parents of
// (1 - strength).  Parents are assumed binary with index 0 = present.
inline Cpt expand_noisy_or(const NoisyOrSpec& spec) {
  Cpt cpt;
  cpt.child = spec.child;
  cpt.parents = spec.parents;
  cpt.radices.assign(spec.parents.size(), 2);
  const std::size_t n_rows = std::size_t{1} << spec.parents.size();
  cpt.rows.reserve(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    const auto digits = decode_digits(r, cpt.radices);
    double absent = 1.0 - spec.leak;
    for (std::size_t i = 0; i < digits.size(); ++i)
      if (digits[i] == 0) absent *= 1.0 - spec.strengths[i];
    cpt.rows.push_back({1.0 - absent, absent});
  }
  return cpt;
}

struct Node {
  Cpt cpt;
  std::optional<NoisyOrSpec> noisy_or;  // original parameters, when given
};

// Name-based node description, the input to Network::build.  Exactly one of
// the body alternatives is supplied.
struct NoisyOrParams {
  std::vector<double> strengths;
  double leak = 0.0;
};

struct NodeDecl {
  std::string var;
  std::vector<std::string> parents;
  std::variant<std::vector<std::vector<double>>, NoisyOrParams> body;
};

namespace detail {

inline std::string join_names(const std::vector<std::string>& names, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += sep;
    out += names[i];
  }
  return out;
}

inline std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

class Network {
 public:
  // Validates and builds a network.  Throws ValidationError naming the
  // violated constraint.
  static Network build(std::vector<Variable> variables, const std::vector<NodeDecl>& decls) {
    Network net;
    net.variables_ = std::move(variables);
    net.index_variables();
    net.nodes_.resize(net.variables_.size());
    std::vector<bool> seen(net.variables_.size(), false);
    for (const auto& decl : decls) {
      const VarId v = net.require(decl.var, "node entry");
      if (seen[index_of(v)])
        throw ValidationError("variable '" + decl.var + "' has more than one node entry");
      seen[index_of(v)] = true;
      net.nodes_[index_of(v)] = net.make_node(v, decl);
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (!seen[i])
        throw ValidationError("variable '" + net.variables_[i].name + "' has no node entry");
    net.compute_order();
    return net;
  }

  std::size_t size() const { return variables_.size(); }
  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(VarId v) const { return variables_.at(index_of(v)); }
  const Node& node(VarId v) const { return nodes_.at(index_of(v)); }
  const Cpt& cpt(VarId v) const { return node(v).cpt; }
  const std::vector<VarId>& parents(VarId v) const { return cpt(v).parents; }
  std::size_t cardinality(VarId v) const { return variable(v).cardinality(); }
  const std::string& name(VarId v) const { return variable(v).name; }

  std::optional<VarId> find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
  }

  // Looks a variable up by name; unknown names are a ValidationError.
  VarId id(std::string_view name) const { return require(name, "lookup"); }

  std::size_t outcome(VarId v, std::string_view label) const {
    auto idx = variable(v).outcome_index(label);
    if (!idx)
      throw ValidationError("variable '" + name(v) + "' has no outcome '" + std::string(label) + "'");
    return *idx;
  }

  bool is_root(VarId v) const { return parents(v).empty(); }
  bool is_parent(VarId parent, VarId child) const {
    return cpt(child).parent_position(parent).has_value();
  }

  std::vector<VarId> children(VarId v) const {
    std::vector<VarId> out;
    for (std::size_t i = 0; i < size(); ++i)
      if (is_parent(v, var_id(i))) out.push_back(var_id(i));
    return out;
  }

  // Parents-before-children order.
  const std::vector<VarId>& topological_order() const { return order_; }

  // Ancestors of v, v itself included.
  std::vector<bool> ancestor_mask(VarId v) const {
    std::vector<bool> mask(size(), false);
    std::vector<VarId> stack{v};
    while (!stack.empty()) {
      VarId u = stack.back();
      stack.pop_back();
      if (mask[index_of(u)]) continue;
      mask[index_of(u)] = true;
      for (VarId p : parents(u)) stack.push_back(p);
    }
    return mask;
  }

  // Returns a copy whose root `root` carries the given prior.
  Network with_prior(VarId root, std::vector<double> prior) const {
    if (!is_root(root))
      throw PreconditionError("variable '" + name(root) + "' is not a root");
    auto decls = declarations();
    decls[index_of(root)].body = std::vector<std::vector<double>>{std::move(prior)};
    return build(variables_, decls);
  }

  // Name-based description that rebuilds an identical network.
  std::vector<NodeDecl> declarations() const {
    std::vector<NodeDecl> decls;
    decls.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
      const Node& n = nodes_[i];
      NodeDecl d;
      d.var = variables_[i].name;
      for (VarId p : n.cpt.parents) d.parents.push_back(name(p));
      if (n.noisy_or)
        d.body = NoisyOrParams{n.noisy_or->strengths, n.noisy_or->leak};
      else
        d.body = n.cpt.rows;
      decls.push_back(std::move(d));
    }
    return decls;
  }

 private:
  void index_variables() {
    for (std::size_t i = 0; i < variables_.size(); ++i) {
      const auto& var = variables_[i];
      if (var.name.empty()) throw ValidationError("variable " + std::to_string(i) + " has an empty name");
      if (var.outcomes.size() < 2)
        throw ValidationError("variable '" + var.name + "' needs at least 2 outcomes");
      for (std::size_t j = 0; j < var.outcomes.size(); ++j)
        for (std::size_t k = j + 1; k < var.outcomes.size(); ++k)
          if (var.outcomes[j] == var.outcomes[k])
            throw ValidationError("variable '" + var.name + "' repeats outcome '" + var.outcomes[j] + "'");
      if (!by_name_.emplace(var.name, var_id(i)).second)
        throw ValidationError("duplicate variable name '" + var.name + "'");
    }
  }

  VarId require(std::string_view name, std::string_view context) const {
    auto v = find(name);
    if (!v)
      throw ValidationError("unknown variable '" + std::string(name) + "' (" + std::string(context) + ")");
    return *v;
  }

  std::string row_label(const Cpt& cpt, std::size_t r) const {
    if (cpt.parents.empty()) return "prior";
    const auto digits = decode_digits(r, cpt.radices);
    std::string out;
    for (std::size_t i = 0; i < digits.size(); ++i) {
      if (i) out += ", ";
      out += name(cpt.parents[i]) + "=" + variable(cpt.parents[i]).outcomes[digits[i]];
    }
    return out;
  }

  Node make_node(VarId v, const NodeDecl& decl) {
    const std::string& vname = name(v);
    Node node;
    Cpt& cpt = node.cpt;
    cpt.child = v;
    for (const auto& pname : decl.parents) {
      auto p = find(pname);
      if (!p) throw ValidationError("node '" + vname + "': dangling parent reference '" + pname + "'");
      if (*p == v) throw ValidationError("node '" + vname + "' lists itself as a parent");
      if (cpt.parent_position(*p))
        throw ValidationError("node '" + vname + "' lists parent '" + pname + "' twice");
      cpt.parents.push_back(*p);
      cpt.radices.push_back(cardinality(*p));
    }

    if (const auto* params = std::get_if<NoisyOrParams>(&decl.body)) {
      if (!variable(v).is_binary())
        throw ValidationError("noisy_or node '" + vname + "' must be binary");
      for (VarId p : cpt.parents)
        if (!variable(p).is_binary())
          throw ValidationError("noisy_or node '" + vname + "': parent '" + name(p) + "' must be binary");
      if (params->strengths.size() != cpt.parents.size())
        throw ValidationError("noisy_or node '" + vname + "': expected " +
                              std::to_string(cpt.parents.size()) + " strengths, got " +
                              std::to_string(params->strengths.size()));
      auto in_unit = [](double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; };
      for (std::size_t i = 0; i < params->strengths.size(); ++i)
        if (!in_unit(params->strengths[i]))
          throw ValidationError("noisy_or node '" + vname + "': strength for '" +
                                name(cpt.parents[i]) + "' outside [0,1]");
      if (!in_unit(params->leak))
        throw ValidationError("noisy_or node '" + vname + "': leak outside [0,1]");
      NoisyOrSpec spec{v, cpt.parents, params->strengths, params->leak};
      cpt = expand_noisy_or(spec);
      node.noisy_or = std::move(spec);
    } else {
      cpt.rows = std::get<std::vector<std::vector<double>>>(decl.body);
    }
    validate_rows(cpt);
    return node;
  }

  void validate_rows(const Cpt& cpt) const {
    const std::string& vname = name(cpt.child);
    const std::size_t expected = radix_product(cpt.radices);
    if (cpt.rows.size() != expected)
      throw ValidationError("node '" + vname + "': expected " + std::to_string(expected) +
                            " cpt rows, got " + std::to_string(cpt.rows.size()));
    const std::size_t n_c = cardinality(cpt.child);
    for (std::size_t r = 0; r < cpt.rows.size(); ++r) {
      const auto& row = cpt.rows[r];
      const std::string where = "node '" + vname + "': cpt row " + std::to_string(r) + " (" +
                                row_label(cpt, r) + ")";
      if (row.size() != n_c)
        throw ValidationError(where + " has " + std::to_string(row.size()) +
                              " entries, expected " + std::to_string(n_c));
      double sum = 0.0;
      for (double p : row) {
        if (!std::isfinite(p) || p < 0.0 || p > 1.0)
          throw ValidationError(where + " has probability " + detail::fmt_double(p) +
                                " outside [0,1]");
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance)
        throw ValidationError(where + " sums to " + detail::fmt_double(sum));
    }
  }

  void compute_order() {
    enum class Mark { None, Active, Done };
    std::vector<Mark> mark(size(), Mark::None);
    std::vector<VarId> path;
    order_.clear();
    std::function<void(VarId)> visit = [&](VarId v) {
      if (mark[index_of(v)] == Mark::Done) return;
      if (mark[index_of(v)] == Mark::Active) {
        std::vector<std::string> cycle;
        auto it = std::find(path.begin(), path.end(), v);
        for (; it != path.end(); ++it) cycle.push_back(name(*it));
        cycle.push_back(name(v));
        // path runs child -> parent; report in arc direction
        std::reverse(cycle.begin(), cycle.end());
        throw ValidationError("cyclic graph: " + detail::join_names(cycle, " -> "));
      }
      mark[index_of(v)] = Mark::Active;
      path.push_back(v);
      for (VarId p : parents(v)) visit(p);
      path.pop_back();
      mark[index_of(v)] = Mark::Done;
      order_.push_back(v);
    };
    for (std::size_t i = 0; i < size(); ++i) visit(var_id(i));
  }

  std::vector<Variable> variables_;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, VarId> by_name_;
  std::vector<VarId> order_;
};

// A child's CPT regrouped so that the parents in `keep` come first and all
// remaining parents are merged into one compound variable x*.  Outcomes of x*
// enumerate the remaining parents' joint outcomes lexicographically (first
// remaining parent most significant); with no remaining parents x* has a
// single outcome.
struct CompoundCpt {
  VarId child{};
  std::vector<VarId> keep;
  std::vector<std::size_t> keep_radices;
  std::vector<VarId> members;  // parents folded into x*
  std::vector<std::size_t> member_radices;
  std::vector<std::string> x_labels;
  std::size_t n_x = 1;
  std::size_t n_c = 0;
  std::vector<double> table;  // [kept joint][x][c]

  double prob(std::span<const std::size_t> kept, std::size_t x, std::size_t c) const {
    return table[(encode_digits(kept, keep_radices) * n_x + x) * n_c + c];
  }
  // Pair convenience for the common two-kept-parent case.
  double prob(std::size_t a, std::size_t b, std::size_t x, std::size_t c) const {
    const std::size_t kept[2] = {a, b};
    return prob(kept, x, c);
  }
  // Pr(child >= outcome `threshold`), i.e. the mass of outcomes 0..threshold.
  double tail(std::span<const std::size_t> kept, std::size_t x, std::size_t threshold) const {
    double s = 0.0;
    for (std::size_t c = 0; c <= threshold; ++c) s += prob(kept, x, c);
    return s;
  }
};

inline CompoundCpt compound_parents(const Network& net, VarId child, std::span<const VarId> keep) {
  const Cpt& cpt = net.cpt(child);
  CompoundCpt out;
  out.child = child;
  out.n_c = net.cardinality(child);
  std::vector<std::size_t> keep_pos;
  for (VarId k : keep) {
    auto pos = cpt.parent_position(k);
    if (!pos)
      throw PreconditionError("'" + net.name(k) + "' is not a parent of '" + net.name(child) + "'");
    if (std::find(out.keep.begin(), out.keep.end(), k) != out.keep.end())
      throw PreconditionError("parent '" + net.name(k) + "' kept twice");
    out.keep.push_back(k);
    out.keep_radices.push_back(net.cardinality(k));
    keep_pos.push_back(*pos);
  }
  std::vector<std::size_t> member_pos;
  for (std::size_t i = 0; i < cpt.parents.size(); ++i) {
    if (std::find(keep_pos.begin(), keep_pos.end(), i) != keep_pos.end()) continue;
    out.members.push_back(cpt.parents[i]);
    out.member_radices.push_back(cpt.radices[i]);
    member_pos.push_back(i);
  }
  out.n_x = radix_product(out.member_radices);
  for (std::size_t x = 0; x < out.n_x; ++x) {
    const auto digits = decode_digits(x, out.member_radices);
    std::string label;
    if (out.members.size() == 1) {
      label = net.variable(out.members[0]).outcomes[digits[0]];
    } else {
      for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i) label += ",";
        label += net.name(out.members[i]) + "=" + net.variable(out.members[i]).outcomes[digits[i]];
      }
    }
    out.x_labels.push_back(label.empty() ? "*" : label);
  }

  const std::size_t n_keep = radix_product(out.keep_radices);
  out.table.resize(n_keep * out.n_x * out.n_c);
  std::vector<std::size_t> full(cpt.parents.size());
  for (std::size_t k = 0; k < n_keep; ++k) {
    const auto kd = decode_digits(k, out.keep_radices);
    for (std::size_t i = 0; i < kd.size(); ++i) full[keep_pos[i]] = kd[i];
    for (std::size_t x = 0; x < out.n_x; ++x) {
      const auto xd = decode_digits(x, out.member_radices);
      for (std::size_t i = 0; i < xd.size(); ++i) full[member_pos[i]] = xd[i];
      const auto& row = cpt.row(full);
      std::copy(row.begin(), row.end(), out.table.begin() + (k * out.n_x + x) * out.n_c);
    }
  }
  return out;
}

inline CompoundCpt compound_parents(const Network& net, VarId child, std::pair<VarId, VarId> keep) {
  if (keep.first == keep.second)
    throw PreconditionError("compound_parents needs two distinct parents");
  const VarId k[2] = {keep.first, keep.second};
  return compound_parents(net, child, std::span<const VarId>(k, 2));
}

}  // namespace qpn
