#pragma once

// Command-line front end.  run() is kept separate from main() so the test
// suite can drive every verb with in-memory streams.
//
// Exit status: 0 success, 1 parse/validation error (including bad options),
// 2 refused precondition, 3 internal limit.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qpn/copositivity.hpp"
#include "qpn/network_io.hpp"
#include "qpn/oracle.hpp"
#include "qpn/qual.hpp"
#include "qpn/synergy2.hpp"

namespace qpn::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kPrecondition = 2, kLimit = 3 };

using nlohmann::json;

// --- argument parsing helpers ----------------------------------------------

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline std::pair<std::string, std::string> parse_pair(const std::string& s) {
  auto parts = split(s, ',');
  if (parts.size() != 2 || parts[0].empty() || parts[1].empty())
    throw ValidationError("--pair expects two comma-separated variable names, got '" + s + "'");
  return {parts[0], parts[1]};
}

inline std::pair<std::string, std::string> parse_assignment(const std::string& s) {
  auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
    throw ValidationError("expected VAR=OUTCOME, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

inline double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ValidationError(what + ": not a number '" + s + "'");
  return v;
}

// start:end:count, inclusive of both endpoints.
inline std::vector<double> parse_grid(const std::string& s) {
  auto parts = split(s, ':');
  if (parts.size() != 3) throw ValidationError("grid must be start:end:count, got '" + s + "'");
  const double start = parse_number(parts[0], "grid start");
  const double end = parse_number(parts[1], "grid end");
  const double count_d = parse_number(parts[2], "grid count");
  if (count_d < 1 || count_d != std::floor(count_d) || count_d > 1e7)
    throw ValidationError("grid count must be a positive integer");
  const auto count = static_cast<std::size_t>(count_d);
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i)
    grid[i] = count == 1 ? start
                         : start + (end - start) * static_cast<double>(i) / static_cast<double>(count - 1);
  if (count > 1) grid.back() = end;
  return grid;
}

inline Sign parse_sign(const std::string& s) {
  if (s == "+" || s == "positive" || s == "Positive") return Sign::Positive;
  if (s == "-" || s == "negative" || s == "Negative") return Sign::Negative;
  if (s == "0" || s == "zero" || s == "Zero") return Sign::Zero;
  if (s == "?" || s == "ambiguous" || s == "Ambiguous") return Sign::Ambiguous;
  throw ValidationError("unknown sign '" + s + "' (use +, -, 0 or ?)");
}

inline std::uint64_t default_seed() {
  if (const char* env = std::getenv("QPN_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ValidationError(std::string("QPN_SEED is not an unsigned integer: '") + env + "'");
    }
  }
  return kDefaultSeed;
}

// --- formatting ------------------------------------------------------------

inline std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::string vec_str(const Vector& v) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += num(v(i));
  }
  return out + ")";
}

inline json vec_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline void print_matrix(std::ostream& os, const Matrix& m, const std::string& indent) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << indent << "[";
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << num(m(i, j));
    os << "]\n";
  }
}

inline json side_json(const SideResult& s) {
  json j;
  j["verdict"] = s.verdict == SideResult::Verdict::Yes  ? "yes"
                 : s.verdict == SideResult::Verdict::No ? "no"
                                                         : "unknown";
  j["method"] = std::string(name(s.method));
  if (s.decomposition) {
    j["psd_part"] = matrix_json(s.decomposition->psd);
    j["nonneg_part"] = matrix_json(s.decomposition->nonneg);
  }
  if (s.simplex) j["simplex_min"] = {{"value", s.simplex->value}, {"minimizer", vec_json(s.simplex->minimizer)}};
  if (s.counterexample)
    j["counterexample"] = {{"vector", vec_json(*s.counterexample)}, {"value", s.counterexample_value}};
  return j;
}

inline std::string pair_label(const Network& net, VarId v, ValuePair p) {
  const auto& o = net.variable(v).outcomes;
  return "(" + o[p.first] + "," + o[p.second] + ")";
}

inline json verdict_json(const Network& net, VarId a, VarId b, const SynergyVerdict& v) {
  json j;
  j["overall"] = std::string(name(v.overall));
  j["pairs"] = json::array();
  for (const auto& pc : v.per_pair) {
    const auto& hd = pc.definiteness;
    json p{{"a_pair", pair_label(net, a, pc.matrix.a_pair)},
           {"b_pair", pair_label(net, b, pc.matrix.b_pair)},
           {"x", pc.matrix.x_labels},
           {"D", matrix_json(pc.matrix.entries)},
           {"class", std::string(name(hd.cls))},
           {"method", std::string(name(hd.method))},
           {"sign", std::string(name(pc.sign))}};
    if (hd.zero_symmetric_part) p["zero_symmetric_part"] = true;
    if (hd.cls != Definiteness::ZeroMatrix) {
      p["half_pos_test"] = side_json(hd.positive);
      p["half_neg_test"] = side_json(hd.negative);
    }
    j["pairs"].push_back(p);
  }
  auto witness = [&](const std::optional<PriorWitness>& w) -> json {
    if (!w) return nullptr;
    return {{"pair", w->pair}, {"prior", vec_json(w->prior)}, {"value", w->value}};
  };
  j["positive_witness"] = witness(v.positive_witness);
  j["negative_witness"] = witness(v.negative_witness);
  return j;
}

inline void print_side(std::ostream& os, const char* label, const SideResult& s) {
  os << "      " << label << ": "
     << (s.verdict == SideResult::Verdict::Yes ? "yes" : s.verdict == SideResult::Verdict::No ? "no" : "unknown")
     << " via " << name(s.method);
  if (s.simplex) os << ", simplex min " << num(s.simplex->value) << " at " << vec_str(s.simplex->minimizer);
  if (s.counterexample) os << ", counterexample " << vec_str(*s.counterexample) << " -> " << num(s.counterexample_value);
  os << "\n";
  if (s.decomposition) {
    os << "        psd part:\n";
    print_matrix(os, s.decomposition->psd, "          ");
    os << "        non-negative part:\n";
    print_matrix(os, s.decomposition->nonneg, "          ");
  }
}

inline void print_verdict(std::ostream& os, const Network& net, VarId a, VarId b, const SynergyVerdict& v) {
  for (const auto& pc : v.per_pair) {
    const auto& hd = pc.definiteness;
    os << "  a " << pair_label(net, a, pc.matrix.a_pair) << ", b " << pair_label(net, b, pc.matrix.b_pair)
       << ", x outcomes [";
    for (std::size_t i = 0; i < pc.matrix.x_labels.size(); ++i) os << (i ? ", " : "") << pc.matrix.x_labels[i];
    os << "]\n    D =\n";
    print_matrix(os, pc.matrix.entries, "      ");
    os << "    class: " << name(hd.cls) << " (" << name(hd.method) << ")"
       << (hd.zero_symmetric_part ? ", symmetric part is zero" : "") << ", sign " << symbol(pc.sign) << "\n";
    if (hd.cls != Definiteness::ZeroMatrix) {
      print_side(os, "half positive semi-definite", hd.positive);
      print_side(os, "half negative semi-definite", hd.negative);
    }
  }
  os << "overall: " << name(v.overall) << "\n";
  if (v.positive_witness)
    os << "witness prior (positive form " << num(v.positive_witness->value) << "): "
       << vec_str(v.positive_witness->prior) << "\n";
  if (v.negative_witness)
    os << "witness prior (negative form " << num(v.negative_witness->value) << "): "
       << vec_str(v.negative_witness->prior) << "\n";
}

// --- verbs ---------------------------------------------------------------

struct Options {
  std::string file;
  std::string format = "human";
  double eps = kDefaultTolerance;
  std::uint64_t seed = kDefaultSeed;
  std::string pair, child, outcome, observe, effect, prior, grid, lambda_grid, deltas, csv;
  double lambda = 1.0;
  int version = 2;
  std::size_t priors = 100;
};

inline ClassifyOptions classify_options(const Options& o) {
  ClassifyOptions c;
  c.eps = o.eps;
  c.seed = o.seed;
  return c;
}

inline bool json_out(const Options& o) { return o.format == "json"; }

inline int cmd_validate(const Network& net, const Options& o, std::ostream& out) {
  if (json_out(o)) {
    out << json{{"valid", true}, {"variables", net.size()}}.dump(2) << "\n";
  } else {
    out << "valid: " << net.size() << " variables\n";
    for (VarId v : net.topological_order()) {
      out << "  " << net.name(v) << " [" << net.cardinality(v) << " outcomes]";
      if (!net.is_root(v)) {
        out << " <- ";
        for (std::size_t i = 0; i < net.parents(v).size(); ++i) out << (i ? ", " : "") << net.name(net.parents(v)[i]);
      }
      if (net.node(v).noisy_or) out << " (noisy-or)";
      out << "\n";
    }
  }
  return kOk;
}

inline int cmd_report(const Network& net, const Options& o, std::ostream& out) {
  json doc = json::array();
  for (VarId c : net.topological_order()) {
    const auto& parents = net.parents(c);
    if (parents.empty()) continue;
    json node{{"child", net.name(c)}};
    if (!json_out(o)) out << "node " << net.name(c) << "\n";
    for (VarId p : parents) {
      const Sign s = qualitative_influence(net, p, c, o.eps).sign;
      node["influences"].push_back({{"cause", net.name(p)}, {"sign", std::string(symbol(s))}});
      if (!json_out(o)) out << "  S^" << symbol(s) << "(" << net.name(p) << ", " << net.name(c) << ")\n";
    }
    for (std::size_t i = 0; i < parents.size(); ++i)
      for (std::size_t j = i + 1; j < parents.size(); ++j) {
        const std::pair<VarId, VarId> pr{parents[i], parents[j]};
        const std::string pl = "{" + net.name(pr.first) + ", " + net.name(pr.second) + "}";
        const Sign y = additive_synergy(net, pr, c, o.eps).sign;
        node["additive"].push_back({{"pair", {net.name(pr.first), net.name(pr.second)}}, {"sign", std::string(symbol(y))}});
        if (!json_out(o)) out << "  Y^" << symbol(y) << "(" << pl << ", " << net.name(c) << ")\n";
        for (std::size_t k = 0; k < net.cardinality(c); ++k) {
          const Sign x = product_synergy_1(net, c, pr, k, o.eps).sign;
          const std::string& label = net.variable(c).outcomes[k];
          node["product_synergy_1"].push_back(
              {{"pair", {net.name(pr.first), net.name(pr.second)}}, {"outcome", label}, {"sign", std::string(symbol(x))}});
          if (!json_out(o)) out << "  X^" << symbol(x) << "(" << pl << ", " << label << ")\n";
        }
      }
    doc.push_back(node);
  }
  if (json_out(o)) out << doc.dump(2) << "\n";
  return kOk;
}

inline int cmd_prodsyn(const Network& net, const Options& o, std::ostream& out) {
  const auto [an, bn] = parse_pair(o.pair);
  const VarId a = net.id(an), b = net.id(bn), c = net.id(o.child);
  const std::size_t k = net.outcome(c, o.outcome);
  if (o.version == 1) {
    const SignWitness w = product_synergy_1(net, c, {a, b}, k, o.eps);
    if (json_out(o)) {
      json j{{"version", 1}, {"sign", std::string(name(w.sign))}};
      if (auto inst = w.witness())
        j["witness"] = {{"a_pair", {inst->a_hi, inst->a_lo}}, {"b_pair", {inst->b_pair->first, inst->b_pair->second}},
                        {"x", inst->x}, {"lhs", inst->lhs}, {"rhs", inst->rhs}};
      out << j.dump(2) << "\n";
    } else {
      out << "product synergy I X^" << symbol(w.sign) << "({" << an << ", " << bn << "}, " << o.outcome << "): "
          << name(w.sign) << "\n";
      if (auto inst = w.witness())
        out << "  witness: a " << pair_label(net, a, {inst->a_hi, inst->a_lo}) << ", b "
            << pair_label(net, b, *inst->b_pair) << ", x#" << inst->x << ": " << num(inst->lhs) << " < "
            << num(inst->rhs) << "\n";
    }
    return kOk;
  }
  const SynergyVerdict v = product_synergy_2(net, c, {a, b}, k, classify_options(o));
  if (json_out(o)) {
    json j = verdict_json(net, a, b, v);
    j["version"] = 2;
    out << j.dump(2) << "\n";
  } else {
    out << "product synergy II for {" << an << ", " << bn << "} on " << o.child << "=" << o.outcome << "\n";
    print_verdict(out, net, a, b, v);
  }
  return kOk;
}

// Resolves --observe c=C and checks that c is the common child.
inline std::pair<VarId, std::size_t> observed_child(const Network& net, const std::string& spec) {
  const auto [cn, label] = parse_assignment(spec);
  const VarId c = net.id(cn);
  return {c, net.outcome(c, label)};
}

inline int cmd_intercausal(const Network& net, const Options& o, std::ostream& out) {
  const auto [an, bn] = parse_pair(o.pair);
  const VarId a = net.id(an), b = net.id(bn);
  const auto [c, k] = observed_child(net, o.observe);
  check_intercausal_structure(net, a, b, c);
  const SynergyVerdict v = product_synergy_2(net, c, {a, b}, k, classify_options(o));
  if (json_out(o)) {
    json j = verdict_json(net, a, b, v);
    j["intercausal_sign"] = std::string(name(v.overall));
    out << j.dump(2) << "\n";
  } else {
    out << "intercausal influence between " << an << " and " << bn << " given " << o.observe << ": "
        << name(v.overall) << "\n";
    print_verdict(out, net, a, b, v);
  }
  return kOk;
}

inline int cmd_indirect(const Network& net, const Options& o, std::ostream& out) {
  if (!o.deltas.empty()) {
    auto parts = split(o.deltas, ',');
    if (parts.size() != 4) throw ValidationError("--deltas expects four signs d1,d2,d3,d4");
    IndirectSetup s{parse_sign(parts[0]), parse_sign(parts[1]), parse_sign(parts[2]), parse_sign(parts[3])};
    const Sign pred = indirect_sign_predict(s);
    if (json_out(o))
      out << json{{"prediction", std::string(name(pred))}}.dump(2) << "\n";
    else
      out << "predicted intercausal sign with evidence observed: " << name(pred) << "\n";
    return kOk;
  }
  if (o.pair.empty() || o.effect.empty())
    throw ValidationError("indirect: --pair and --effect are required with --lambda");
  if (!(o.lambda >= 0.0) || !std::isfinite(o.lambda)) throw ValidationError("--lambda must be finite and >= 0");
  const auto [an, bn] = parse_pair(o.pair);
  const VarId a = net.id(an), b = net.id(bn), c = net.id(o.effect);
  check_intercausal_structure(net, a, b, c);
  const Sign delta4 = sign_of(o.lambda - 1.0, 0.0);
  const IndirectSetup s = indirect_setup(net, c, {a, b}, delta4, classify_options(o));
  const Sign pred = indirect_sign_in_regime(s.delta1, s.delta2, s.delta3, regime_of_lambda(o.lambda));

  // Forms at the network's own distribution of the remaining parents.
  const CompoundCpt t = compound_parents(net, c, std::make_pair(a, b));
  Vector prior = Vector::Ones(static_cast<Eigen::Index>(t.n_x));
  if (!t.members.empty()) {
    const auto joint = joint_marginal(net, t.members);
    prior = Eigen::Map<const Vector>(joint.data(), static_cast<Eigen::Index>(joint.size()));
  }
  json forms = json::array();
  for (std::size_t a1 = 0; a1 < net.cardinality(a); ++a1)
    for (std::size_t a2 = a1 + 1; a2 < net.cardinality(a); ++a2)
      for (std::size_t b1 = 0; b1 < net.cardinality(b); ++b1)
        for (std::size_t b2 = b1 + 1; b2 < net.cardinality(b); ++b2) {
          const LambdaForm f = lambda_form(net, c, a, b, {a1, a2}, {b1, b2}, prior);
          const SecondZero z = second_zero(f);
          json e{{"a_pair", pair_label(net, a, {a1, a2})},
                 {"b_pair", pair_label(net, b, {b1, b2})},
                 {"q_C", f.q_c},
                 {"q_notC", f.q_cbar},
                 {"y", f.y},
                 {"form", f.product_form(o.lambda)},
                 {"second_zero", z.lambda ? json(*z.lambda) : json(nullptr)},
                 {"second_zero_in_range", z.in_range}};
          forms.push_back(e);
        }
  std::optional<double> influence;
  if (net.variable(a).is_binary() && net.variable(b).is_binary())
    influence = intercausal_influence(net, a, b, likelihood_ratio_evidence(c, o.lambda));

  if (json_out(o)) {
    json j{{"lambda", o.lambda},
           {"deltas", {symbol(s.delta1), symbol(s.delta2), symbol(s.delta3), symbol(s.delta4)}},
           {"prediction", std::string(name(pred))},
           {"forms", forms}};
    j["oracle_influence"] = influence ? json(*influence) : json(nullptr);
    out << j.dump(2) << "\n";
  } else {
    out << "lambda = " << num(o.lambda) << "\n"
        << "  X^" << symbol(s.delta1) << "({" << an << ", " << bn << "}, " << net.variable(c).outcomes[0] << ")\n"
        << "  X^" << symbol(s.delta2) << "({" << an << ", " << bn << "}, " << net.variable(c).outcomes[1] << ")\n"
        << "  Y^" << symbol(s.delta3) << "({" << an << ", " << bn << "}, " << o.effect << ")\n"
        << "  evidence regime sign " << symbol(s.delta4) << "\n"
        << "predicted intercausal sign: " << name(pred) << "\n";
    for (const auto& e : forms) {
      out << "  a " << e["a_pair"].get<std::string>() << ", b " << e["b_pair"].get<std::string>()
          << ": q_C=" << num(e["q_C"]) << " q_notC=" << num(e["q_notC"]) << " y=" << num(e["y"])
          << " form=" << num(e["form"]);
      if (!e["second_zero"].is_null())
        out << " second zero " << num(e["second_zero"]) << (e["second_zero_in_range"].get<bool>() ? "" : " (out of range)");
      out << "\n";
    }
    if (influence) out << "oracle influence: " << num(*influence) << "\n";
  }
  return kOk;
}

inline int cmd_sweep(const Network& net, const Options& o, std::ostream& out) {
  const auto [an, bn] = parse_pair(o.pair);
  const VarId a = net.id(an), b = net.id(bn);
  SweepSeries series;
  if (!o.prior.empty()) {
    if (o.grid.empty()) throw ValidationError("sweep --prior needs --grid start:end:count");
    const auto grid = parse_grid(o.grid);
    Evidence ev;
    if (!o.observe.empty()) {
      const auto [c, k] = observed_child(net, o.observe);
      ev.observe(c, k);
    }
    series = sweep_prior(net, net.id(o.prior), grid, a, b, ev);
  } else if (!o.lambda_grid.empty()) {
    if (o.effect.empty()) throw ValidationError("sweep --lambda needs --effect");
    const auto grid = parse_grid(o.lambda_grid);
    series = sweep_lambda(net, net.id(o.effect), grid, a, b);
  } else {
    throw ValidationError("sweep needs either --prior with --grid or --lambda with --effect");
  }
  if (o.csv.empty() || o.csv == "-") {
    write_sweep_csv(out, series);
  } else {
    std::ofstream f(o.csv, std::ios::binary);
    if (!f) throw ValidationError("cannot write '" + o.csv + "'");
    write_sweep_csv(f, series);
    out << "wrote " << series.size() << " rows to " << o.csv << "\n";
  }
  return kOk;
}

inline int cmd_oracle_check(const Network& net, const Options& o, std::ostream& out) {
  const auto [an, bn] = parse_pair(o.pair);
  const VarId a = net.id(an), b = net.id(bn);
  const auto [c, k] = observed_child(net, o.observe);
  check_intercausal_structure(net, a, b, c);
  const SynergyVerdict v = product_synergy_2(net, c, {a, b}, k, classify_options(o));

  std::mt19937_64 rng(o.seed);
  std::exponential_distribution<double> expo(1.0);
  std::vector<VarId> roots;
  for (VarId r : net.topological_order())
    if (net.is_root(r)) roots.push_back(r);

  std::size_t agree = 0, disagree = 0;
  std::map<Sign, std::size_t> observed;
  for (std::size_t t = 0; t < o.priors; ++t) {
    Network trial = net;
    for (VarId r : roots) {
      std::vector<double> p(net.cardinality(r));
      double sum = 0.0;
      for (double& x : p) sum += (x = expo(rng));
      for (double& x : p) x /= sum;
      trial = trial.with_prior(r, p);
    }
    const DominanceCheck d = influence_sign(trial, a, b, Evidence{}.observe(c, k), o.eps);
    ++observed[d.sign];
    (consistent_with(v.overall, d.sign) ? agree : disagree)++;
  }
  if (json_out(o)) {
    json j{{"prediction", std::string(name(v.overall))}, {"trials", o.priors}, {"agree", agree}, {"disagree", disagree}};
    for (const auto& [s, n] : observed) j["observed"][std::string(name(s))] = n;
    out << j.dump(2) << "\n";
  } else {
    out << "prediction: " << name(v.overall) << "\n"
        << "random priors: " << o.priors << ", agree " << agree << ", disagree " << disagree << "\n";
    for (const auto& [s, n] : observed) out << "  oracle " << name(s) << ": " << n << "\n";
  }
  return kOk;
}

// --- entry point -----------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Qualitative intercausal reasoning for discrete belief networks", "qpn"};
  app.require_subcommand(1);
  Options o;
  try {
    o.seed = default_seed();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }

  auto common = [&](CLI::App* sub) {
    sub->add_option("file", o.file, "Network file (JSON)")->required();
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"human", "json"}));
    sub->add_option("--eps", o.eps, "Comparison tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "Random seed (default from QPN_SEED)");
  };

  auto* validate = app.add_subcommand("validate", "Parse and validate a network");
  common(validate);
  auto* report = app.add_subcommand("report", "Qualitative influences and synergies of every node");
  common(report);
  auto* prodsyn = app.add_subcommand("prodsyn", "Product synergy of a parent pair");
  common(prodsyn);
  prodsyn->add_option("--child", o.child)->required();
  prodsyn->add_option("--pair", o.pair)->required();
  prodsyn->add_option("--outcome", o.outcome)->required();
  prodsyn->add_option("--version", o.version)->check(CLI::IsMember({1, 2}));
  auto* intercausal = app.add_subcommand("intercausal", "Intercausal sign with the common effect observed");
  common(intercausal);
  intercausal->add_option("--pair", o.pair)->required();
  intercausal->add_option("--observe", o.observe, "c=OUTCOME")->required();
  auto* indirect = app.add_subcommand("indirect", "Intercausal sign with indirect evidence");
  common(indirect);
  indirect->add_option("--pair", o.pair);
  indirect->add_option("--effect", o.effect);
  auto* lambda_opt = indirect->add_option("--lambda", o.lambda, "Likelihood ratio Pr(d|C)/Pr(d|notC)");
  auto* deltas_opt = indirect->add_option("--deltas", o.deltas, "Signs d1,d2,d3,d4");
  lambda_opt->excludes(deltas_opt);
  auto* sweep = app.add_subcommand("sweep", "Oracle intercausal influence over a parameter grid");
  common(sweep);
  sweep->add_option("--pair", o.pair)->required();
  auto* prior_opt = sweep->add_option("--prior", o.prior, "Binary root whose prior is swept");
  sweep->add_option("--grid", o.grid, "start:end:count");
  sweep->add_option("--observe", o.observe, "c=OUTCOME");
  auto* lgrid_opt = sweep->add_option("--lambda", o.lambda_grid, "start:end:count");
  sweep->add_option("--effect", o.effect);
  sweep->add_option("--csv", o.csv, "Output CSV path (default stdout)");
  prior_opt->excludes(lgrid_opt);
  auto* check = app.add_subcommand("oracle-check", "Compare the product-synergy prediction with exact inference");
  common(check);
  check->add_option("--pair", o.pair)->required();
  check->add_option("--observe", o.observe)->required();
  check->add_option("--priors", o.priors, "Number of random priors")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }

  try {
    const Network net = load_network(o.file);
    if (validate->parsed()) return cmd_validate(net, o, out);
    if (report->parsed()) return cmd_report(net, o, out);
    if (prodsyn->parsed()) return cmd_prodsyn(net, o, out);
    if (intercausal->parsed()) return cmd_intercausal(net, o, out);
    if (indirect->parsed()) return cmd_indirect(net, o, out);
    if (sweep->parsed()) return cmd_sweep(net, o, out);
    if (check->parsed()) return cmd_oracle_check(net, o, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const PreconditionError& e) {
    err << "refused: " << e.what() << "\n";
    return kPrecondition;
  } catch (const LimitError& e) {
    err << "limit: " << e.what() << "\n";
    return kLimit;
  }
  return kValidation;
}

}  // namespace qpn::cli
