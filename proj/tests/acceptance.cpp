// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit status if
// any criterion fails.  Tolerances are fixed here and never relaxed at run
// time.

#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qpn/copositivity.hpp"
#include "qpn/oracle.hpp"
#include "qpn/qual.hpp"
#include "qpn/synergy2.hpp"
#include "support/equivalence.hpp"
#include "support/test_support.hpp"

namespace {

using namespace qpn;
using testing::sign_flip_network;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << what;
      pass = false;
    }
  }
};

using Criterion = std::function<void(Outcome&)>;

// 1. Qualitative signs of the sign-flip network.
void influences_and_product_synergy(Outcome& o) {
  const Network net = load_network(testing::data_path("sign_flip.net"));
  const VarId c = net.id("c");
  for (const char* p : {"a", "b", "x"}) {
    const Sign s = qualitative_influence(net, net.id(p), c, 1e-9).sign;
    o.require(s == Sign::Positive, std::string("S(") + p + ", c) = " + std::string(name(s)));
  }
  for (auto [p, q] : {std::pair{"a", "b"}, std::pair{"a", "x"}, std::pair{"b", "x"}}) {
    const Sign s = product_synergy_1(net, c, {net.id(p), net.id(q)}, 0, 1e-9).sign;
    o.require(s == Sign::Negative, std::string("X({") + p + ", " + q + "}, C) = " + std::string(name(s)));
  }
  if (o.pass) o.detail << "S^+ for a, b, x; X^- for {a,b}, {a,x}, {b,x}";
}

// 2. The oracle's intercausal influence changes sign with Pr(x).
void oracle_sign_flip(Outcome& o) {
  struct Point {
    double px, same, cross;
    int sign;
  };
  for (const Point& pt : {Point{0.0, 0.0, 0.04, -1}, Point{1.0, 0.594, 0.64, -1}, Point{0.5, 0.297, 0.25, +1}}) {
    const Network net = sign_flip_network(0.5, 0.5, pt.px);
    const VarId a = net.id("a"), b = net.id("b"), c = net.id("c");
    auto pc = [&](std::size_t ia, std::size_t ib) {
      return posterior(net, c, Evidence{}.observe(a, ia).observe(b, ib)).probs[0];
    };
    const double same = pc(0, 0) * pc(1, 1), cross = pc(1, 0) * pc(0, 1);
    o.require(std::abs(same - pt.same) < 1e-12 && std::abs(cross - pt.cross) < 1e-12,
              "cross products at Pr(X)=" + std::to_string(pt.px));
    const double infl = intercausal_influence(net, a, b, Evidence{}.observe(c, 0));
    o.require(infl * pt.sign > 1e-3, "influence at Pr(X)=" + std::to_string(pt.px) + " is " + std::to_string(infl));
    if (o.pass) o.detail << (pt.px == 0.0 ? "" : "; ") << "Pr(X)=" << pt.px << ": " << infl;
  }
}

// 3. Product synergy II reports the flip with a confirmed witness.
void product_synergy_two_detects_flip(Outcome& o) {
  const Network base = sign_flip_network();
  const VarId a = base.id("a"), b = base.id("b"), c = base.id("c");
  const SynergyVerdict v = product_synergy_2(base, c, {a, b}, 0);
  o.require(v.overall == Sign::Ambiguous, "verdict " + std::string(name(v.overall)));
  o.require(v.positive_witness.has_value(), "no positive witness");
  if (!o.pass) return;
  const double px = v.positive_witness->prior(0);
  const double at_witness = intercausal_influence(sign_flip_network(0.5, 0.5, px), a, b, Evidence{}.observe(c, 0));
  o.require(at_witness > 0.0, "oracle at witness prior gives " + std::to_string(at_witness));
  for (double vertex : {1.0, 0.0}) {
    const double infl = intercausal_influence(sign_flip_network(0.5, 0.5, vertex), a, b, Evidence{}.observe(c, 0));
    o.require(infl < 0.0, "oracle at Pr(X)=" + std::to_string(vertex) + " gives " + std::to_string(infl));
  }
  if (o.pass) o.detail << "witness Pr(X)=" << px << ", oracle influence " << at_witness;
}

// 4. Verdict/oracle equivalence over random networks.
void oracle_equivalence(Outcome& o) {
  std::mt19937_64 rng(20240611);
  testing::Tally t;
  for (int i = 0; i < 240; ++i) {
    const auto kind = i < 120 ? testing::CptKind::Random
                              : (i % 2 ? testing::CptKind::MonotoneNoisyOr : testing::CptKind::Product);
    testing::check_intercausal_case(testing::random_intercausal_case(rng, kind), rng, t, 20);
  }
  o.require(t.disagreements == 0, std::to_string(t.disagreements) + " disagreements, first: " + t.first);
  o.require(t.ambiguous > 0 && t.signed_verdicts > 0, "verdict mix is one-sided");
  if (o.pass)
    o.detail << t.cases << " networks, " << t.checks << " oracle checks (" << t.signed_verdicts << " signed, "
             << t.ambiguous << " ambiguous verdicts), 0 disagreements";
}

// 5. Half semi-definiteness: soundness, 2x2 completeness, exact minimum.
void copositivity(Outcome& o) {
  std::mt19937_64 rng(20240612);
  int sound_fail = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto n = static_cast<Eigen::Index>(testing::pick(rng, 1, 6));
    const Matrix b = testing::random_matrix(rng, n);
    const Matrix m = b * b.transpose() + testing::random_matrix(rng, n, 0.0, 1.0);
    if (classify_half_definite(m).cls != Definiteness::HalfPosSemiDef) ++sound_fail;
  }
  o.require(sound_fail == 0, std::to_string(sound_fail) + " PSD+nonnegative sums misclassified");

  int disagree = 0, yes = 0;
  for (int i = 0; i < 1000; ++i) {
    const Matrix m = testing::random_matrix(rng, 2);
    const bool exact = simplex_min_exact(m).value >= -scaled_tolerance(m, 1e-9);
    const bool decomposed = decompose_psd_plus_nonneg(m).has_value();
    yes += exact;
    if (exact != decomposed) ++disagree;
  }
  o.require(disagree == 0, std::to_string(disagree) + " 2x2 exact/decomposition disagreements");

  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto n = static_cast<Eigen::Index>(testing::pick(rng, 2, 4));
    const Matrix m = symmetric_part(testing::random_matrix(rng, n));
    worst = std::max(worst, std::abs(simplex_min_exact(m).value - testing::grid_simplex_min(m)));
  }
  o.require(worst <= 1e-6, "exact vs grid gap " + std::to_string(worst));
  if (o.pass)
    o.detail << "1000/1000 sums half-PSD; 2x2 agreement 1000/1000 (" << yes << " half-PSD); max |exact-grid| "
             << worst;
}

// 6. Noisy-OR synergy matrix closed form.
void noisy_or_closed_form(Outcome& o) {
  std::mt19937_64 rng(20240613);
  double worst = 0.0;
  int wrong_sign = 0;
  for (int i = 0; i < 100; ++i) {
    const double p = testing::uniform(rng, 0.01, 0.99), q = testing::uniform(rng, 0.01, 0.99),
                 r = testing::uniform(rng, 0.01, 0.99), l = testing::uniform(rng, 0.0, 0.99);
    std::vector<Variable> vars{{"a", {"A", "notA"}}, {"b", {"B", "notB"}}, {"x", {"X", "notX"}}, {"c", {"C", "notC"}}};
    std::vector<NodeDecl> decls;
    for (const char* root : {"a", "b", "x"})
      decls.push_back({root, {}, std::vector<std::vector<double>>{testing::dirichlet(rng, 2)}});
    decls.push_back({"c", {"a", "b", "x"}, NoisyOrParams{{p, q, r}, l}});
    const Network net = Network::build(vars, decls);
    const VarId a = net.id("a"), b = net.id("b"), c = net.id("c");
    const Matrix d = build_D(net, c, a, b, 0, {0, 1}, {0, 1}).entries;
    const Matrix closed = noisy_or_D_closed_form(p, q, r, l);
    const double k = 1.0 - l;
    worst = std::max({worst, (symmetric_part(d) - symmetric_part(closed)).cwiseAbs().maxCoeff(),
                      std::abs(d(0, 0) + k * p * q * (1 - r)), std::abs(d(1, 1) + k * p * q),
                      std::abs(d(0, 1) + d(1, 0) + k * p * q * (2 - r))});
    if (product_synergy_2(net, c, {a, b}, 0).overall != Sign::Negative) ++wrong_sign;
    if (product_synergy_2(net, c, {a, b}, 1).overall != Sign::Zero) ++wrong_sign;
  }
  o.require(worst <= 1e-12, "max entry deviation " + std::to_string(worst));
  o.require(wrong_sign == 0, std::to_string(wrong_sign) + " wrong synergy signs");
  if (o.pass) o.detail << "100 gates, max deviation " << worst << ", C Negative / notC Zero throughout";
}

// 7. Dependence on the likelihood ratio.
void lambda_behaviour(Outcome& o) {
  std::mt19937_64 rng(20240614);
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(i * 0.05);
  testing::LambdaTally t;
  for (int i = 0; i < 100; ++i)
    testing::check_lambda_case(testing::random_intercausal_case(rng, testing::CptKind::Random, true, true), grid, t);
  o.require(t.sign_mismatches == 0, std::to_string(t.sign_mismatches) + " sign mismatches, first: " + t.first);
  o.require(t.worst_unit < 1e-9, "influence at lambda=1 is " + std::to_string(t.worst_unit));
  o.require(t.worst_fit <= 1e-8, "quadratic fit error " + std::to_string(t.worst_fit));

  int noisy_wrong = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<Variable> vars{{"a", {"A", "notA"}}, {"b", {"B", "notB"}}, {"x", {"X", "notX"}}, {"c", {"C", "notC"}}};
    std::vector<NodeDecl> decls;
    for (const char* root : {"a", "b", "x"})
      decls.push_back({root, {}, std::vector<std::vector<double>>{testing::dirichlet(rng, 2, 0.05)}});
    decls.push_back({"c", {"a", "b", "x"},
                     NoisyOrParams{{testing::uniform(rng, 0.01, 0.99), testing::uniform(rng, 0.01, 0.99),
                                    testing::uniform(rng, 0.01, 0.99)},
                                   testing::uniform(rng, 0.0, 0.99)}});
    const Network net = Network::build(vars, decls);
    for (const auto& [lambda, infl] : sweep_lambda(net, net.id("c"), grid, net.id("a"), net.id("b"))) {
      if (lambda > 1.0 && !(infl < 0.0)) ++noisy_wrong;
      if (lambda > 0.0 && lambda < 1.0 && !(infl > 0.0)) ++noisy_wrong;
    }
  }
  o.require(noisy_wrong == 0, std::to_string(noisy_wrong) + " noisy-or grid points with the wrong sign");
  if (o.pass)
    o.detail << t.networks << " networks x " << grid.size() << " points agree; |infl(1)| <= " << t.worst_unit
             << "; fit error " << t.worst_fit << "; noisy-or signs hold on 100 gates";
}

Network with_evidence_child(const Network& net, VarId c, double pd_c, double pd_notc) {
  auto vars = net.variables();
  auto decls = net.declarations();
  vars.push_back({"d", {"D", "notD"}});
  decls.push_back({"d", {net.name(c)}, std::vector<std::vector<double>>{{pd_c, 1 - pd_c}, {pd_notc, 1 - pd_notc}}});
  return Network::build(vars, decls);
}

// 8. Predictions with indirect evidence under both rule premises.
void indirect_rules(Outcome& o) {
  std::mt19937_64 rng(20240615);
  std::vector<Variable> vars{{"a", {"A", "notA"}}, {"b", {"B", "notB"}}, {"x", {"X", "notX"}}, {"c", {"C", "notC"}}};
  auto roots = [&] {
    std::vector<NodeDecl> decls;
    for (const char* r : {"a", "b", "x"})
      decls.push_back({r, {}, std::vector<std::vector<double>>{testing::dirichlet(rng, 2, 0.05)}});
    return decls;
  };
  // Pr(C | a, b, x) = P(a, b) g(x)
  auto scaled = [](const double (&p)[2][2], const double (&g)[2]) {
    std::vector<std::vector<double>> rows;
    for (int ia = 0; ia < 2; ++ia)
      for (int ib = 0; ib < 2; ++ib)
        for (int ix = 0; ix < 2; ++ix) {
          const double v = p[ia][ib] * g[ix];
          rows.push_back({v, 1.0 - v});
        }
    return rows;
  };

  struct Family {
    std::string label;
    Sign delta4;
    std::function<NodeDecl()> child;
  };
  const std::vector<Family> families{
      {"noisy-or, supporting", Sign::Positive,
       [&] {
         return NodeDecl{"c", {"a", "b", "x"},
                         NoisyOrParams{{testing::uniform(rng, 0.1, 0.9), testing::uniform(rng, 0.1, 0.9),
                                        testing::uniform(rng, 0.1, 0.9)},
                                       testing::uniform(rng, 0.0, 0.5)}};
       }},
      {"super-additive, supporting", Sign::Positive,
       [&] { return NodeDecl{"c", {"a", "b", "x"}, scaled({{0.9, 0.1}, {0.1, 0.05}}, {1.0, 0.8})}; }},
      {"noisy-or, opposing", Sign::Negative,
       [&] {
         return NodeDecl{"c", {"a", "b", "x"},
                         NoisyOrParams{{testing::uniform(rng, 0.1, 0.9), testing::uniform(rng, 0.1, 0.9),
                                        testing::uniform(rng, 0.1, 0.9)},
                                       testing::uniform(rng, 0.0, 0.5)}};
       }},
      {"notC-synergic, opposing", Sign::Negative,
       [&] { return NodeDecl{"c", {"a", "b", "x"}, scaled({{0.9, 0.8}, {0.8, 0.5}}, {1.0, 0.95})}; }},
  };

  int runs = 0;
  double worst_gap = 0.0;
  for (const Family& f : families) {
    for (int trial = 0; trial < 25; ++trial) {
      auto decls = roots();
      decls.push_back(f.child());
      const Network base = Network::build(vars, decls);
      const VarId a = base.id("a"), b = base.id("b"), c = base.id("c");
      // d's CPT realises the requested sign of the c -> d influence.
      double hi = testing::uniform(rng, 0.3, 0.95), lo = testing::uniform(rng, 0.05, 0.9 * hi);
      if (f.delta4 == Sign::Negative) std::swap(hi, lo);
      const Network net = with_evidence_child(base, c, hi, lo);
      const VarId d = net.id("d");
      const IndirectSetup s = indirect_setup(net, c, {a, b}, d);
      const bool premise = f.delta4 == Sign::Positive ? (s.delta4 == Sign::Positive && s.delta1 == s.delta3)
                                                      : (s.delta4 == Sign::Negative && s.delta2 != s.delta3);
      o.require(premise, f.label + ": premise not realised");
      const Sign predicted = indirect_sign_predict(s);
      const double explicit_d = intercausal_influence(net, a, b, Evidence{}.observe(d, 0));
      const double virtual_d = intercausal_influence(base, a, b, likelihood_ratio_evidence(c, hi / lo));
      worst_gap = std::max(worst_gap, std::abs(explicit_d - virtual_d));
      const Sign observed = sign_of(explicit_d, 1e-12);
      o.require(predicted != Sign::Ambiguous && predicted == observed,
                f.label + ": predicted " + std::string(name(predicted)) + ", oracle " + std::to_string(explicit_d));
      ++runs;
    }
  }
  o.require(worst_gap <= 1e-12, "explicit vs virtual evidence gap " + std::to_string(worst_gap));
  if (o.pass) o.detail << runs << " networks over 4 families match; explicit/virtual gap " << worst_gap;
}

// 9. q_C - q_notC equals the marginalized additive expression.
void binary_identity(Outcome& o) {
  std::mt19937_64 rng(20240616);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto rc = testing::random_intercausal_case(rng, testing::CptKind::Random, false, true);
    const std::size_t n_x = compound_parents(rc.net, rc.c, std::make_pair(rc.a, rc.b)).n_x;
    for (int k = 0; k < 10; ++k) {
      const Vector p = testing::random_simplex_point(rng, n_x);
      for (std::size_t a2 = 1; a2 < rc.net.cardinality(rc.a); ++a2)
        for (std::size_t b2 = 1; b2 < rc.net.cardinality(rc.b); ++b2) {
          const LambdaForm f = lambda_form(rc.net, rc.c, rc.a, rc.b, {0, a2}, {0, b2}, p);
          worst = std::max(worst, std::abs(f.q_c - f.q_cbar - f.y));
        }
    }
  }
  o.require(worst <= 1e-12, "max deviation " + std::to_string(worst));
  if (o.pass) o.detail << "1000 priors, max |q_C - q_notC - y| = " << worst;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, Criterion>> criteria{
      {"signs of the sign-flip network", influences_and_product_synergy},
      {"oracle sign flip over Pr(x)", oracle_sign_flip},
      {"product synergy II detects the flip", product_synergy_two_detects_flip},
      {"verdict/oracle equivalence on random networks", oracle_equivalence},
      {"half semi-definiteness tests", copositivity},
      {"noisy-or synergy matrix", noisy_or_closed_form},
      {"likelihood-ratio behaviour", lambda_behaviour},
      {"indirect-evidence rule premises", indirect_rules},
      {"binary-effect identity", binary_identity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << ": "
              << o.detail.str() << "\n";
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " acceptance criteria passed\n";
  return failed ? 1 : 0;
}
