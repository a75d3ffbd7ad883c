#include <gtest/gtest.h>

#include <random>

#include "qpn/qual.hpp"
#include "support/test_support.hpp"

namespace qpn {
namespace {

using testing::sign_flip_network;

TEST(QualitativeInfluence, SignFlipAllPositive) {
  const Network net = sign_flip_network();
  for (const char* cause : {"a", "b", "x"}) {
    const SignWitness w = qualitative_influence(net, net.id(cause), net.id("c"));
    EXPECT_EQ(w.sign, Sign::Positive) << cause;
    EXPECT_TRUE(w.holds(Sign::Positive));
    EXPECT_FALSE(w.holds(Sign::Negative));
    EXPECT_FALSE(w.witness());
  }
}

TEST(QualitativeInfluence, RequiresParent) {
  const Network net = sign_flip_network();
  EXPECT_THROW(qualitative_influence(net, net.id("a"), net.id("b")), PreconditionError);
}

TEST(QualitativeInfluence, MultiValuedTails) {
  // three-valued effect whose distribution shifts towards higher values
  // under the first cause value except for the top tail
  std::vector<Variable> vars{{"a", {"A", "notA"}}, testing::nary("c", 3)};
  std::vector<NodeDecl> decls{{"a", {}, std::vector<std::vector<double>>{{0.5, 0.5}}},
                              {"c", {"a"}, std::vector<std::vector<double>>{{0.1, 0.8, 0.1}, {0.2, 0.2, 0.6}}}};
  const Network net = Network::build(vars, decls);
  const SignWitness w = qualitative_influence(net, net.id("a"), net.id("c"));
  EXPECT_EQ(w.sign, Sign::Ambiguous);
  ASSERT_TRUE(w.witness());
  EXPECT_EQ(w.witness()->c, 0u);
  EXPECT_DOUBLE_EQ(w.witness()->lhs, 0.1);
  EXPECT_DOUBLE_EQ(w.witness()->rhs, 0.2);
}

TEST(ProductSynergyI, SignFlipNegativeForAllPairs) {
  const Network net = sign_flip_network();
  const VarId c = net.id("c");
  for (auto [p, q] : {std::pair{"a", "b"}, std::pair{"a", "x"}, std::pair{"b", "x"}}) {
    const SignWitness w = product_synergy_1(net, c, {net.id(p), net.id(q)}, 0);
    EXPECT_EQ(w.sign, Sign::Negative) << p << q;
  }
}

TEST(ProductSynergyI, SignFlipValues) {
  const Network net = sign_flip_network();
  const SignWitness w = product_synergy_1(net, net.id("c"), {net.id("a"), net.id("b")}, 0);
  ASSERT_TRUE(w.decrease);
  EXPECT_EQ(w.decrease->x, 0u);
  EXPECT_NEAR(w.decrease->lhs, 0.594, 1e-15);
  EXPECT_NEAR(w.decrease->rhs, 0.64, 1e-15);
}

TEST(ProductSynergyI, SymmetricInThePair) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto rc = testing::random_intercausal_case(rng, testing::CptKind::Random);
    for (std::size_t c0 = 0; c0 < rc.net.cardinality(rc.c); ++c0)
      EXPECT_EQ(product_synergy_1(rc.net, rc.c, {rc.a, rc.b}, c0).sign,
                product_synergy_1(rc.net, rc.c, {rc.b, rc.a}, c0).sign);
    EXPECT_EQ(additive_synergy(rc.net, {rc.a, rc.b}, rc.c).sign, additive_synergy(rc.net, {rc.b, rc.a}, rc.c).sign);
  }
}

TEST(ProductSynergyI, OutcomeOutOfRange) {
  const Network net = sign_flip_network();
  EXPECT_THROW(product_synergy_1(net, net.id("c"), {net.id("a"), net.id("b")}, 2), PreconditionError);
}

TEST(AdditiveSynergy, SignFlipIsAmbiguousWithWitness) {
  const Network net = sign_flip_network();
  const SignWitness w = additive_synergy(net, {net.id("a"), net.id("b")}, net.id("c"));
  EXPECT_EQ(w.sign, Sign::Ambiguous);
  ASSERT_TRUE(w.witness());
  // x = X: 0.99 + 0.6 < 0.8 + 0.8
  EXPECT_EQ(w.witness()->x, 0u);
  EXPECT_NEAR(w.witness()->lhs, 1.59, 1e-15);
  EXPECT_NEAR(w.witness()->rhs, 1.6, 1e-15);
  ASSERT_TRUE(w.increase);
  EXPECT_EQ(w.increase->x, 1u);
}

TEST(AdditiveSynergy, NoisyOrIsSubadditive) {
  const Network net = load_network(testing::data_path("noisy_or.net"));
  EXPECT_EQ(additive_synergy(net, {net.id("a"), net.id("b")}, net.id("c")).sign, Sign::Negative);
  EXPECT_EQ(additive_synergy(net, {net.id("a"), net.id("x")}, net.id("c")).sign, Sign::Negative);
}

TEST(ProductSynergyI, NoisyOrAbsentEffectIsZero) {
  const Network net = load_network(testing::data_path("noisy_or.net"));
  const VarId c = net.id("c");
  EXPECT_EQ(product_synergy_1(net, c, {net.id("a"), net.id("b")}, 1).sign, Sign::Zero);
  EXPECT_EQ(product_synergy_1(net, c, {net.id("a"), net.id("b")}, 0).sign, Sign::Negative);
}

TEST(ProductSynergyI, DeterministicOr) {
  std::vector<Variable> vars{{"a", {"A", "notA"}}, {"b", {"B", "notB"}}, {"c", {"C", "notC"}}};
  std::vector<NodeDecl> decls{{"a", {}, std::vector<std::vector<double>>{{0.5, 0.5}}},
                              {"b", {}, std::vector<std::vector<double>>{{0.5, 0.5}}},
                              {"c", {"a", "b"}, NoisyOrParams{{1.0, 1.0}, 0.0}}};
  const Network net = Network::build(vars, decls);
  EXPECT_EQ(product_synergy_1(net, net.id("c"), {net.id("a"), net.id("b")}, 1).sign, Sign::Zero);
  EXPECT_EQ(product_synergy_1(net, net.id("c"), {net.id("a"), net.id("b")}, 0).sign, Sign::Negative);
}

TEST(SignWitness, ViolationsMatchDirection) {
  const Network net = sign_flip_network();
  const SignWitness w = additive_synergy(net, {net.id("a"), net.id("b")}, net.id("c"));
  EXPECT_TRUE(w.violation(Sign::Positive));
  EXPECT_TRUE(w.violation(Sign::Negative));
  EXPECT_TRUE(w.violation(Sign::Zero));
  EXPECT_TRUE(w.holds(Sign::Ambiguous));
}

TEST(SignWitness, ToleranceAbsorbsTinyDifferences) {
  std::vector<Variable> vars{{"a", {"A", "notA"}}, {"c", {"C", "notC"}}};
  std::vector<NodeDecl> decls{{"a", {}, std::vector<std::vector<double>>{{0.5, 0.5}}},
                              {"c", {"a"}, std::vector<std::vector<double>>{{0.5 + 1e-12, 0.5 - 1e-12}, {0.5, 0.5}}}};
  const Network net = Network::build(vars, decls);
  EXPECT_EQ(qualitative_influence(net, net.id("a"), net.id("c")).sign, Sign::Zero);
  EXPECT_EQ(qualitative_influence(net, net.id("a"), net.id("c"), 0.0).sign, Sign::Positive);
}

}  // namespace
}  // namespace qpn
