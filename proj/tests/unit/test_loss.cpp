#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "catport/errors.hpp"
#include "catport/loss.hpp"
#include "generators.hpp"

using namespace catport;
using catport::testing::kPropertyCases;

TEST(Kraus, Completeness) {
  for (double eta : {0.65, 0.8, 1.0}) {
    const auto ch = LossChannel::covering(eta, 120);
    EXPECT_LT(ch.completeness_defect(120, 60), 1e-9) << eta;
  }
}

TEST(Kraus, IdentityWithoutLoss) {
  const auto a0 = kraus_operator(1.0, 0, 30);
  EXPECT_TRUE(a0.matrix().isIdentity(0.0));
  EXPECT_TRUE(kraus_operator(1.0, 2, 30).matrix().isZero(0.0));
}

TEST(Kraus, SinglePhotonLoss) {
  const double eta = 0.7;
  const auto a1 = kraus_operator(eta, 1, 10);
  // A_1 |1> = sqrt(1-eta) |0>
  EXPECT_NEAR(std::abs(a1.matrix()(0, 1)), std::sqrt(1.0 - eta), 1e-15);
  // A_1 |2> = sqrt(2 eta (1-eta)) |1>
  EXPECT_NEAR(std::abs(a1.matrix()(1, 2)), std::sqrt(2.0 * eta * (1.0 - eta)), 1e-15);
}

TEST(Kraus, CoherentRuleMatchesMatrix) {
  std::mt19937_64 rng(11);
  const int n = 90;
  for (int i = 0; i < kPropertyCases; ++i) {
    const cplx g = catport::testing::random_complex(rng, 3.0);
    const double eta = std::uniform_real_distribution<double>(0.5, 1.0)(rng);
    const int k = i % 4;
    const auto op = kraus_operator(eta, k, n);
    const auto direct = op.apply(coherent_vector(g, n));
    FockVector via = FockVector::zeros(n);
    for (const auto& t : op.coherent_rule()(g)) via += t.coeff * coherent_vector(t.label, n);
    EXPECT_LT((direct - via).norm_squared(), 1e-24);
  }
}

TEST(Kraus, MeanPhotonsLost) {
  // sum_k k p_k = (1 - eta) <n> for any input; checked on a coherent state.
  const cplx g{2.0, -1.0};
  const double eta = 0.8;
  const int n = 80;
  const auto v = coherent_vector(g, n);
  double mean_lost = 0.0, total = 0.0;
  for (int k = 0; k <= 40; ++k) {
    const double p = kraus_operator(eta, k, n).apply(v).norm_squared();
    mean_lost += k * p;
    total += p;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NEAR(mean_lost, (1.0 - eta) * std::norm(g), 1e-10);
}

TEST(Kraus, RejectsBadTransmissivity) {
  EXPECT_THROW(kraus_operator(0.0, 0, 10), Error);
  EXPECT_THROW(kraus_operator(1.2, 0, 10), Error);
  EXPECT_THROW(kraus_operator(0.5, -1, 10), Error);
}

TEST(LossyFidelity, LosslessIsTeleport) {
  ProtocolConfig cfg;
  const auto o = default_outcomes(cfg);
  const auto r = lossy_fidelity(cfg, 1.0, o);
  EXPECT_EQ(r.fidelity, teleport(cfg, o).fidelity);
  EXPECT_EQ(r.kraus_terms, 1);
}

TEST(LossyFidelity, FrozenValues) {
  ProtocolConfig cfg;
  const auto o = default_outcomes(cfg);
  const std::pair<double, double> cases[] = {{0.1, 0.944718}, {0.2, 0.934132}, {0.35, 0.900981}, {0.5, 0.845506}};
  for (auto [loss, expected] : cases) {
    const auto r = lossy_fidelity(cfg, 1.0 - loss, o);
    EXPECT_NEAR(r.fidelity, expected, 1e-6) << loss;
    EXPECT_GT(r.weight, 1.0 - 1e-9);
  }
}

TEST(LossyFidelity, NonIncreasingOnGrid) {
  ProtocolConfig cfg;
  const auto o = default_outcomes(cfg);
  double prev = 2.0;
  for (int i = 0; i <= 10; ++i) {
    const double f = lossy_fidelity(cfg, 1.0 - 0.05 * i, o).fidelity;
    EXPECT_LE(f, prev + 1e-4) << "loss " << 0.05 * i;
    prev = f;
  }
}

TEST(LossyFidelity, RejectsJointParity) {
  ProtocolConfig cfg;
  cfg.variant = Variant::JointParity;
  EXPECT_THROW(lossy_fidelity(cfg, 0.9, default_outcomes(cfg)), Error);
}
