#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "catport/errors.hpp"
#include "catport/focknum.hpp"
#include "generators.hpp"

using namespace catport;
using catport::testing::kPropertyCases;

namespace {

// Direct series term e^{-|g|^2/2} g^n / sqrt(n!) with tgamma, fine for small n.
cplx naive_coherent_amp(cplx g, int n) {
  return std::exp(-0.5 * std::norm(g)) * std::pow(g, n) / std::sqrt(std::tgamma(n + 1.0));
}

double max_abs_diff(const FockVector& x, const FockVector& y) {
  double d = 0.0;
  for (int n = 0; n < std::max(x.size(), y.size()); ++n) d = std::max(d, std::abs(x[n] - y[n]));
  return d;
}

}  // namespace

TEST(Cutoff, PolicyFormula) {
  EXPECT_EQ(cutoff_for_mean(0.0), 20);
  EXPECT_EQ(cutoff_for_mean(16.0), 68);
  EXPECT_EQ(cutoff_for_mean(128.0), 239);
}

TEST(Coherent, VacuumAtZero) {
  const auto v = coherent_vector(0.0, 10);
  EXPECT_EQ(v[0], cplx(1.0));
  for (int n = 1; n <= 10; ++n) EXPECT_EQ(v[n], cplx{});
}

TEST(Coherent, VacuumWeightAtTwo) {
  const auto v = coherent_vector(2.0, 40);
  EXPECT_NEAR(std::norm(v[0]), std::exp(-4.0), 1e-15);
  EXPECT_NEAR(std::norm(v[0]), 0.018316, 1e-6);
}

TEST(Coherent, MeanOccupationMatchesLabel) {
  const cplx g = 5.656854;
  const auto v = coherent_vector(g, cutoff_for_mean(std::norm(g)));
  EXPECT_NEAR(v.mean_occupation(), std::norm(g), 1e-6);
}

TEST(Coherent, MatchesSeriesOracle) {
  const cplx g(1.3, 0.4);
  const auto v = coherent_vector(g, 30);
  for (int n = 0; n <= 30; ++n) EXPECT_NEAR(std::abs(v[n] - naive_coherent_amp(g, n)), 0.0, 1e-14);
}

TEST(Coherent, StableAtLargeAmplitude) {
  const cplx g(0.0, 12.0);
  const auto v = coherent_vector(g, cutoff_for_mean(144.0));
  EXPECT_NEAR(v.norm_squared(), 1.0, 1e-12);
  for (auto a : v.amps()) ASSERT_TRUE(std::isfinite(a.real()) && std::isfinite(a.imag()));
}

TEST(Coherent, LeakCheckThrows) {
  try {
    coherent_vector(4.0, 20);
    FAIL() << "expected cutoff-too-small";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CutoffTooSmall);
  }
}

TEST(Cat, WrongParityLevelsAreExactZeros) {
  const auto even = cat_vector(2.0, 0, 40);
  const auto odd = cat_vector(2.0, 1, 40);
  for (int n = 1; n <= 40; n += 2) EXPECT_EQ(even[n], cplx{});
  for (int n = 0; n <= 40; n += 2) EXPECT_EQ(odd[n], cplx{});
}

TEST(Cat, NormalizedAndOrthogonal) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < kPropertyCases; ++i) {
    const cplx g = catport::testing::random_complex(rng, 4.0) + 0.05;
    const int n_max = cutoff_for_mean(std::norm(g));
    const auto c0 = cat_vector(g, 0, n_max);
    const auto c1 = cat_vector(g, 1, n_max);
    EXPECT_NEAR(c0.norm_squared(), 1.0, 1e-10);
    EXPECT_NEAR(c1.norm_squared(), 1.0, 1e-10);
    EXPECT_EQ(inner(c0, c1), cplx{});
  }
}

TEST(Cat, SmallAmplitudeOddCatUsesExpm1) {
  const auto c1 = cat_vector(1e-4, 1, 20);
  EXPECT_NEAR(c1.norm_squared(), 1.0, 1e-10);
  EXPECT_NEAR(std::abs(c1[1]), 1.0, 1e-8);
}

TEST(Cat, CoherentOverlapWithLogicalPlus) {
  // <g|cat_b> = N_b / 2, so the overlap with (cat0 + cat1)/sqrt2 is
  // (sqrt(1 + e^{-2}) + sqrt(1 - e^{-2})) / 2 at g = 1.
  const auto coh = coherent_vector(1.0, 40);
  const auto plus = cplx(1.0 / std::sqrt(2.0)) * (cat_vector(1.0, 0, 40) + cat_vector(1.0, 1, 40));
  const double closed = 0.5 * (std::sqrt(1.0 + std::exp(-2.0)) + std::sqrt(1.0 - std::exp(-2.0)));
  EXPECT_NEAR(inner(coh, plus).real(), closed, 1e-12);
  EXPECT_NEAR(inner(coh, plus).real(), 0.997697, 1e-6);
}

TEST(Displacement, ZeroIsIdentity) {
  const auto d = displacement(0.0, 30);
  EXPECT_LT((d.matrix() - Eigen::MatrixXcd::Identity(31, 31)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Displacement, VacuumColumnIsCoherent) {
  const cplx g(1.1, -0.7);
  const auto d = displacement(g, 50);
  EXPECT_LT(max_abs_diff(d.apply(FockVector::basis(0, 50)), coherent_vector(g, 50)), 1e-9);
}

TEST(Displacement, ReturnsDisplacedCoherentToVacuum) {
  const cplx chi = cplx(4.0, 4.0) / std::sqrt(2.0);
  const int n_max = cutoff_for_mean(4.0 * std::norm(chi));
  const auto v = displacement(chi, n_max).apply(coherent_vector(-chi, n_max));
  EXPECT_GT(fidelity(v, FockVector::basis(0, n_max)), 1.0 - 1e-8);
}

TEST(Displacement, UnitaryOnInnerBlock) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 8; ++i) {
    const cplx g = catport::testing::random_complex(rng, 3.0);
    // column 40 displaced by |g| <= 3 stays well below level 200
    EXPECT_LT(displacement(g, 200).unitarity_defect(40), 1e-9);
  }
}

TEST(Displacement, UnitaryAtWorkingPointCutoff) {
  const cplx chi = 4.0 * std::sqrt(2.0);
  const int n_max = cutoff_for_mean(128.0);
  EXPECT_LT(displacement(chi, n_max).unitarity_defect(60), 1e-9);
}

TEST(Displacement, CoherentRuleMatchesMatrix) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < kPropertyCases; ++i) {
    const cplx delta = catport::testing::random_complex(rng, 2.0);
    const cplx g = catport::testing::random_complex(rng, 2.0);
    const auto d = displacement(delta, 80);
    const auto terms = d.coherent_rule()(g);
    ASSERT_EQ(terms.size(), 1u);
    const auto expected = d.apply(coherent_vector(g, 80));
    const auto from_rule = terms[0].coeff * coherent_vector(terms[0].label, 80);
    EXPECT_LT(max_abs_diff(expected, from_rule), 1e-9);
  }
}

TEST(Parity, ProjectorsAreComplete) {
  const auto p = parity_projector(Sign::Plus, 25);
  const auto m = parity_projector(Sign::Minus, 25);
  for (int n = 0; n <= 25; ++n) EXPECT_EQ(p[n] + m[n], cplx(1.0));
}

TEST(Parity, CatsAreEigenstates) {
  const auto c0 = cat_vector(2.5, 0, 60);
  EXPECT_EQ(max_abs_diff(parity_projector(Sign::Plus, 60).apply(c0), c0), 0.0);
  EXPECT_EQ(parity_projector(Sign::Minus, 60).apply(c0).norm_squared(), 0.0);
}

TEST(Parity, CoherentRuleMatchesProjection) {
  const cplx g = 1.5;
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    const auto p = parity_projector(s, 40);
    FockVector from_rule = FockVector::zeros(40);
    for (const auto& t : p.coherent_rule()(g)) from_rule += t.coeff * coherent_vector(t.label, 40);
    EXPECT_LT(max_abs_diff(p.apply(coherent_vector(g, 40)), from_rule), 1e-14);
  }
}

TEST(LogicalZ, FlipsOddCat) {
  const auto z = logical_z(60);
  const auto c1 = cat_vector(cplx(0, 3), 1, 60);
  const auto c0 = cat_vector(cplx(0, 3), 0, 60);
  EXPECT_EQ(max_abs_diff(z.apply(c1), cplx(-1.0) * c1), 0.0);
  EXPECT_EQ(max_abs_diff(z.apply(c0), c0), 0.0);
}

TEST(Dispersive, SingleReadoutIsCosine) {
  const double tau = 0.173;
  const auto m = dispersive_operator(tau, 1, 0, 50);
  for (int n = 0; n <= 50; ++n) EXPECT_NEAR(m[n].real(), std::cos(n * tau), 1e-14);
}

TEST(Dispersive, ZeroTimeIsIdentity) {
  const auto m = dispersive_operator(0.0, 7, 0, 30);
  for (int n = 0; n <= 30; ++n) EXPECT_EQ(m[n], cplx(1.0));
}

TEST(Dispersive, MatchesDirectBinomialForm) {
  const double tau = kPi / 37.0;
  const int kp = 6, km = 4;
  const auto m = dispersive_operator(tau, kp, km, 80);
  for (int n = 0; n <= 80; ++n) {
    const double direct = std::sqrt(210.0) * std::pow(std::cos(n * tau), kp) * std::pow(std::sin(n * tau), km);
    EXPECT_NEAR(m[n].real(), direct, 1e-12 * std::max(1.0, std::abs(direct)));
  }
}

TEST(Dispersive, PovmCompleteness) {
  for (double tau : {kPi / 64.0, kPi / 2.0, 0.4321}) {
    for (int total : {1, 2, 3, 5}) {
      std::vector<double> sum(121, 0.0);
      for (int kp = 0; kp <= total; ++kp) {
        const auto m = dispersive_operator(tau, kp, total - kp, 120);
        for (int n = 0; n <= 120; ++n) sum[n] += std::norm(m[n]);
      }
      for (int n = 0; n <= 120; ++n) EXPECT_NEAR(sum[n], 1.0, 1e-12) << "tau=" << tau << " N=" << total;
    }
  }
}

TEST(Dispersive, MagnitudeMatchesParityAtQuarterTurn) {
  std::mt19937_64 rng(3);
  const auto m = dispersive_operator(kPi / 2.0, 1, 0, 40);
  const auto p = parity_projector(Sign::Plus, 40);
  for (int i = 0; i < kPropertyCases; ++i) {
    const auto psi = catport::testing::random_vector(rng, 40, 40);
    const auto x = m.apply(psi);
    const auto y = p.apply(psi);
    for (int n = 0; n <= 40; ++n) EXPECT_NEAR(std::norm(x[n]), std::norm(y[n]), 1e-14);
  }
}

TEST(Dispersive, NegativeCountsRejected) {
  EXPECT_THROW(dispersive_operator(0.1, -1, 2, 10), Error);
}

TEST(PeakCenter, Limits) {
  EXPECT_DOUBLE_EQ(gaussian_peak_center(10, 0), 0.0);
  EXPECT_NEAR(gaussian_peak_center(5, 5), kPi / 4.0, 1e-15);
  EXPECT_NEAR(gaussian_peak_center(0, 8), kPi / 2.0, 1e-15);
}

TEST(OptimalTau, Examples) {
  EXPECT_NEAR(optimal_tau(5.0, cplx(0, 5), 2.0), kPi / 100.0, 1e-15);
  EXPECT_NEAR(optimal_tau(5.0, cplx(0, 5), 2.0), kPi / (4.0 * 25.0), 1e-15);
  EXPECT_NEAR(optimal_tau(4.0, 4.0, 2.0), kPi / 64.0, 1e-15);
  EXPECT_NEAR(optimal_tau(3.0, 0.0, 2.0), kPi / 18.0, 1e-15);
  EXPECT_THROW(optimal_tau(4.0, 4.0, 0.0), Error);
}

TEST(Overlap, SelfIsOne) {
  EXPECT_NEAR(std::abs(coherent_overlap(cplx(2.0, -1.0), cplx(2.0, -1.0)) - 1.0), 0.0, 1e-15);
}

TEST(Overlap, OppositeLabels) {
  // Oracle: truncated Fock sum of <2|-2>.
  const auto a = coherent_vector(2.0, 60);
  const auto b = coherent_vector(-2.0, 60);
  EXPECT_NEAR(inner(a, b).real(), 3.3546e-4, 1e-8);
  EXPECT_NEAR(coherent_overlap(2.0, -2.0).real(), inner(a, b).real(), 1e-14);
}

TEST(Overlap, MatchesTruncatedSumAndIsConjugateSymmetric) {
  std::mt19937_64 rng(19);
  for (int i = 0; i < kPropertyCases; ++i) {
    const cplx g1 = catport::testing::random_complex(rng, 4.0);
    const cplx g2 = catport::testing::random_complex(rng, 4.0);
    const auto v1 = coherent_vector(g1, 80);
    const auto v2 = coherent_vector(g2, 80);
    EXPECT_LT(std::abs(inner(v1, v2) - coherent_overlap(g1, g2)), 1e-8);
    EXPECT_NEAR(std::abs(coherent_overlap(g1, g2)), std::abs(coherent_overlap(g2, g1)), 1e-15);
  }
}
