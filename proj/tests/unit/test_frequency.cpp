#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "common.hpp"
#include "qpbeam/errors.hpp"
#include "qpbeam/frequency.hpp"

using namespace qpbeam;

TEST(Frequency, SmallDivisor) {
  FrequencyVector e1({1.0, 0.0});
  std::vector<int> k = {1, 0};
  EXPECT_EQ(small_divisor(e1, k), 1.0);
  auto r = FrequencyVector::normalized({3.0, 4.0});
  std::vector<int> res = {4, -3};
  EXPECT_LT(small_divisor(r, res), 1e-15);
}

TEST(Frequency, NormBoundEnforced) {
  EXPECT_THROW(FrequencyVector({1.0, 0.5}), Error);
  EXPECT_NO_THROW(FrequencyVector({0.6, 0.8}));
}

// Convergents p/q of the golden mean minimise |p - q alpha| among |k|_1 up to
// the next one; compare against the Fibonacci recursion.
TEST(Frequency, GoldenConvergentsGiveMinima) {
  const double alpha = 0.5 * (std::sqrt(5.0) - 1.0);
  FrequencyVector w({1.0 / std::sqrt(1 + alpha * alpha), alpha / std::sqrt(1 + alpha * alpha)});
  std::int64_t q0 = 1, q1 = 1, p0 = 0, p1 = 1;
  for (int n = 0; n < 8; ++n) {
    std::vector<int> k = {static_cast<int>(p1), -static_cast<int>(q1)};
    const double expect = std::abs(p1 - q1 * alpha) / std::sqrt(1 + alpha * alpha);
    EXPECT_NEAR(small_divisor(w, k), expect, 1e-12 * expect);
    double best = std::numeric_limits<double>::infinity();
    for_each_lattice_point(2, static_cast<int>(p1 + q1), [&](std::span<const int> m) {
      if (std::abs(m[1]) <= q1) best = std::min(best, small_divisor(w, m));
    });
    EXPECT_NEAR(best, expect, 1e-12 * expect);
    std::int64_t q2 = q1 + q0, p2 = p1 + p0;
    q0 = q1, q1 = q2, p0 = p1, p1 = p2;
  }
}

TEST(Frequency, CertificateSilverValid) {
  auto w = FrequencyVector::normalized({1.0, std::sqrt(2.0) - 1.0});
  auto c = certify_nonresonance(w, 10.0, 3, 0.5, 50);
  EXPECT_TRUE(c.valid());
  EXPECT_LT(c.worst_ratio, 1.0);
}

TEST(Frequency, CertificateResonantInvalid) {
  auto w = FrequencyVector::normalized({3.0, 4.0});
  auto c = certify_nonresonance(w, 10.0, 3, 0.5, 10);
  EXPECT_FALSE(c.valid());
  EXPECT_EQ(std::abs(c.worst_k[0]) + std::abs(c.worst_k[1]), 7);
}

TEST(Frequency, MinimalGammaIsThreshold) {
  auto w = qt::golden();
  const double g = minimal_gamma(w, 3, 0.5, 32);
  EXPECT_TRUE(certify_nonresonance(w, g * (1 + 1e-12), 3, 0.5, 32).valid());
  EXPECT_FALSE(certify_nonresonance(w, g * (1 - 1e-9), 3, 0.5, 32).valid());
  auto raised = raise_gamma_until_valid(w, 2.0, 3, 0.5, 32);
  EXPECT_TRUE(raised.valid());
  EXPECT_GE(raised.gamma, g);
  EXPECT_LT(raised.gamma, 2 * g);
}

TEST(Frequency, CertificateRejectsBadArguments) {
  EXPECT_THROW(certify_nonresonance(qt::golden(), 0.5, 3, 0.5, 10), ConfigError);
  EXPECT_THROW(certify_nonresonance(qt::golden(), 2.0, 2, 0.5, 10), ConfigError);
}

TEST(Frequency, LiouvilleanSuperExponential) {
  auto lf = build_liouvillean(GrowthRule::SuperExponential, 3);
  ASSERT_GE(lf.partial_quotients.size(), 3u);
  EXPECT_EQ(lf.partial_quotients[0], 1);
  EXPECT_EQ(lf.partial_quotients[1], 3);   // ceil(e^1)
  EXPECT_EQ(lf.partial_quotients[2], 55);  // ceil(e^4)
  EXPECT_EQ(lf.convergents[0].q, 1);
  EXPECT_EQ(lf.convergents[1].q, 4);
  EXPECT_EQ(lf.convergents[2].q, 221);
  // convergents approximate alpha to within 1/q^2
  for (const auto& c : lf.convergents) {
    const double q = static_cast<double>(c.q);
    EXPECT_LT(std::abs(lf.alpha - static_cast<double>(c.p) / q), 1.0 / (q * q));
  }
  EXPECT_THROW(build_liouvillean(GrowthRule::SuperExponential, 4), OverflowError);
}

TEST(Frequency, LiouvilleanDepthTwoModerateGamma) {
  auto lf = build_liouvillean(GrowthRule::SuperExponential, 2);
  auto c = raise_gamma_until_valid(lf.omega, 2.0, 3, 0.5, 16);
  EXPECT_TRUE(c.valid());
  EXPECT_LE(c.gamma, 64.0);
}

TEST(Frequency, GoldenBrjunoFinite) {
  auto lf = build_liouvillean(GrowthRule::None, 3, 20);
  EXPECT_NEAR(lf.alpha, 0.5 * (std::sqrt(5.0) - 1.0), 1e-9);
  for (auto a : lf.partial_quotients) EXPECT_EQ(a, 1);
  // sum ln(F_{n+1}) / F_n over the listed convergents
  double ref = 0;
  double qa = 1, qb = 2;  // q_1, q_2 of [0; 1, 1, ...]
  for (std::size_t n = 0; n + 1 < lf.convergents.size(); ++n) {
    ref += std::log(qb) / qa;
    const double qc = qa + qb;
    qa = qb, qb = qc;
  }
  EXPECT_NEAR(lf.brjuno_partial_sum, ref, 1e-12);
  EXPECT_LT(lf.brjuno_partial_sum, 3.4);
  const double b6 = dyadic_brjuno_sum(qt::golden(), 6);
  const double b7 = dyadic_brjuno_sum(qt::golden(), 7);
  EXPECT_TRUE(std::isfinite(b7));
  EXPECT_LT(b7 - b6, 0.05);
}

TEST(Frequency, CsvRow) {
  auto c = certify_nonresonance(qt::golden(), 2.0, 3, 0.5, 8);
  EXPECT_EQ(NonresonanceCertificate::csv_header(), "gamma,M,rho,K_max,worst_ratio,worst_divisor,valid,worst_k");
  EXPECT_EQ(c.csv_row().substr(0, 6), "2,3,0.");
}
