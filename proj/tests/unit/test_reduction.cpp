#include <gtest/gtest.h>

#include "common.hpp"
#include "qpbeam/oracle.hpp"
#include "qpbeam/reduction.hpp"

using namespace qpbeam;

namespace {
const double kEps = 0.0375;
}

TEST(Reduction, MuOfCosCos) {
  EXPECT_NEAR(compute_mu(qt::cos_cos(4)), kPi / 2, 1e-14);
  EXPECT_EQ(compute_mu(FourierField(2, 1, TruncationBox{4, 2})), 0.0);
}

TEST(Reduction, BetaTrivialCases) {
  auto w = qt::golden();
  ReductionData z = compute_beta(FourierField(2, 1, TruncationBox{4, 2}), w, kEps);
  EXPECT_NEAR(z.beta.coeff(ModeIndex{{0, 0}, {}}).real(), 1.0, 1e-16);
  EXPECT_LT(qt::max_diff(z.beta, to_phase_only(qt::modes({{ModeIndex{{0, 0}, {0}}, 1.0}}, 2, 1, 4))), 1e-16);
  // v = cos(x): b is constant
  ReductionData c = compute_beta(qt::cosine({0, 0}, {1}, 4), w, kEps);
  EXPECT_NEAR(c.mu, kPi, 1e-14);
  EXPECT_LT(std::abs(c.beta.coeff(ModeIndex{{0, 0}, {}}) - 1.0), 1e-15);
  EXPECT_LT(qt::max_diff(c.beta, c.beta_inv), 1e-15);
}

TEST(Reduction, ApplyA) {
  auto w = qt::golden();
  std::vector<std::vector<int>> js = {{1}};
  FourierField v = random_field(2, 1, 6, js, 0.05, 0.8, 1);
  ReductionData d = compute_beta(v, w, kEps);
  FourierField one = qt::modes({{ModeIndex{{0, 0}, {0}}, 1.0}}, 2, 1, 6);
  EXPECT_LT(qt::max_diff(apply_A(one, d, false, 6), to_full(d.beta, 1)), 1e-15);
  FourierField h = qt::cos_cos(6);
  ReductionData id = compute_beta(FourierField(2, 1, TruncationBox{6, 2}), w, kEps);
  EXPECT_LT(qt::max_diff(apply_A(h, id, false, 6), h), 1e-16);
}

TEST(Reduction, BetaInverse) {
  auto w = qt::golden();
  std::vector<std::vector<int>> js = {{1}, {2}};
  FourierField v = random_field(2, 1, 8, js, 0.05, 0.8, 2);
  ReductionOptions o;
  o.beta_cutoff = 16;
  ReductionData d = compute_beta(v, w, kEps, o);
  FourierField p = multiply(d.beta, d.beta_inv, 8);
  p.mutable_slice(0)[p.layout().phase_zero()] -= 1.0;
  EXPECT_LT(p.max_abs(), 1e-12);
}

TEST(Reduction, RemainderTrivial) {
  auto w = qt::golden();
  FourierField z(2, 1, TruncationBox{6, 2});
  ReductionData d = compute_beta(z, w, kEps);
  ConjugatedRemainder r(z, d);
  EXPECT_LT(r(qt::cos_cos(6), 6).max_abs(), 1e-16);
  std::vector<std::vector<int>> js = {{1}};
  FourierField v = random_field(2, 1, 6, js, 0.05, 0.8, 3);
  ConjugatedRemainder rv(v, compute_beta(v, w, kEps));
  EXPECT_TRUE(rv(FourierField(2, 1, TruncationBox{6, 2}), 6).is_zero());
}

TEST(Reduction, HomologicalResidualQuadratic) {
  auto w = qt::golden();
  std::vector<std::vector<int>> js = {{1}, {2}};
  FourierField v0 = random_field(2, 1, 8, js, 1.0, 0.8, 4);
  const double n0 = sobolev_norm(v0, NormSpec{0, 6});
  double r[2];
  int i = 0;
  for (double t : {0.1, 0.05}) r[i++] = homological_residual(compute_beta((t / n0) * v0, w, kEps), 2);
  EXPECT_LT(r[0], 1e-8);
  EXPECT_NEAR(std::log2(r[0] / r[1]), 2.0, 0.05);
}

TEST(Reduction, DefectZeroAtZero) {
  DefectOptions o;
  o.s = 2;
  EXPECT_LT(conjugation_defect(FourierField(2, 1, TruncationBox{6, 2}), qt::golden(), kEps, o), 1e-12);
}

TEST(Reduction, DefectSmallForSmoothV) {
  std::vector<std::vector<int>> js = {{1}};
  FourierField v = random_field(2, 1, 8, js, 1.0, 1.0, 5);
  v *= 0.1 / sobolev_norm(v, NormSpec{0, 6});
  DefectOptions o;
  o.s = 2;
  EXPECT_LT(conjugation_defect(v, qt::golden(), kEps, o), 1e-8);
}

// A^{-1} L A h against the explicit formula D h + R~ h on the padded box,
// with beta computed on the padded box so the tail vanishes
TEST(Reduction, ConjugationIdentity) {
  std::vector<std::vector<int>> js = {{1}, {2}};
  FourierField v = random_field(2, 1, 6, js, 1.0, 0.8, 6);
  v *= 0.1 / sobolev_norm(v, NormSpec{0, 6});
  DefectOptions o;
  o.s = 2;
  o.beta_on_padded_box = true;
  EXPECT_LT(conjugation_defect(v, qt::golden(), kEps, o), 1e-11);
}
