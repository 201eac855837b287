#include <gtest/gtest.h>

#include "common.hpp"
#include "qpbeam/errors.hpp"
#include "qpbeam/nonlinearity.hpp"
#include "qpbeam/oracle.hpp"

using namespace qpbeam;

namespace {

// b(phi) = int |grad v|^2 dx by quadrature on a grid of v_x
RealGrid b_by_quadrature(const FourierField& v, int n) {
  FourierField vx = v;
  const FieldLayout& lay = v.layout();
  for (std::size_t s = 0; s < lay.spatial_count(); ++s) {
    if (!v.slice_active(s)) continue;
    const double j = lay.spatial_mode(s)[0];
    for (cplx& c : vx.mutable_slice(s)) c *= cplx(0, j);
  }
  std::vector<int> sizes = {n, n, n};
  RealGrid g = synthesize_on_grid(vx, sizes);
  RealGrid b;
  b.sizes = {n, n};
  b.values.assign(static_cast<std::size_t>(n * n), 0.0);
  for (std::size_t q = 0; q < g.values.size(); ++q) b.values[q / static_cast<std::size_t>(n)] += g.values[q] * g.values[q] * 2 * kPi / n;
  return b;
}

}  // namespace

TEST(Nonlinearity, ZeroField) {
  FourierField z(2, 1, TruncationBox{4, 2});
  EXPECT_TRUE(damping_coefficient(z).b.is_zero());
  EXPECT_TRUE(apply_F(z, qt::golden()).is_zero());
}

TEST(Nonlinearity, CoefficientOfCosCos) {
  auto b = damping_coefficient(qt::cos_cos(4));
  EXPECT_NEAR(b.mean(), kPi / 2, 1e-14);
  // pi cos^2 phi_1 = pi/2 + pi/4 (e^{2i phi_1} + e^{-2i phi_1})
  EXPECT_NEAR(b.b.coeff(ModeIndex{{2, 0}, {}}).real(), kPi / 4, 1e-14);
}

TEST(Nonlinearity, CoefficientMatchesQuadrature) {
  std::vector<std::vector<int>> js = {{1}, {2}};
  FourierField v = random_field(2, 1, 4, js, 0.5, 0.4, 3);
  auto b = damping_coefficient(v);
  std::vector<int> sizes = {20, 20};
  RealGrid bg = synthesize_on_grid(b.b, sizes);
  RealGrid ref = b_by_quadrature(v, 20);
  for (std::size_t q = 0; q < ref.values.size(); ++q) EXPECT_NEAR(bg.values[q], ref.values[q], 1e-13);
}

TEST(Nonlinearity, FOfCosCos) {
  auto w = qt::golden();
  FourierField F = apply_F(qt::cos_cos(4), w);
  // -pi cos^2(phi_1) w_1 sin(phi_1) cos(x)
  std::vector<int> sizes = {12, 4, 12};
  RealGrid g = synthesize_on_grid(F, sizes, AliasPolicy::Fold);
  for (int a = 0; a < 12; ++a)
    for (int x = 0; x < 12; ++x) {
      const double phi = 2 * kPi * a / 12, xx = 2 * kPi * x / 12;
      const double ref = -kPi * std::cos(phi) * std::cos(phi) * w[0] * std::sin(phi) * std::cos(xx);
      EXPECT_NEAR(g.values[static_cast<std::size_t>(a * 48 + x)], ref, 1e-14);
    }
}

TEST(Nonlinearity, RemainderIdentities) {
  auto w = qt::golden();
  std::vector<std::vector<int>> js = {{1}};
  FourierField v = random_field(2, 1, 4, js, 0.3, 0.5, 5);
  FourierField R = apply_R(v, v, w);
  EXPECT_LT(qt::max_diff(R, 2.0 * apply_F(v, w)), 1e-14);
  std::vector<std::vector<int>> js2 = {{2}};
  FourierField h = random_field(2, 1, 4, js2, 0.3, 0.5, 6);
  EXPECT_LT(apply_R(v, h, w).max_abs(), 1e-15);
}

TEST(Nonlinearity, DerivativeAtZeroAndZeroDirection) {
  auto w = qt::golden();
  std::vector<std::vector<int>> js = {{1}, {3}};
  FourierField v = random_field(2, 1, 4, js, 0.3, 0.5, 8);
  FourierField z(2, 1, TruncationBox{4, 2});
  EXPECT_TRUE(apply_DF(v, z, w).is_zero());
  EXPECT_TRUE(apply_DF(z, v, w).is_zero());
  TaylorRemainder t = taylor_remainder(z, v, w);
  EXPECT_LT(qt::max_diff(t.direct, apply_F(v, w)), 1e-15);
}

TEST(Nonlinearity, FiniteDifference) {
  auto w = qt::golden();
  std::vector<std::vector<int>> js = {{1}, {2}};
  for (int seed = 0; seed < 4; ++seed) {
    FourierField v = random_field(2, 1, 5, js, 0.5, 0.5, 100 + seed);
    FourierField h = random_field(2, 1, 5, js, 0.5, 0.5, 200 + seed);
    const double e1 = fd_derivative_check(v, h, w, 1e-2, 2);
    const double e2 = fd_derivative_check(v, h, w, 0.25e-2, 2);
    EXPECT_LT(e1, 1e-3);
    EXPECT_NEAR(e1 / e2, 16.0, 0.5);
  }
}

TEST(Nonlinearity, TaylorRoutesAgree) {
  auto w = qt::golden();
  std::vector<std::vector<int>> js = {{1}, {2}};
  FourierField v = random_field(2, 1, 4, js, 0.5, 0.5, 31);
  FourierField h = random_field(2, 1, 4, js, 0.5, 0.5, 32);
  TaylorRemainder t = taylor_remainder(v, h, w);
  EXPECT_LT(t.discrepancy, 1e-13 * t.direct.max_abs());
}

TEST(Nonlinearity, SpatialMeanRejected) {
  FourierField v = qt::modes({{ModeIndex{{1, 0}, {0}}, 1.0}}, 2, 1, 4);
  EXPECT_THROW(require_zero_spatial_mean(v, "test"), SpatialMeanError);
}
