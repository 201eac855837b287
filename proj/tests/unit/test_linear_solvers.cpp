#include <gtest/gtest.h>

#include "common.hpp"
#include "qpbeam/errors.hpp"
#include "qpbeam/linear_solvers.hpp"
#include "qpbeam/oracle.hpp"

using namespace qpbeam;

namespace {

const double kEps = 0.0375;

double rel(const FourierField& a, const FourierField& b) {
  return sobolev_norm(rebox(a, std::max(a.cutoff(), b.cutoff())) - rebox(b, std::max(a.cutoff(), b.cutoff())),
                      NormSpec{0, 2}) /
         sobolev_norm(b, NormSpec{0, 2});
}

}  // namespace

TEST(Symbol, Values) {
  auto w = qt::golden();
  std::vector<int> k0 = {0, 0}, j = {2};
  EXPECT_EQ(theta_symbol(0.1, 0.2, w, k0, j), cplx(16.0, 0.0));
  const cplx t = theta_value(0.1, 0.0, 1.0, 1.0);
  EXPECT_NEAR(t.real(), 0.0, 1e-16);
  EXPECT_NEAR(t.imag(), 0.1, 1e-16);
  const cplx u = theta_value(0.1, 0.2, 0.5, 2.0);
  EXPECT_NEAR(u.real(), 3.75, 1e-15);
  EXPECT_NEAR(u.imag(), 0.1 * 0.5 * (1 + std::sqrt(0.1) * 0.2), 1e-16);
}

TEST(Symbol, FloorScan) {
  for (double mu : {0.0, 0.2}) {
    SymbolFloorReport r = symbol_floor(0.1, mu, 0.1, 4, 32.0, 8);
    EXPECT_TRUE(r.ok()) << "mu " << mu;
    EXPECT_GT(r.min_margin, 0.0);
    EXPECT_GE(r.min_theta, 0.1 / kSymbolK0);
  }
}

TEST(Symbol, FloorPreconditions) {
  SymbolFloorReport r = symbol_floor(0.2, 0.0, 0.1, 4, 6.0, 8);
  EXPECT_FALSE(r.preconditions_ok);
  EXPECT_FALSE(r.precondition_failures.empty());
}

TEST(Diagonal, RoundTripAndSingleMode) {
  auto w = qt::golden();
  DiagonalSymbol D{kEps, 0.0, w};
  std::vector<std::vector<int>> js = {{1}, {2}};
  FourierField g = random_field(2, 1, 8, js, 1.0, 0.3, 1);
  EXPECT_LT(rel(invert_diagonal(D, D.apply(g)), g), 1e-14);

  // pick a mode and compare with direct division
  FourierField e(2, 1, TruncationBox{8, 2});
  ModeIndex m{{3, -2}, {1}};
  e.set(m, 1.0);
  std::vector<int> k = {3, -2}, j = {1};
  EXPECT_LT(std::abs(invert_diagonal(D, e).coeff(m) - 1.0 / theta_symbol(kEps, 0.0, w, k, j)), 1e-13);

  EXPECT_THROW(invert_diagonal(D, qt::modes({{ModeIndex{{1, 0}, {0}}, 1.0}}, 2, 1, 8)), SpatialMeanError);
}

TEST(Diagonal, MatchesDense) {
  auto w = qt::golden();
  std::vector<std::vector<int>> js = {{1}, {-1}, {2}, {-2}};
  ModeBasis basis = ModeBasis::with_spatial_support(2, 1, 8, js);
  DiagonalSymbol D{kEps, 0.0, w};
  Eigen::MatrixXcd A = assemble_dense(basis, [&](const FourierField& x) { return D.apply(x); });
  EXPECT_LT((A - Eigen::MatrixXcd(A.diagonal().asDiagonal())).norm(), 1e-14);
  FourierField h = random_field(2, 1, 8, js, 1.0, 0.3, 2);
  FourierField x = basis.from_vector(dense_solve(A, basis.to_vector(h)));
  EXPECT_LT(rel(invert_diagonal(D, h), x), 1e-12);
}

TEST(Ltilde, ZeroVReducesToDiagonal) {
  auto w = qt::golden();
  std::vector<std::vector<int>> js = {{1}, {2}};
  FourierField h = random_field(2, 1, 8, js, 1.0, 0.3, 3);
  FourierField z(2, 1, TruncationBox{8, 2});
  EXPECT_LT(rel(invert_Ltilde(z, w, kEps, h), invert_diagonal(DiagonalSymbol{kEps, 0.0, w}, h)), 1e-14);
}

TEST(Ltilde, MatchesDense) {
  auto w = qt::golden();
  std::vector<std::vector<int>> js = {{1}, {2}};
  FourierField v = random_field(2, 1, 8, js, 0.05, 0.5, 4);
  FourierField h = random_field(2, 1, 8, js, 1.0, 0.3, 5);
  LtildeSolver S(v, w, kEps);
  const FourierField* f[] = {&v, &h};
  ModeBasis basis = ModeBasis::with_spatial_support(2, 1, 8, ModeBasis::spatial_support(f));
  Eigen::MatrixXcd A = assemble_dense(basis, [&](const FourierField& x) { return S.apply(x); });
  FourierField ref = basis.from_vector(dense_solve(A, basis.to_vector(h)));
  NeumannOptions o;
  o.tol = 1e-13;
  o.s = 2;
  NeumannResult r = S.solve(h, o);
  EXPECT_LT(rel(r.x, ref), 1e-10);
  EXPECT_LT(r.contraction, 1.0);
}

TEST(Ltilde, ContractionFailureReported) {
  auto w = qt::golden();
  std::vector<std::vector<int>> js = {{1}, {2}};
  FourierField v = random_field(2, 1, 6, js, 40.0, 0.3, 6);
  FourierField h = random_field(2, 1, 6, js, 1.0, 0.3, 7);
  try {
    LtildeSolver S(v, w, kEps);
    S.solve(h);
    FAIL();
  } catch (const ContractionError& e) {
    EXPECT_GE(e.factor(), 1.0);
  } catch (const OverflowError&) {
  }
}

TEST(Linearized, ZeroV) {
  auto w = qt::golden();
  std::vector<std::vector<int>> js = {{1}, {2}};
  FourierField h = random_field(2, 1, 10, js, 1.0, 0.3, 8);
  FourierField z(2, 1, TruncationBox{8, 2});
  FourierField x = invert_linearized(z, w, kEps, 8, h);
  EXPECT_LT(rel(x, invert_diagonal(DiagonalSymbol{kEps, 0.0, w}, rebox(h, 8))), 1e-13);
}

TEST(Linearized, BothMethodsMatchDense) {
  auto w = qt::golden();
  std::vector<std::vector<int>> js = {{1}, {2}};
  FourierField v = random_field(2, 1, 8, js, 0.05, 0.5, 9);
  FourierField h = random_field(2, 1, 8, js, 1.0, 0.3, 10);
  const FourierField* f[] = {&v, &h};
  ModeBasis basis = ModeBasis::with_spatial_support(2, 1, 8, ModeBasis::spatial_support(f));
  FourierField ref = basis.from_vector(dense_solve(dense_linearized(v, w, kEps, basis), basis.to_vector(h)));
  for (LinearMethod m : {LinearMethod::Conjugation, LinearMethod::Direct}) {
    LinearizedOptions o;
    o.method = m;
    o.s = 2;
    EXPECT_LT(rel(invert_linearized(v, w, kEps, 8, h, o), ref), 1e-10);
  }
}

TEST(Linearized, ProxyGrowsWithSmallerDamping) {
  auto w = qt::golden();
  std::vector<std::vector<int>> js = {{1}};
  FourierField z(2, 1, TruncationBox{16, 2});
  InverseProxy a = inverse_norm_proxy(z, w, 0.0375, 16, js, 4, 2);
  InverseProxy b = inverse_norm_proxy(z, w, 0.01875, 16, js, 4, 2);
  EXPECT_GT(b.value, a.value);
  EXPECT_NEAR(a.value, 1.0 / a.min_theta, 1e-9 * a.value);
}
