#include <gtest/gtest.h>

#include "common.hpp"
#include "qpbeam/errors.hpp"
#include "qpbeam/linear_solvers.hpp"
#include "qpbeam/nonlinearity.hpp"
#include "qpbeam/oracle.hpp"

using namespace qpbeam;

TEST(Oracle, BasisRoundTrip) {
  std::vector<std::vector<int>> js = {{1}, {-1}};
  ModeBasis b = ModeBasis::with_spatial_support(2, 1, 4, js);
  EXPECT_EQ(b.size(), 2u * 41u);
  FourierField u = qt::cos_cos(4);
  EXPECT_EQ(qt::max_diff(b.from_vector(b.to_vector(u)), u), 0.0);
  EXPECT_EQ(b.leakage(u), 0.0);
  EXPECT_EQ(b.leakage(qt::cosine({0, 0}, {2}, 4)), 0.5);
}

TEST(Oracle, DenseAtZeroIsDiagonalTheta) {
  auto w = qt::golden();
  std::vector<std::vector<int>> js = {{1}, {-1}, {2}, {-2}};
  ModeBasis b = ModeBasis::with_spatial_support(2, 1, 4, js);
  Eigen::MatrixXcd A = dense_linearized(FourierField(2, 1, TruncationBox{4, 2}), w, 0.0375, b);
  for (std::size_t m = 0; m < b.size(); ++m) {
    EXPECT_EQ(A(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)),
              theta_symbol(0.0375, 0.0, w, b.mode(m).k, b.mode(m).j));
  }
  EXPECT_LT((A - Eigen::MatrixXcd(A.diagonal().asDiagonal())).norm(), 1e-15);
}

TEST(Oracle, DenseMatchesOperatorAndPattern) {
  auto w = qt::golden();
  std::vector<std::vector<int>> js = {{1}, {2}};
  FourierField v = random_field(2, 1, 4, js, 0.3, 0.5, 1);
  const FourierField* f[] = {&v};
  ModeBasis b = ModeBasis::with_spatial_support(2, 1, 4, ModeBasis::spatial_support(f));
  Eigen::MatrixXcd A = dense_linearized(v, w, 0.0375, b);
  FourierField h = random_field(2, 1, 4, js, 1.0, 0.2, 2);
  DampingLinearization lin(v, w);
  FourierField Lh = DiagonalSymbol{0.0375, 0.0, w}.apply(h);
  Lh.axpy(std::pow(0.0375, 1.5), lin.DF(h, 4));
  EXPECT_LT((A * b.to_vector(h) - b.to_vector(Lh)).norm(), 1e-12);

  // real operator: A(-m, -n) = conj A(m, n)
  std::vector<std::size_t> neg(b.size());
  for (std::size_t m = 0; m < b.size(); ++m) {
    ModeIndex mi = b.mode(m);
    for (int& x : mi.k) x = -x;
    for (int& x : mi.j) x = -x;
    for (std::size_t n = 0; n < b.size(); ++n)
      if (b.mode(n) == mi) neg[m] = n;
  }
  double err = 0;
  for (std::size_t m = 0; m < b.size(); ++m)
    for (std::size_t n = 0; n < b.size(); ++n)
      err = std::max(err, std::abs(A(static_cast<Eigen::Index>(neg[m]), static_cast<Eigen::Index>(neg[n])) -
                                   std::conj(A(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)))));
  EXPECT_LT(err, 1e-14);
}

TEST(Oracle, DenseSolve) {
  Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(5, 5);
  Eigen::VectorXcd r = Eigen::VectorXcd::LinSpaced(5, 1.0, 5.0);
  EXPECT_LT((dense_solve(I, r) - r).norm(), 1e-16);
  EXPECT_THROW(dense_solve(Eigen::MatrixXcd::Zero(3, 3), Eigen::VectorXcd::Ones(3)), SolveError);
}

TEST(Oracle, CapEnforced) {
  std::vector<std::vector<int>> js = {{1}, {-1}};
  ModeBasis b = ModeBasis::with_spatial_support(2, 1, 8, js);
  EXPECT_THROW(assemble_dense(b, [](const FourierField& x) { return x; }, 10), SolveError);
}

TEST(Oracle, FdTrivialAndRichardson) {
  auto w = qt::golden();
  std::vector<std::vector<int>> js = {{1}};
  FourierField z(2, 1, TruncationBox{4, 2});
  FourierField h = random_field(2, 1, 4, js, 0.5, 0.5, 3);
  EXPECT_LT(fd_derivative_check(z, z, w, 1e-3, 2), 1e-16);
  EXPECT_LT(fd_derivative_check(h, z, w, 1e-3, 2), 1e-16);
  FourierField v = random_field(2, 1, 4, js, 0.5, 0.5, 4);
  const double r = fd_derivative_check(v, h, w, 4e-2, 2) / fd_derivative_check(v, h, w, 1e-2, 2);
  EXPECT_NEAR(r, 16.0, 1.0);
}

TEST(Oracle, RandomFieldDeterministic) {
  std::vector<std::vector<int>> js = {{1}, {3}};
  FourierField a = random_field(2, 1, 6, js, 1.0, 0.5, 42);
  FourierField b = random_field(2, 1, 6, js, 1.0, 0.5, 42);
  EXPECT_EQ(qt::max_diff(a, b), 0.0);
  EXPECT_TRUE(a.is_real());
  EXPECT_GT(qt::max_diff(a, random_field(2, 1, 6, js, 1.0, 0.5, 43)), 0.0);
}
