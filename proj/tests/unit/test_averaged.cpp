#include <gtest/gtest.h>

#include "common.hpp"
#include "qpbeam/averaged_solver.hpp"
#include "qpbeam/errors.hpp"
#include "qpbeam/oracle.hpp"

using namespace qpbeam;

namespace {
const double kEps = 0.0375;
}

TEST(Averaged, ZeroForcing) {
  FourierField z(2, 1, TruncationBox{8, 2}, Arity::PhaseOnly);
  EXPECT_TRUE(solve_average(z, qt::golden(), kEps).is_zero());
}

TEST(Averaged, SingleModeSymbol) {
  auto w = qt::golden();
  FourierField g(2, 1, TruncationBox{8, 2}, Arity::PhaseOnly);
  g.set(ModeIndex{{1, 1}, {}}, 1.0);
  g.set(ModeIndex{{-1, -1}, {}}, 1.0);
  const double wk = w[0] + w[1];
  const cplx expect = std::pow(kEps, 1.25) / (cplx(-wk * wk, kEps * wk));
  EXPECT_LT(std::abs(solve_average(g, w, kEps).coeff(ModeIndex{{1, 1}, {}}) - expect), 1e-15);
}

TEST(Averaged, Residual) {
  auto w = qt::golden();
  for (int seed = 0; seed < 5; ++seed) {
    FourierField g = random_phase_field(2, 1, 12, 1.0, 0.3, static_cast<std::uint64_t>(seed));
    EXPECT_LT(residual_average(solve_average(g, w, kEps), g, w, kEps, 2), 1e-12);
  }
  FourierField g = random_phase_field(2, 1, 12, 1.0, 0.3, 9);
  FourierField z(2, 1, TruncationBox{12, 2}, Arity::PhaseOnly);
  EXPECT_NEAR(residual_average(z, g, w, kEps, 2), std::pow(kEps, 1.25) * sobolev_norm(g, NormSpec{0, 2}), 1e-15);
}

TEST(Averaged, Linearity) {
  auto w = qt::golden();
  FourierField g = random_phase_field(2, 1, 10, 1.0, 0.3, 11);
  EXPECT_LT(qt::max_diff(solve_average(3.0 * g, w, kEps), 3.0 * solve_average(g, w, kEps)), 1e-14);
}

TEST(Averaged, NonzeroMeanRejected) {
  FourierField g(2, 1, TruncationBox{4, 2}, Arity::PhaseOnly);
  g.set(ModeIndex{{0, 0}, {}}, 1.0);
  EXPECT_THROW(solve_average(g, qt::golden(), kEps), PhaseMeanError);
}
