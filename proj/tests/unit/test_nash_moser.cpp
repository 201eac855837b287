#include <gtest/gtest.h>

#include <sstream>

#include "common.hpp"
#include "qpbeam/cli_io.hpp"
#include "qpbeam/errors.hpp"
#include "qpbeam/nash_moser.hpp"

using namespace qpbeam;

TEST(Schedule, K0AndLevels) {
  EXPECT_EQ(compute_k0(2.0 / 3.0), 32);
  ScheduleParams p;
  Schedule s = build_schedule(p);
  EXPECT_NEAR(s.lambda, 2.0 / 3.0, 1e-16);
  EXPECT_EQ(s.k0, 32);
  EXPECT_EQ(s.N, (std::vector<int>{8, 16, 32, 64}));
  p.rho0 = 1.0;
  Schedule t = build_schedule(p);
  for (std::size_t n = 0; n < t.rho.size(); ++n) EXPECT_NEAR(t.rho[n], std::pow(2.0 / 3.0, n), 1e-15);
}

TEST(Schedule, ViolationsCollected) {
  ScheduleParams p;
  p.M = 2;
  p.epsilon = 0.2;
  try {
    build_schedule(p);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_GE(e.violations().size(), 2u);
  }
}

TEST(NashMoser, ZeroForcing) {
  ScheduleParams p;
  p.levels = 2;
  Schedule s = build_schedule(p);
  FourierField g(2, 1, TruncationBox{16, 2});
  LevelResult l0 = solve_level0(g, qt::golden(), s);
  EXPECT_TRUE(l0.v.is_zero());
  RunOutput out = run(g, qt::golden(), s);
  EXPECT_TRUE(out.u.is_zero());
  EXPECT_EQ(out.report.final_residual_max, 0.0);
}

TEST(NashMoser, BandLimitedTailVanishes) {
  // F of a purely spatial field is zero, so the level-0 solution is exact
  ScheduleParams p;
  p.levels = 2;
  Schedule s = build_schedule(p);
  auto w = qt::golden();
  FourierField g = qt::cosine({0, 0}, {1}, 8);
  IterationOptions o;
  o.stop_increment = 0;
  LevelResult l0 = solve_level0(g, w, s, o);
  LevelResult l1 = solve_level_np1(l0, rebox(g, 16), w, s, 0, o);
  EXPECT_LT(l1.increment.max_abs(), 1e-16);
}

TEST(NashMoser, ShortRunConverges) {
  ScheduleParams p;
  p.levels = 2;
  Schedule s = build_schedule(p);
  Config c;
  FourierField g = build_forcing(c, 16);
  RunOptions o;
  o.iteration.stop_increment = 0;
  o.residual_grid = 32;
  RunOutput out = run(g, qt::golden(), s, o);
  EXPECT_TRUE(out.report.converged);
  EXPECT_LT(out.report.final_residual_max, 1e-10);
  const double e = std::pow(p.epsilon, 0.75);
  EXPECT_LT(qt::max_diff(out.U, e * out.u), 1e-16);
  GridResidual r = pde_residual_on_grid(out.u, g, qt::golden(), p.epsilon, 32);
  EXPECT_EQ(r.max_abs, out.report.final_residual_max);
}

TEST(NashMoser, ReportLayout) {
  ScheduleParams p;
  p.levels = 2;
  Schedule s = build_schedule(p);
  Config c;
  RunOutput out = run(build_forcing(c, 16), qt::golden(), s);
  std::ostringstream os;
  write_run_report(os, out.report, s);
  const std::string t = os.str();
  EXPECT_EQ(t.rfind("level,N,rho,", 0), 0u);
  EXPECT_NE(t.find("\n\nkey,value\n"), std::string::npos);
  EXPECT_NE(t.find("verdict,"), std::string::npos);
}
