#include <gtest/gtest.h>

#include <cmath>

#include "geonarrow/scheduler.hpp"

namespace geonarrow {
namespace {

// Reference values below were produced by a separate straight-line
// evaluation of the schedule formulas (floating point, natural logs).

TEST(ChooseM, MillionHorizon) { EXPECT_EQ(choose_M(1000000, 1, 2.0), 5); }

TEST(ChooseM, MonotoneAndDoublyLogarithmic) {
  int prev = 0;
  for (long long T = 8; T < 4'000'000'000'000LL; T *= 3) {
    const int m = choose_M(T, 1, 2.0);
    EXPECT_GE(m, prev) << T;
    prev = m;
  }
  EXPECT_LE(choose_M(1'000'000'000'000LL, 1, 2.0) - choose_M(1000000, 1, 2.0), 2);
}

TEST(ChooseM, RejectsTinyHorizon) { EXPECT_THROW(choose_M(7, 1, 2.0), std::invalid_argument); }

TEST(SamplesPerBall, Formula) {
  // 16 ln 3 / 0.25 = 70.31
  EXPECT_EQ(samples_per_ball(3, 1.0, 1.0, 0.5), 71);
  EXPECT_EQ(samples_per_ball(1000000, 1.0, 2.0, 0.5), 3537);
  EXPECT_EQ(samples_per_ball(1000000, 2.0, 2.0, 0.5), 885);
}

TEST(RRSchedule, TwoDimensionalMillion) {
  const auto s = rr_schedule(1000000, 2, 2.0, 1.0);
  EXPECT_NEAR(s.c_hat.front(), 1.345279299658608, 1e-12);
  EXPECT_DOUBLE_EQ(s.eta_hat, 2.0 / 3.0);
  EXPECT_EQ(s.r_bar[0], 0.5);
  EXPECT_EQ(s.r_bar[1], 0.25);
  EXPECT_LE(s.r_bar[1], s.r_hat[0]);
  EXPECT_LE(s.r_hat[0], s.r_bar[0]);
  EXPECT_EQ(s.M, 6);
  const std::vector<int> exps{1, 2, 2, 3, 2, 3, 3, 4, 3, 4, 3, 4};
  EXPECT_EQ(s.radius_exp, exps);
}

TEST(RRSchedule, OneDimensionalMillion) {
  const auto s = rr_schedule(1000000, 1, 2.0, 1.0);
  const std::vector<int> exps{1, 2, 2, 3, 3, 4, 3, 4, 3, 4};
  const std::vector<long long> n{3537, 56589, 56589, 905414, 905414, 14486613, 905414, 14486613, 905414, 14486613};
  EXPECT_EQ(s.radius_exp, exps);
  EXPECT_EQ(s.n, n);
  ASSERT_EQ(s.size(), 2 * s.M);
}

TEST(RRSchedule, SandwichAndExactPowers) {
  for (long long T : {100LL, 10000LL, 1000000LL, 100000000LL}) {
    for (int d : {1, 2, 3}) {
      for (double q : {1.0, 1.5, 2.0}) {
        const auto s = rr_schedule(T, d, q, 1.0);
        for (int k = 0; k < s.M; ++k) {
          EXPECT_LE(s.r_bar[2 * k + 1], s.r_hat[k]);
          EXPECT_LE(s.r_hat[k], s.r_bar[2 * k]);
        }
        for (int m = 0; m < s.size(); ++m) {
          EXPECT_EQ(s.r_bar[m], std::ldexp(1.0, -s.radius_exp[m]));
          EXPECT_GE(s.n[m], 1);
        }
      }
    }
  }
}

TEST(SimpleSchedule, HalvingRadii) {
  const auto s = simple_schedule(10000, 1.0, 2.0, 3);
  ASSERT_EQ(s.size(), 3);
  EXPECT_EQ(s.r_bar[0], 0.5);
  EXPECT_EQ(s.r_bar[1], 0.25);
  EXPECT_EQ(s.r_bar[2], 0.125);
  EXPECT_LT(s.n[0], s.n[1]);
  EXPECT_LT(s.n[1], s.n[2]);
}

TEST(RetainedBallBound, Examples) {
  // 3 + 2 * 2 = 7 -> 8
  EXPECT_EQ(retained_ball_bound(1.0, 1.0, 1.0), 8.0);
  // 3 + 2 * sqrt(2) = 5.83 -> 8
  EXPECT_EQ(retained_ball_bound(1.0, 1.0, 2.0), 8.0);
  // 3 + 2 * 5 = 13 -> 16
  EXPECT_EQ(retained_ball_bound(0.5, 2.0, 1.0), 16.0);
}

struct GridCase {
  long long T;
  int d;
  double q;
  std::vector<long long> tau;
  std::vector<int> s;
};

class StaticGridOracle : public ::testing::TestWithParam<GridCase> {};

TEST_P(StaticGridOracle, MatchesReference) {
  const auto& c = GetParam();
  const auto g = static_grid(c.T, c.d, c.q, 1.0, 1.0);
  EXPECT_EQ(g.B_const, 8.0);
  EXPECT_EQ(g.tau, c.tau);
  EXPECT_EQ(g.s, c.s);
  EXPECT_EQ(g.M_s, static_cast<int>(c.s.size()));
  for (std::size_t m = 1; m < g.tau.size(); ++m) EXPECT_LT(g.tau[m - 1], g.tau[m]);
  EXPECT_LE(g.tau.back(), c.T);
  EXPECT_LE(g.M_s, 2 * g.schedule.M);
}

INSTANTIATE_TEST_SUITE_P(
    Reference, StaticGridOracle,
    ::testing::Values(GridCase{1000000, 1, 2.0, {0, 28296, 933720}, {1, 2}},
                      GridCase{100000000, 1, 2.0, {0, 1207232, 20522720, 30180464}, {1, 2, 3}},
                      GridCase{1000000000, 1, 1.0, {0, 5432512, 10864992, 184704352, 532383072, 706222432},
                               {1, 2, 3, 4, 5}},
                      GridCase{10000000, 2, 1.0, {0, 1056512, 5281792}, {1, 2}}));

TEST(StaticGrid, InfeasibleHorizonThrows) {
  EXPECT_THROW(static_grid(10000, 1, 2.0, 1.0, 1.0), ScheduleInfeasible);
}

TEST(StaticGrid, RadiiNeverGrowAlongTheGrid) {
  for (long long T : {1000000LL, 100000000LL, 1000000000LL}) {
    const auto g = static_grid(T, 1, 1.0, 1.0, 1.0);
    for (std::size_t m = 1; m < g.s.size(); ++m) {
      EXPECT_LE(g.schedule.r_bar[g.s[m] - 1], g.schedule.r_bar[g.s[m - 1] - 1]);
      EXPECT_GT(g.s[m], static_cast<int>(m));
    }
  }
}

TEST(StaticGrid, RequiresOrderedParameters) {
  EXPECT_THROW(static_grid(1000000, 1, 2.0, 2.0, 1.0), std::invalid_argument);
}

}  // namespace
}  // namespace geonarrow
