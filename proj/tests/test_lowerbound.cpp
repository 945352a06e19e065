#include <gtest/gtest.h>

#include <cmath>

#include "geonarrow/lowerbound.hpp"

namespace geonarrow {
namespace {

PointD P(std::initializer_list<double> v) {
  PointD p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p(i++) = x;
  return p;
}

TEST(ReferenceGrid, FirstHorizon) {
  const auto g = reference_grid(10000, 2, 1, 1.0);
  ASSERT_EQ(g.T_j.size(), 2u);
  EXPECT_EQ(g.T_j[0], 464);
  EXPECT_EQ(g.T_j[1], 10000);
}

TEST(ReferenceGrid, SingleLevel) {
  for (int d : {1, 2}) {
    for (double q : {1.0, 2.0}) {
      const auto g = reference_grid(123456, 1, d, q);
      EXPECT_EQ(g.T_j[0], 123456);
      const double want = std::sqrt(2.0) / 8.0 * std::sqrt(std::exp2(d) - 1.0) / (std::pow(2.0, q) + 2.0);
      EXPECT_NEAR(g.eps_pow_q(1), want, 1e-15);
    }
  }
}

TEST(ReferenceGrid, EpsTimesHorizonIsLevelFree) {
  for (int M : {2, 3, 4}) {
    const long long T = 1000000;
    const auto g = reference_grid(T, M, 2, 2.0);
    const double want = std::sqrt(2.0) / 8.0 * std::sqrt(3.0) / 6.0 / M *
                        std::pow(static_cast<double>(T), 0.5 / (1.0 - std::exp2(-M)));
    for (int j = 1; j <= M; ++j) {
      // T_j is floored, so the product sits just below the continuous value
      const double got = g.eps_pow_q(j) * static_cast<double>(g.T_j[j - 1]);
      EXPECT_NEAR(got / want, 1.0, 1e-3) << "M=" << M << " j=" << j;
      EXPECT_LE(got, want * (1 + 1e-12));
    }
  }
}

TEST(SingleBatchEpsilon, Examples) {
  EXPECT_NEAR(theorem2_epsilon(1, 1, 1.0), std::sqrt(2.0) / 4.0, 1e-15);
  EXPECT_NEAR(std::pow(theorem2_epsilon(10000, 1, 2.0), 2.0), std::sqrt(2.0) / 600.0, 1e-15);
  const double a = std::pow(theorem2_epsilon(1000, 2, 1.5), 1.5);
  const double b = std::pow(theorem2_epsilon(4000, 2, 1.5), 1.5);
  EXPECT_NEAR(b / a, 0.5, 1e-12);
}

TEST(Corners, SignEncoding) {
  EXPECT_EQ(corner_point(1, 0.5, 2), P({0.5, 0.5}));
  EXPECT_EQ(corner_point(2, 0.5, 2), P({-0.5, 0.5}));
  EXPECT_EQ(corner_point(3, 0.5, 2), P({0.5, -0.5}));
  EXPECT_EQ(corner_point(4, 0.5, 2), P({-0.5, -0.5}));
  for (int k = 1; k <= 8; ++k) EXPECT_EQ(orthant_of(corner_point(k, 1.0, 3)), k);
}

TEST(FJK, PointValues) {
  const auto g = reference_grid(1000000, 3, 2, 2.0);
  for (int j = 1; j < g.M; ++j) {
    for (int k = 1; k < 4; ++k) {
      const auto f = make_f_jk(g, j, k);
      EXPECT_NEAR(f(corner_point(k, g.eps(j), 2)), -g.eps_pow_q(j), 1e-15);
      EXPECT_EQ(f(PointD::Zero(2)), 0.0);
    }
  }
  // orthant 2 is untouched by f_{j,1}
  const auto f = make_f_jk(g, 1, 1);
  const double e = g.eps(1);
  EXPECT_NEAR(f(P({-10 * e, 5 * e})), std::pow(10 * e, 2.0), 1e-15);
}

TEST(FJK, IndexRangeChecked) {
  const auto g = reference_grid(10000, 2, 1, 1.0);
  EXPECT_THROW(make_f_jk(g, 0, 1), std::invalid_argument);
  EXPECT_THROW(make_f_jk(g, 3, 1), std::invalid_argument);
  EXPECT_THROW(make_f_jk(g, 1, 2), std::invalid_argument);
  EXPECT_THROW(make_f_jkl(g, 1, 1, 3), std::invalid_argument);
}

TEST(FJKL, DiagonalEqualsFJK) {
  const auto g = reference_grid(10000, 2, 2, 1.0);
  const auto a = make_f_jkl(g, 1, 2, 2);
  const auto b = make_f_jk(g, 1, 2);
  const double R = 3 * g.eps(1);
  for (const auto& x : grid_points(DomainD::cube(2, -R, R), 100)) ASSERT_EQ(a(x), b(x));
}

TEST(FJKL, StretchedCenterValue) {
  for (double q : {1.0, 2.0}) {
    const auto g = reference_grid(1000000, 3, 2, q);
    const double s = std::pow(2.0, 1.0 / q);
    for (int j = 1; j < g.M; ++j) {
      for (int k = 1; k < 4; ++k) {
        for (int l = 1; l < 4; ++l) {
          if (l == k) continue;
          const auto f = make_f_jkl(g, j, k, l);
          EXPECT_NEAR(f(corner_point(l, s * g.eps(j), 2)), -2.0 * g.eps_pow_q(j), 1e-14);
          EXPECT_EQ(f(PointD::Zero(2)), 0.0);
        }
      }
    }
  }
}

TEST(FKEps, PointValues) {
  const double eps = 0.1;
  const auto f1 = make_f_k_eps(1, eps, 2.0, 2);
  for (const auto& x : grid_points(DomainD::cube(2, -1.0, 1.0), 41)) {
    EXPECT_EQ(f1(x), std::pow(norm_inf(x), 2.0));
  }
  for (int k = 2; k <= 4; ++k) {
    const auto f = make_f_k_eps(k, eps, 2.0, 2);
    EXPECT_NEAR(f(corner_point(k, eps, 2)), -eps * eps, 1e-15);
    EXPECT_EQ(f(PointD::Zero(2)), 0.0);
  }
}

TEST(Nondegeneracy, FKEpsOneDimensionalLinear) {
  VerifyOptions opt;
  const auto f = make_f_k_eps(2, 0.1, 1.0, 1);
  const auto pts = lowerbound_audit_points(1, 0.5, {&f}, opt);
  const auto rep = check_nondegenerate(f, pts, 1.0, 9.0, opt.slack, "f_k_eps", {2});
  EXPECT_TRUE(rep.pass);
  EXPECT_GE(rep.min_ratio, 1.0 - 1e-9);
  EXPECT_LE(rep.max_ratio, 9.0 + 1e-9);
}

TEST(Nondegeneracy, FOneHasUnitRatios) {
  VerifyOptions opt;
  const auto f = make_f_k_eps(1, 0.1, 2.0, 2);
  const auto pts = lowerbound_audit_points(2, 0.5, {&f}, opt);
  const auto rep = check_nondegenerate(f, pts, 1.0, 1.0, opt.slack, "f_1", {1});
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(f.minimizer(), PointD::Zero(2));
}

TEST(Nondegeneracy, FJKTwoDimensionalQuadratic) {
  const auto g = reference_grid(1000000, 3, 2, 2.0);
  for (const auto& rep : check_prop_nondegen(LowerBoundFamily::f_jk, g)) {
    EXPECT_TRUE(rep.pass) << rep.property;
    EXPECT_GE(rep.min_ratio, 1.0 / 81.0);
    EXPECT_LE(rep.max_ratio, 25.0);
  }
}

TEST(Nondegeneracy, CheckerRejectsTooTightConstants) {
  VerifyOptions opt;
  const auto g = reference_grid(10000, 2, 1, 2.0);
  const auto f = make_f_jk(g, 1, 1);
  const auto pts = lowerbound_audit_points(1, 5 * g.eps(1), {&f}, opt);
  EXPECT_FALSE(check_nondegenerate(f, pts, 1.0 / 81.0, 1.0, opt.slack, "tight", {1, 1}).pass);
  EXPECT_FALSE(check_nondegenerate(f, pts, 1.0, 25.0, opt.slack, "tight", {1, 1}).pass);
}

TEST(GapProperties, CornerAndOrigin) {
  const auto g = reference_grid(10000, 2, 1, 1.0);
  const auto f = make_f_jk(g, 1, 1);
  const auto fm = make_f_jk(g, 2, 1);
  const PointD c = corner_point(1, g.eps(1), 1);
  EXPECT_NEAR(std::abs(f(c) - fm(c)), 2.0 * g.eps_pow_q(1), 1e-15);
  EXPECT_LE(std::abs(f(c) - fm(c)), 4.0 * g.eps_pow_q(1));
  EXPECT_EQ(f(PointD::Zero(1)) - fm(PointD::Zero(1)), 0.0);
}

TEST(GapProperties, SmallSuitePasses) {
  const auto g = reference_grid(10000, 2, 1, 1.0);
  bool saw_floor = false;
  for (const auto& rep : check_gap_props(g)) {
    EXPECT_TRUE(rep.pass) << rep.property;
    if (rep.property == "f_jkl.regret_floor" && rep.indices == std::vector<int>{1, 1, 2}) {
      saw_floor = true;
      EXPECT_GE(rep.min_ratio, 1.0 - 1e-9);
    }
  }
  EXPECT_TRUE(saw_floor);
  for (auto family : {LowerBoundFamily::f_jk, LowerBoundFamily::f_jkl, LowerBoundFamily::f_k_eps}) {
    for (const auto& rep : check_prop_nondegen(family, g)) EXPECT_TRUE(rep.pass) << rep.property;
  }
}

TEST(GapProperties, FKAgainstFOne) {
  for (int d : {1, 2}) {
    for (double q : {1.0, 2.0}) {
      for (const auto& rep : check_orthant_gap(10000, d, q)) EXPECT_TRUE(rep.pass) << rep.property << " d=" << d;
    }
  }
}

TEST(URegions, PartitionSpace) {
  const double eps = 0.2;
  for (const auto& x : grid_points(DomainD::cube(2, -1.0, 1.0), 81)) {
    int hits = 0;
    for (int k = 1; k <= 4; ++k) hits += in_u_region(k, eps, x);
    ASSERT_EQ(hits, 1) << x.transpose();
  }
}

TEST(LowerBoundInstance, WrapsFunction) {
  const auto g = reference_grid(10000, 2, 1, 2.0);
  const auto f = make_f_jk(g, 1, 1);
  const double R = 5 * g.eps(1);
  const auto inst = make_lowerbound_instance(f, R, 1.0 / 81.0, 25.0);
  EXPECT_EQ(inst.domain.dim(), 1);
  EXPECT_EQ(inst.minimizer, f.minimizer());
  EXPECT_DOUBLE_EQ(inst.optimum(), f.min_value());
}

}  // namespace
}  // namespace geonarrow
