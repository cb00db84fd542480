#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "revsurf/geodesic.hpp"

using namespace revsurf;

namespace {

RadialProfile flat(double T = 20) { return from_warping(RadialFunction::parse("t"), T, Tolerances{}); }
RadialProfile hyperbolic(double T = 8) { return from_warping(RadialFunction::parse("sinh(t)"), T, Tolerances{}); }

// Independent oracles: law of cosines in the plane and the hyperbolic plane.
double euclid(SurfacePoint a, SurfacePoint b) {
  return std::sqrt(std::max(0.0, a.t * a.t + b.t * b.t - 2 * a.t * b.t * std::cos(b.theta - a.theta)));
}
double hyper(SurfacePoint a, SurfacePoint b) {
  const double c = std::cosh(a.t) * std::cosh(b.t) - std::sinh(a.t) * std::sinh(b.t) * std::cos(b.theta - a.theta);
  return std::acosh(std::max(1.0, c));
}

}  // namespace

TEST(Launch, ClairautConstant) {
  auto f = flat();
  EXPECT_EQ(launch(f, {1, 0}, 0.0).nu, 0.0);
  EXPECT_NEAR(launch(f, {2, 0}, kPi / 6).nu, 1.0, 1e-15);
  EXPECT_NEAR(launch(hyperbolic(), {1, 0}, kPi / 2).nu, 1.175201, 1e-6);
  EXPECT_THROW(launch(f, {0, 0}, 0.3), PoleLaunchWithSpin);
  EXPECT_NO_THROW(launch(f, {0, 0}, 0.0));
  EXPECT_THROW(launch(f, {1, 0}, 4.0), ValidationFailure);
}

TEST(SurfacePoint, PoleConvention) {
  SurfacePoint p(0.0, 2.0);
  EXPECT_EQ(p.theta, 0.0);
  SurfacePoint q(1.0, -0.5);
  EXPECT_NEAR(q.theta, 2 * kPi - 0.5, 1e-15);
  EXPECT_THROW(SurfacePoint(-1.0, 0.0), ValidationFailure);
}

TEST(Trace, EuclideanTangentLine) {
  auto f = flat();
  auto arc = trace(f, launch(f, {1, 0}, kPi / 2), 2.0);
  ASSERT_FALSE(arc.samples.empty());
  EXPECT_NEAR(arc.samples.back().s, 2.0, 1e-15);
  EXPECT_NEAR(arc.samples.back().t, std::sqrt(5.0), 1e-9);
  EXPECT_NEAR(arc.samples.back().theta, std::atan(2.0), 1e-9);
}

TEST(Trace, MeridianAndPolePassage) {
  auto f = flat();
  auto out = trace(f, launch(f, {1, 0.3}, 0.0), 2.0);
  for (const auto& x : out.samples) {
    EXPECT_NEAR(x.theta, 0.3, 0.0);
    EXPECT_NEAR(x.t, 1 + x.s, 1e-15);
  }
  auto in = trace(f, launch(f, {1, 0.3}, kPi), 3.0);
  EXPECT_NEAR(in.samples.back().t, 2.0, 1e-15);
  EXPECT_NEAR(in.samples.back().theta, 0.3 + kPi, 1e-15);
}

TEST(Trace, TurningPointsAndBranches) {
  auto f = flat();
  // Inward launch: t decreases to the turning radius ν and comes back out.
  auto arc = trace(f, launch(f, {3, 0}, 2.5), 8.0);
  ASSERT_EQ(arc.turnings.size(), 1u);
  const double nu = 3 * std::sin(2.5);
  const double s_turn = 3 * std::cos(kPi - 2.5);
  EXPECT_NEAR(arc.turnings[0], s_turn, 1e-8);
  for (std::size_t i = 1; i < arc.samples.size(); ++i) {
    const auto& x = arc.samples[i];
    EXPECT_GT(x.s, arc.samples[i - 1].s);
    EXPECT_EQ(x.branch, x.s < s_turn - 1e-9 ? -1 : 1);
    EXPECT_NEAR(x.t, std::hypot(nu, x.s - s_turn), 1e-9);
    if (x.t_rate != 0.0)
      EXPECT_NEAR(std::abs(x.t_rate), std::sqrt(x.t * x.t - nu * nu) / x.t, 1e-9);
  }
}

TEST(Trace, ClairautConservation) {
  for (const char* g : {"-1/(1+t^2)", "if(t <= pi/4, 1, 0)", "1/(1+t^2)^2", "-t/(1+t)^3"}) {
    auto s = from_curvature(RadialFunction::parse(g), 60, Tolerances{});
    for (double psi : {0.4, 1.3, 1.9, 2.8}) {
      auto arc = trace(s, launch(s, {2, 1}, psi), 50.0);
      double worst = 0;
      for (const auto& x : arc.samples) worst = std::max(worst, clairaut_residual(s, arc, x));
      EXPECT_LE(worst, 1e-9) << g << " psi=" << psi;
    }
  }
}

TEST(Trace, HorizonExitFlag) {
  auto f = flat(5);
  auto arc = trace(f, launch(f, {1, 0}, 0.5), 100.0);
  EXPECT_TRUE(arc.horizon_exit);
  EXPECT_NEAR(arc.samples.back().t, 5.0, 1e-9);
}

TEST(Trace, PathRandomAccess) {
  auto s = hyperbolic();
  auto arc = trace(s, launch(s, {1.5, 0}, 2.0), 3.0);
  GeodesicPath path(s, arc);
  auto direct = trace(s, launch(s, {1.5, 0}, 2.0), 1.234);
  const auto x = path.state(1.234);
  EXPECT_NEAR(x[0], direct.samples.back().t, 1e-10);
  EXPECT_NEAR(x[2], direct.samples.back().theta, 1e-10);
}

TEST(ThetaAdvance, Examples) {
  auto f = flat();
  EXPECT_EQ(theta_advance(f, 0.0, 1, 2), 0.0);
  EXPECT_NEAR(theta_advance(f, 1.0, 1, 2), kPi / 3, 1e-11);
  EXPECT_NEAR(theta_advance(f, 1.0, 1, std::numeric_limits<double>::infinity()), kPi / 2, 1e-10);
  EXPECT_THROW(theta_advance(f, 1.5, 1, 2), BranchViolation);
}

TEST(ThetaAdvance, HyperbolicClosedForm) {
  // On sinh: ∫ ν / (f √(f² − ν²)) dt from the turning radius, compared with
  // the closed form arctan(ν cosh t / √(sinh² t − ν²)) − π/2 + π/2.
  auto s = hyperbolic();
  const double nu = 0.8, t0 = std::asinh(nu);
  auto oracle = [&](double t) {
    return std::atan(std::sqrt(std::sinh(t) * std::sinh(t) - nu * nu) / (nu * std::cosh(t)));
  };
  for (double t : {t0 + 1e-6, t0 + 0.1, 1.5, 4.0})
    EXPECT_NEAR(theta_advance(s, nu, t0, t), oracle(t), 1e-10) << t;
}

TEST(Connect, Examples) {
  auto f = flat();
  auto c = connect(f, {1, 0}, {1, kPi / 2});
  ASSERT_GE(c.size(), 1u);
  EXPECT_NEAR(c.front().length, std::sqrt(2.0), 1e-10);
  EXPECT_NEAR(distance(f, {1, 0}, {2, 0}), 1.0, 1e-15);
  EXPECT_NEAR(distance(hyperbolic(), {1, 0}, {1, kPi / 2}), std::acosh(std::cosh(1) * std::cosh(1)), 1e-9);
  EXPECT_NEAR(distance(hyperbolic(), {1, 0}, {1, kPi / 2}), 1.5133, 1e-4);
  EXPECT_NEAR(distance(f, {1, 0}, {1, kPi / 3}), 1.0, 1e-10);
  EXPECT_NEAR(distance(f, {1, 0}, {0, 0}), 1.0, 0.0);
  EXPECT_NEAR(distance(f, {1, 0}, {2, kPi}), 3.0, 1e-12);
  EXPECT_THROW(connect(f, {1, 0}, {1, 0}), ValidationFailure);
}

TEST(Connect, LaunchedArcReachesTarget) {
  auto s = hyperbolic();
  SurfacePoint a(1.2, 0.4), b(2.0, 5.9);
  auto c = connect(s, a, b).front();
  auto arc = trace(s, c.arc, c.length);
  const auto& end = arc.samples.back();
  EXPECT_NEAR(end.t, b.t, 1e-8);
  EXPECT_NEAR(angular_separation(end.theta, b.theta), 0.0, 1e-8);
}

TEST(Distance, FlatAndHyperbolicOracles) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> rt(0.05, 5.0), ang(0.0, 2 * kPi);
  auto f = flat();
  auto h = hyperbolic();
  for (int i = 0; i < 40; ++i) {
    SurfacePoint a(rt(rng), ang(rng)), b(rt(rng), ang(rng));
    EXPECT_NEAR(distance(f, a, b), euclid(a, b), 1e-7);
    EXPECT_NEAR(distance(h, a, b), hyper(a, b), 1e-6);
  }
}

TEST(Distance, SymmetryAndTriangleInequality) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> rt(0.1, 4.0), ang(0.0, 2 * kPi);
  auto bump = from_curvature(RadialFunction::parse("if(t <= pi/4, 1, 0)"), 20, Tolerances{});
  for (int i = 0; i < 25; ++i) {
    SurfacePoint a(rt(rng), ang(rng)), b(rt(rng), ang(rng)), c(rt(rng), ang(rng));
    const double ab = distance(bump, a, b), ba = distance(bump, b, a);
    EXPECT_NEAR(ab, ba, 1e-8);
    EXPECT_LE(distance(bump, a, c), ab + distance(bump, b, c) + 1e-7);
  }
}

TEST(Distance, MonotoneInAngularSeparation) {
  auto h = hyperbolic();
  EXPECT_LT(distance(h, {1, 0}, {1, 0.3}), distance(h, {1, 0}, {1, 0.6}));
  auto bump = from_curvature(RadialFunction::parse("if(t <= pi/4, 1, 0)"), 20, Tolerances{});
  for (auto [ta, tb] : {std::pair{0.5, 2.0}, std::pair{1.0, 1.0}, std::pair{3.0, 0.7}}) {
    double prev = 0;
    for (double th = 0.1; th <= kPi + 1e-12; th += 0.15) {
      const double d = distance(bump, {ta, 0}, {tb, th});
      EXPECT_GT(d, prev);
      prev = d;
    }
  }
}

TEST(Distance, ClairautConstantsShrinkInNarrowSectors) {
  // Segments inside V(1/i) that meet B_1 and end beyond t = 1.
  auto h = hyperbolic();
  for (int i = 2; i <= 20; ++i) {
    const double width = 1.0 / i;
    auto c = connect(h, {0.5, 0.0}, {3.0, 0.9 * width}).front();
    EXPECT_LE(c.arc.nu, 2.0 / i) << i;
  }
}
