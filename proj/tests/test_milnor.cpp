#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "revsurf/milnor.hpp"

using namespace revsurf;

namespace {

constexpr double kPi = std::numbers::pi;

// ∫_0^T t (1+t)^-3 dt from the antiderivative -1/(1+t) + 1/(2(1+t)^2).
double lambda_cubic(double T) {
  auto F = [](double t) { return -1.0 / (1 + t) + 0.5 / ((1 + t) * (1 + t)); };
  return F(T) - F(0);
}

CurvatureField single(const std::string& expr, double T, int n = 2048) {
  return CurvatureField::from_expressions({expr}, T, n);
}

}  // namespace

TEST(LowerEnvelope, Examples) {
  auto one = lower_envelope(single("-1/(1+t)", 5, 100));
  EXPECT_NEAR(one.G[50], -1 / (1 + one.t[50]), 1e-15);

  auto two = lower_envelope(CurvatureField::from_expressions({"0", "-1/(1+t)"}, 5, 100));
  for (std::size_t i = 0; i < two.t.size(); ++i) EXPECT_DOUBLE_EQ(two.G[i], -1 / (1 + two.t[i]));

  auto kink = lower_envelope(CurvatureField::from_expressions({"-t", "t-2"}, 2, 64));
  EXPECT_DOUBLE_EQ(kink.function(1.0), -1.0);
  EXPECT_DOUBLE_EQ(kink.G[32], -1.0);
  EXPECT_LE(kink.lipschitz, 1.0 + 1e-12);
  EXPECT_NEAR(kink.function(0.5), -1.5, 1e-15);
  EXPECT_NEAR(kink.function(1.5), -1.5, 1e-15);
}

TEST(LowerEnvelope, DominanceAndAttainmentOnSampledFields) {
  std::mt19937 rng(3);
  std::normal_distribution<double> z;
  std::vector<FieldDirection> dirs(4);
  for (int k = 0; k < 4; ++k) {
    dirs[k].label = "K_" + std::to_string(k + 1);
    double v = z(rng);
    for (int i = 0; i <= 200; ++i) {
      dirs[k].t.push_back(0.05 * i);
      dirs[k].K.push_back(v);
      v += 0.05 * z(rng);
    }
  }
  const CurvatureField field(dirs);
  auto g = lower_envelope(field);
  double max_l = 0;
  for (const auto& d : field.directions()) max_l = std::max(max_l, d.lipschitz);
  EXPECT_LE(g.lipschitz, max_l + 1e-12);
  for (std::size_t i = 0; i < g.t.size(); ++i) {
    bool attained = false;
    for (const auto& d : field.directions()) {
      EXPECT_LE(g.G[i], d.K[i]);
      attained = attained || g.G[i] == d.K[i];
    }
    EXPECT_TRUE(attained) << i;
    EXPECT_DOUBLE_EQ(g.function(g.t[i]), g.G[i]);
  }

  dirs[1].t[7] += 1e-3;
  EXPECT_THROW(lower_envelope(CurvatureField(dirs)), GridMismatch);
}

TEST(Clamp, ExamplesAndIdempotence) {
  auto pos = clamp_nonpositive(lower_envelope(single("1", 3, 64)));
  for (double v : pos.G) EXPECT_EQ(v, 0.0);
  auto neg = clamp_nonpositive(lower_envelope(single("-1", 3, 64)));
  for (double v : neg.G) EXPECT_EQ(v, -1.0);
  auto c = clamp_nonpositive(lower_envelope(single("cos(t)", 6, 600)));
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    EXPECT_EQ(c.G[i], std::min(0.0, std::cos(c.t[i])));
    if (c.t[i] <= kPi / 2) EXPECT_EQ(c.function(c.t[i]), 0.0);
  }
  auto twice = clamp_nonpositive(c);
  EXPECT_EQ(twice.G, c.G);
  for (double t : {0.3, 2.0, 4.1}) EXPECT_EQ(twice.function(t), c.function(t));
}

TEST(LambdaIntegral, Examples) {
  auto zero = lambda_integral(clamp_nonpositive(lower_envelope(single("0", 10))), std::nullopt);
  EXPECT_EQ(zero.horizon_value, 0.0);
  ASSERT_TRUE(zero.limit);
  EXPECT_EQ(*zero.limit, 0.0);

  auto cubic = clamp_nonpositive(lower_envelope(single("-(1+t)^(-3)", 50)));
  auto lam = lambda_integral(cubic, TailBound{1.0, 3.0});
  EXPECT_NEAR(lam.horizon_value, lambda_cubic(50), 1e-12);
  ASSERT_TRUE(lam.limit);
  EXPECT_NEAR(*lam.limit, 0.5, 1e-6);
  EXPECT_NEAR(lam.tail_bound, 1.0 / 50, 1e-15);
  EXPECT_LE(*lam.limit - lam.horizon_value, lam.tail_bound);
  // Without an annotation nothing is claimed beyond the horizon.
  EXPECT_FALSE(lambda_integral(cubic, std::nullopt).limit);

  auto flat = clamp_nonpositive(lower_envelope(single("-1", 5)));
  auto div = lambda_integral(flat, TailBound{1.0, 0.0});
  EXPECT_TRUE(div.divergent);
  EXPECT_FALSE(div.limit);
  EXPECT_NEAR(div.horizon_value, 12.5, 1e-12);
}

TEST(Gronwall, CubicDecayToHorizon50) {
  auto gstar = clamp_nonpositive(lower_envelope(single("-(1+t)^(-3)", 50)));
  auto a = gronwall_audit(gstar);
  EXPECT_TRUE(a.monotone);
  for (std::size_t i = 0; i < a.t.size(); ++i) {
    EXPECT_LE(a.m_prime[i], a.bound[i] + 1e-11);
    EXPECT_NEAR(a.bound[i], std::exp(lambda_cubic(a.t[i])), 1e-11);
  }
  EXPECT_LE(a.m_prime.back(), std::exp(0.5));
  EXPECT_GT(a.m_prime.back(), 1.0);

  auto zero = gronwall_audit(clamp_nonpositive(lower_envelope(single("0", 10))));
  for (double v : zero.m_prime) EXPECT_NEAR(v, 1.0, 1e-14);
}

TEST(Gronwall, TamperedInputFailsAtTheFirstViolation) {
  std::vector<double> t{0, 1, 2, 3, 4}, lambda{0, 0.1, 0.2, 0.3, 0.3};
  std::vector<double> mp{1, 1.05, std::exp(0.2) + 1e-3, 1.5, 1.0};
  try {
    check_gronwall(t, mp, lambda, 1e-11);
    FAIL() << "expected an audit failure";
  } catch (const AuditFailure& e) {
    EXPECT_EQ(e.node(), 2u);
    EXPECT_EQ(e.t(), 2.0);
  }
  mp[2] = std::exp(0.2);
  mp[3] = std::exp(0.3);
  mp[4] = std::exp(0.3);
  EXPECT_NO_THROW(check_gronwall(t, mp, lambda, 1e-11));
}

TEST(Gronwall, RandomDecayingSplines) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> amp(0.0, 2.0), power(2.2, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double p = power(rng);
    std::vector<double> x, y;
    for (int i = 0; i <= 25; ++i) {
      const double t = 0.8 * i;
      x.push_back(t);
      y.push_back(-amp(rng) * std::pow(1 + t, -p));
    }
    const FieldDirection d{"K_1", x, y, std::nullopt, 0.0};
    auto gstar = clamp_nonpositive(lower_envelope(CurvatureField({d})));
    Tolerances tol;
    tol.grid_n = 512;
    GronwallAudit a;
    ASSERT_NO_THROW(a = gronwall_audit(gstar, tol)) << trial;
    EXPECT_TRUE(a.monotone) << trial;
  }
}

TEST(DecayCheck, Examples) {
  auto cubic = polynomial_decay_check([](double t) { return -1 / (t * t * t); }, 1.0, -1.0, 100);
  EXPECT_TRUE(cubic.pass);
  EXPECT_NEAR(cubic.C, 1.0, 1e-8);
  EXPECT_NEAR(cubic.lambda_tail_bound, 1.0, 1e-8);
  EXPECT_NEAR(cubic.growth_exponent, 0.0, 1e-9);

  auto flat = polynomial_decay_check([](double) { return -1.0; }, 1.0, -1.0, 100);
  EXPECT_FALSE(flat.pass);
  EXPECT_NEAR(flat.growth_exponent, 3.0, 1e-9);
  for (double alpha : {0.5, 2.0}) EXPECT_FALSE(polynomial_decay_check([](double) { return -1.0; }, alpha, -5.0, 100).pass);

  auto pos = polynomial_decay_check([](double t) { return 1 / t; }, 1.0, -1.0, 100);
  EXPECT_TRUE(pos.pass);
  EXPECT_GT(pos.margin, 0.0);

  EXPECT_THROW(polynomial_decay_check([](double) { return 0.0; }, 0.0, -1.0, 10), PreconditionViolation);
  EXPECT_THROW(polynomial_decay_check([](double) { return 0.0; }, 1.0, 1.0, 10), PreconditionViolation);
}

TEST(MilnorVerdict, CubicDecayIsFinite) {
  auto r = milnor_verdict(single("-(1+t)^(-3)", 50), TailBound{1.0, 3.0});
  EXPECT_EQ(r.verdict, MilnorReport::Verdict::kFinite);
  EXPECT_TRUE(r.gronwall_ok);
  EXPECT_NEAR(r.lambda.best(), 0.5, 1e-6);
  EXPECT_LE(r.m_prime_horizon, std::exp(r.lambda.best()) + 1e-11);
  EXPECT_EQ(r.total_curvature.verdict, TotalCurvature::Verdict::kFinite);
  EXPECT_GT(r.total_curvature.value, -2 * kPi * (std::exp(0.5) - 1));
  EXPECT_LT(r.total_curvature.value, 0.0);

  // Consistency with the profile built directly from G*.
  auto gstar = clamp_nonpositive(lower_envelope(single("-(1+t)^(-3)", 50)));
  auto direct = total_curvature(from_curvature(gstar.function, 50, Tolerances{}, TailBound{1.0, 3.0}));
  EXPECT_NEAR(r.total_curvature.value, direct.value, 1e-11);

  std::ostringstream os;
  write_report(os, r);
  EXPECT_NE(os.str().find("lambda,total_curvature,m_prime,verdict\n"), std::string::npos);
  EXPECT_NE(os.str().find(",finite-total-curvature\n"), std::string::npos);
}

TEST(MilnorVerdict, ConstantNegativeIsInfinite) {
  auto r = milnor_verdict(single("-1", 10), TailBound{1.0, 0.0});
  EXPECT_EQ(r.verdict, MilnorReport::Verdict::kInfinite);
  EXPECT_TRUE(r.lambda.divergent);
  EXPECT_NEAR(r.m_prime_horizon, std::cosh(10.0), 1e-9 * std::cosh(10.0));
  EXPECT_EQ(r.total_curvature.verdict, TotalCurvature::Verdict::kNegativeInfinity);
  EXPECT_EQ(milnor_verdict(single("-1", 10)).verdict, MilnorReport::Verdict::kInconclusive);
}

TEST(MilnorVerdict, BumpClampsToFlat) {
  auto r = milnor_verdict(single("if(t <= pi/4, 1, 0)", 10));
  EXPECT_EQ(r.verdict, MilnorReport::Verdict::kFinite);
  EXPECT_EQ(r.lambda.best(), 0.0);
  EXPECT_NEAR(r.m_prime_horizon, 1.0, 1e-14);
  EXPECT_NEAR(r.total_curvature.value, 0.0, 1e-12);
  ASSERT_TRUE(r.envelope_curvature);
  EXPECT_NEAR(r.envelope_curvature->value, 2 * kPi * (1 - std::sqrt(2.0) / 2), 1e-6);
}

TEST(MilnorVerdict, DecayHypothesisSuppliesTheTail) {
  auto r = milnor_verdict(single("-(1+t)^(-3)", 50), std::nullopt, DecayHypothesis{1.0, -1.0});
  ASSERT_TRUE(r.decay_check);
  EXPECT_TRUE(r.decay_check->pass);
  ASSERT_TRUE(r.tail_used);
  EXPECT_EQ(r.tail_used->beta, 3.0);
  EXPECT_EQ(r.verdict, MilnorReport::Verdict::kFinite);
  EXPECT_NEAR(r.lambda.best(), 0.5, 1e-6);
}

TEST(FieldCsv, ReadAndErrors) {
  std::istringstream ok("t,K_1,K_2\n0,1,-1\n0.5,0.5,-1\n1,0,-2\n");
  auto f = read_field_csv(ok);
  ASSERT_EQ(f.directions().size(), 2u);
  EXPECT_EQ(f.directions()[1].label, "K_2");
  EXPECT_DOUBLE_EQ(f.directions()[0].lipschitz, 1.0);
  EXPECT_DOUBLE_EQ(f.horizon(), 1.0);

  std::istringstream bad("t,K_1\n0,1\n0.5,x\n");
  try {
    read_field_csv(bad);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  std::istringstream short_row("t,K_1\n0,1\n0.5\n");
  EXPECT_THROW(read_field_csv(short_row), ParseError);
  std::istringstream header("s,K_1\n0,1\n");
  EXPECT_THROW(read_field_csv(header), ParseError);
  std::istringstream order("t,K_1\n0,1\n0,1\n");
  EXPECT_THROW(read_field_csv(order), ValidationError);
}
