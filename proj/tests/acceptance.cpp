// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "revsurf/revsurf.hpp"
#include "wavefront_oracle.hpp"

using namespace revsurf;

namespace {

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("criterion %2d %-28s %s  %s\n", id, name, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double euclid_dist(double a, double c, double dth) { return std::sqrt(a * a + c * c - 2 * a * c * std::cos(dth)); }
double hyper_dist(double a, double c, double dth) {
  return std::acosh(std::cosh(a) * std::cosh(c) - std::sinh(a) * std::sinh(c) * std::cos(dth));
}
double euclid_angle(double u, double v, double opp) { return std::acos((u * u + v * v - opp * opp) / (2 * u * v)); }
double hyper_angle(double u, double v, double opp) {
  return std::acos((std::cosh(u) * std::cosh(v) - std::cosh(opp)) / (std::sinh(u) * std::sinh(v)));
}

double bump_f(double t) { return t <= kPi / 4 ? std::sin(t) : std::sin(kPi / 4) + std::cos(kPi / 4) * (t - kPi / 4); }

RadialProfile flat(double T = 8, Tolerances tol = {}) { return from_warping(RadialFunction::parse("t"), T, tol); }
RadialProfile hyperbolic(double T = 8, Tolerances tol = {}, std::optional<TailBound> tail = std::nullopt) {
  return from_warping(RadialFunction::parse("sinh(t)"), T, tol, tail);
}
RadialProfile bump(double T = 8, Tolerances tol = {}) {
  return from_curvature(RadialFunction::parse("if(t <= pi/4, 1, 0)"), T, tol);
}

// Law-of-cosines suite: random pairs and random admissible triangles.
struct OracleSuite {
  double dist_err = 0, angle_err = 0;
};

OracleSuite oracle_suite(const RadialProfile& s, std::function<double(double, double, double)> dist,
                         std::function<double(double, double, double)> angle, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> r(0.2, 2.5), th(0.0, kPi), u(0.05, 0.95);
  OracleSuite out;
  for (int i = 0; i < 100; ++i) {
    const double a = r(rng), c = r(rng), d = th(rng);
    const double got = distance(s, {a, 0.3}, {c, 0.3 + d});
    out.dist_err = std::max(out.dist_err, std::abs(got - dist(a, c, d)));
  }
  for (int i = 0; i < 100; ++i) {
    const double a = r(rng), c = r(rng);
    const double lo = std::abs(a - c), hi = a + c;
    const double b = lo + u(rng) * (hi - lo);
    const auto tri = embed_triangle(s, a, b, c);
    out.angle_err = std::max({out.angle_err, std::abs(tri.angle_p - angle(a, c, b)),
                              std::abs(tri.angle_x - angle(a, b, c)), std::abs(tri.angle_y - angle(b, c, a))});
  }
  return out;
}

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = flat();
  const auto r = oracle_suite(s, euclid_dist, euclid_angle, 101);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool pass = r.dist_err <= 1e-7 && r.angle_err <= 1e-7 && secs < 30.0;
  report(1, "flat oracle suite", pass,
         "max |dist err| " + fmt("%.2e", r.dist_err) + ", max |angle err| " + fmt("%.2e", r.angle_err) + ", " +
             fmt("%.1f s", secs) + " (tol 1e-7, < 30 s)");
}

void criterion_2() {
  const auto s = hyperbolic();
  const auto r = oracle_suite(s, hyper_dist, hyper_angle, 202);
  const double d = distance(s, {1, 0}, {1, kPi / 2});
  const double d_err = std::abs(d - hyper_dist(1, 1, kPi / 2));
  const double theta = embed_triangle(s, 1, 1, 1).angle_p;
  const double th_err = std::abs(theta - hyper_angle(1, 1, 1));
  // The quoted approximations 1.5133 and 0.919539 are shown, not gated.
  const bool pass = r.dist_err <= 1e-6 && r.angle_err <= 1e-6 && d_err <= 1e-6 && th_err <= 1e-6;
  report(2, "hyperbolic oracle suite", pass,
         "max |dist err| " + fmt("%.2e", r.dist_err) + ", max |angle err| " + fmt("%.2e", r.angle_err) +
             ", d((1,0),(1,pi/2)) = " + fmt("%.6f", d) + " (|err| " + fmt("%.1e", d_err) + "), theta(1,1,1) = " + fmt("%.7f", theta) +
             " vs law of cosines " + fmt("%.7f", hyper_angle(1, 1, 1)) + " (quoted 0.919539 differs by " +
             fmt("%.1e", std::abs(theta - 0.919539)) + ")");
}

void criterion_3() {
  std::mt19937 rng(303);
  std::uniform_real_distribution<double> r(0.5, 3.0), psi(0.01, kPi - 0.01), th(0, kTwoPi);
  double worst = 0;
  std::size_t launches = 0;
  const std::vector<RadialProfile> profiles{flat(60), hyperbolic(60), bump(60)};
  for (const auto& s : profiles)
    for (int i = 0; i < 50; ++i) {
      const auto arc = trace(s, launch(s, {r(rng), th(rng)}, psi(rng)), 50.0);
      for (const auto& x : arc.samples) worst = std::max(worst, clairaut_residual(s, arc, x));
      ++launches;
    }
  report(3, "Clairaut conservation", worst <= 1e-8,
         std::to_string(launches) + " launches, length 50, max residual " + fmt("%.2e", worst) + " (tol 1e-8)");
}

void criterion_4() {
  std::mt19937 rng(404);
  std::uniform_real_distribution<double> r(0.2, 0.5), ang(0.1, 1.0);
  double worst = 0, worst_ratio = 0;
  for (int k = 0; k < 3; ++k) {
    auto make = [&](Tolerances tol) { return k == 0 ? flat(8, tol) : k == 1 ? hyperbolic(8, tol) : bump(8, tol); };
    Tolerances coarse, fine;
    fine.quad_tol = coarse.quad_tol / 2;
    const auto sc = make(coarse), sf = make(fine);
    for (int i = 0; i < 10; ++i) {
      const SurfacePoint x(r(rng), 0.2), y(r(rng), 0.2 + ang(rng));
      const auto tc = make_triangle(sc, x, y);
      const double rc = gauss_bonnet_audit(sc, tc);
      worst = std::max(worst, rc);
      // The flat residual is rounding only; halving is checked where the
      // interior integral is non-trivial.
      if (k > 0) {
        const double rf = gauss_bonnet_audit(sf, make_triangle(sf, x, y));
        worst_ratio = std::max(worst_ratio, rf / rc);
      }
    }
  }
  report(4, "Gauss-Bonnet audit", worst <= 1e-5 && worst_ratio <= 0.5,
         "30 triangles of diameter <= 1, max residual " + fmt("%.2e", worst) +
             ", worst residual ratio at quad_tol/2 " + fmt("%.3f", worst_ratio) + " (need <= 0.5)");
}

void criterion_5() {
  const auto f = flat(), h = hyperbolic();
  std::mt19937 rng(505);
  std::uniform_real_distribution<double> r(0.2, 2.0), ang(0.05, 2.45);
  std::vector<TriangleRealization> tris;
  for (int i = 0; i < 50; ++i) tris.push_back(make_triangle(f, {r(rng), 0.3}, {r(rng), 0.3 + ang(rng)}));
  double min_slack = INFINITY;
  for (const auto& rep : tct_verify(f, h, tris, 2.5))
    for (double s : rep.slacks) min_slack = std::min(min_slack, s);

  const auto eq = tct_verify(f, h, make_triangle(f, {1, 0}, {1, kPi / 3}), kPi);
  const double oracle = kPi / 3 - hyper_angle(1, 1, 1);
  const double quoted = kPi / 3 - 0.919539;

  double self_worst = 0;
  std::vector<TriangleRealization> htris;
  for (int i = 0; i < 20; ++i) htris.push_back(make_triangle(h, {r(rng), 0.3}, {r(rng), 0.3 + ang(rng)}));
  for (const auto& rep : tct_verify(h, h, htris, 2.5))
    for (double s : rep.slacks) self_worst = std::max(self_worst, std::abs(s));

  const bool pass = min_slack >= -1e-6 && std::abs(eq.slacks[0] - quoted) <= 1e-4 && self_worst <= 1e-6;
  report(5, "Toponogov comparison", pass,
         "min slack " + fmt("%.2e", min_slack) + " (>= -1e-6), self-comparison max |slack| " +
             fmt("%.2e", self_worst) + ", equilateral slack_p " + fmt("%.7f", eq.slacks[0]) +
             ": law-of-cosines value " + fmt("%.7f", oracle) + " (diff " + fmt("%.1e", std::abs(eq.slacks[0] - oracle)) +
             "), quoted pi/3 - 0.919539 = " + fmt("%.7f", quoted) + " (diff " +
             fmt("%.1e", std::abs(eq.slacks[0] - quoted)) + ", tol 1e-4)");
}

void criterion_6() {
  const auto f = flat(), h = hyperbolic();
  std::mt19937 rng(606);
  std::uniform_real_distribution<double> r(0.2, 2.0), ang(0.05, 2.45);
  double worst_rise = -INFINITY;
  for (int i = 0; i < 20; ++i) {
    const auto tri = make_triangle(f, {r(rng), 0.3}, {r(rng), 0.3 + ang(rng)});
    const auto prof = alexandrov_profile(f, h, tri, 32);
    for (std::size_t k = 1; k < prof.size(); ++k) worst_rise = std::max(worst_rise, prof[k].theta - prof[k - 1].theta);
  }
  report(6, "Alexandrov convexity", worst_rise <= 1e-6,
         "20 triangles x 32 samples, largest increase of theta(t) " + fmt("%.2e", worst_rise) + " (slack 1e-6)");
}

void criterion_7() {
  const auto h = hyperbolic();
  const auto hv = sector_scan(h, {1, 2, 3}, {{1.0, 2.0}, {0.25, 0.5, 0.75}}, 6.0, 8);
  bool hyp_ok = true;
  for (const auto& v : hv) hyp_ok = hyp_ok && !v.has_cut_pair;

  const auto b = bump(20);
  const auto bv = sector_scan(b, {1.0, 2.0, 3.0}, {{1.5, 2.0, 2.5}, {0.2, 0.5, 0.8}}, 10.0, 16);
  bool bump_ok = true;
  for (const auto& v : bv) bump_ok = bump_ok && !v.has_cut_pair && v.pairs_checked > 0;
  const auto locus = cut_locus(b, {2, 0}, 16, 10.0);
  double theta_dev = 0;
  std::size_t cuts = 0;
  for (const auto& rec : locus.records)
    if (rec.cut_point) {
      theta_dev = std::max(theta_dev, std::abs(rec.cut_point->theta - kPi));
      ++cuts;
    }

  // Dijkstra wavefront: cut points within 2 cells of the ridge, distances
  // within the calibrated grid error.
  oracle::Wavefront plane([](double t) { return t; }, 8, 400, 400, 2.0);
  double grid_err = 0;
  for (int i = 20; i <= 400; i += 7)
    for (int j = 0; j < 400; j += 9) {
      const double t = i * plane.dt(), th = j * plane.dtheta();
      const double exact = euclid_dist(2, t, th);
      grid_err = std::max(grid_err, std::abs(plane.distance_at(i, j) - exact) / std::max(exact, 1.0));
    }
  oracle::Wavefront wave(bump_f, 8, 400, 400, 2.0);
  int worst_cells = 0;
  double worst_gap = 0;
  bool dist_ok = true;
  for (const auto& rec : locus.records) {
    if (!rec.cut_point || rec.cut_point->t > 8) continue;
    const auto p = *rec.cut_point;
    worst_cells = std::max(worst_cells, wave.cells_to_ridge(p.t, p.theta));
    const double d = wave.distance_at(wave.ring(p.t), wave.column(p.theta));
    worst_gap = std::max(worst_gap, std::abs(d - *rec.cut_s));
    dist_ok = dist_ok && std::abs(d - *rec.cut_s) <= grid_err * *rec.cut_s + 2 * wave.dt();
  }
  const bool pass = hyp_ok && bump_ok && cuts > 0 && theta_dev <= 1e-3 && worst_cells <= 2 && dist_ok;
  report(7, "sector scan", pass,
         std::string("hyperbolic pairs: ") + (hyp_ok ? "none" : "found") + ", bump pairs for delta <= 3: " +
             (bump_ok ? "none" : "found") + ", " + std::to_string(cuts) + " bump cut points with max |theta - pi| " +
             fmt("%.1e", theta_dev) + ", wavefront: max " + std::to_string(worst_cells) +
             " cells to ridge, max |d - cut_s| " + fmt("%.3f", worst_gap));
}

void criterion_8() {
  auto cubic_field = CurvatureField::from_expressions({"-(1+t)^(-3)"}, 50);
  const auto gstar = clamp_nonpositive(lower_envelope(cubic_field));
  const auto lam = lambda_integral(gstar, TailBound{1.0, 3.0});
  const bool lam_ok = lam.limit && std::abs(*lam.limit - 0.5) <= 1e-6;
  bool audit_ok = true;
  try {
    const auto a = gronwall_audit(gstar);
    audit_ok = a.monotone && a.t.back() == 50.0;
  } catch (const AuditFailure&) {
    audit_ok = false;
  }
  const auto pass_check = polynomial_decay_check([](double t) { return -1 / (t * t * t); }, 1.0, -1.0, 100);
  const auto fail_check = polynomial_decay_check([](double) { return -1.0; }, 1.0, -1.0, 100);
  const auto finite = milnor_verdict(cubic_field, TailBound{1.0, 3.0});
  const auto infinite = milnor_verdict(CurvatureField::from_expressions({"-1"}, 10), TailBound{1.0, 0.0});
  const auto bumpv = milnor_verdict(CurvatureField::from_expressions({"if(t <= pi/4, 1, 0)"}, 10));
  const double bump_c = 2 * kPi * (1 - std::sqrt(2.0) / 2);
  const bool verdicts = finite.verdict == MilnorReport::Verdict::kFinite &&
                        finite.total_curvature.value > -2 * kPi * (std::exp(0.5) - 1) &&
                        infinite.verdict == MilnorReport::Verdict::kInfinite &&
                        bumpv.verdict == MilnorReport::Verdict::kFinite && bumpv.lambda.best() == 0.0 &&
                        bumpv.envelope_curvature && std::abs(bumpv.envelope_curvature->value - bump_c) <= 1e-6;
  const bool pass = lam_ok && audit_ok && pass_check.pass && !fail_check.pass && verdicts;
  report(8, "Milnor pipeline", pass,
         "Lambda(inf) = " + fmt("%.9f", lam.limit.value_or(NAN)) + ", Gronwall to 50: " + (audit_ok ? "ok" : "failed") +
             ", decay -1/t^3: " + (pass_check.pass ? "pass" : "fail") + ", decay -1: " +
             (fail_check.pass ? "pass" : "fail") + ", verdicts " + to_string(finite.verdict) + "/" +
             to_string(infinite.verdict) + "/" + to_string(bumpv.verdict));
}

void criterion_9() {
  const auto cf = total_curvature(flat());
  const auto cb = total_curvature(bump());
  const auto ch = total_curvature(hyperbolic(8, {}, TailBound{1.0, 0.0}));
  const double bump_c = 2 * kPi * (1 - std::sqrt(2.0) / 2);
  const bool pass = cf.value == 0.0 && cf.verdict == TotalCurvature::Verdict::kFinite &&
                    std::abs(cb.value - bump_c) <= 1e-6 && cb.verdict == TotalCurvature::Verdict::kFinite &&
                    ch.verdict == TotalCurvature::Verdict::kNegativeInfinity;
  report(9, "total curvature", pass,
         "flat " + fmt("%.3g", cf.value) + ", bump " + fmt("%.9f", cb.value) + " (|err| " +
             fmt("%.1e", std::abs(cb.value - bump_c)) + "), hyperbolic " + to_string(ch.verdict));
}

void criterion_10() {
  double worst_lin = 0;
  for (const auto& s : {hyperbolic(), bump()}) {
    const double full = sector_curvature_mass(s, kTwoPi, 2.0);
    for (double d : {0.3, 1.0, 2.0, kPi, 5.0})
      worst_lin = std::max(worst_lin, std::abs(sector_curvature_mass(s, d, 2.0) - d / kTwoPi * full));
  }
  const double half = sector_curvature_mass(hyperbolic(), kPi, 1.0);
  const double err = std::abs(half - kPi * (std::cosh(1.0) - 1));
  report(10, "sector curvature mass", worst_lin <= 1e-9 && err <= 1e-6,
         "linearity max |err| " + fmt("%.1e", worst_lin) + ", hyperbolic half disc " + fmt("%.9f", half) +
             " (|err| " + fmt("%.1e", err) + ")");
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{criterion_1, criterion_2, criterion_3, criterion_4,
                                                    criterion_5, criterion_6, criterion_7, criterion_8,
                                                    criterion_9, criterion_10};
  for (const auto& c : criteria) {
    try {
      c();
    } catch (const std::exception& e) {
      std::printf("criterion threw: %s\n", e.what());
      ++failures;
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures;
}
