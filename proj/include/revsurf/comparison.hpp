#pragma once

// Geodesic triangles with one vertex at the pole, their embedding in a
// model surface, and the comparison of angles between a surface M and a
// model M̃ whose radial curvature is no larger.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "revsurf/geodesic.hpp"
#include "revsurf/numerics.hpp"

namespace revsurf {

/// Triangle pxy with p at the pole. Sides a = d(p,x), c = d(p,y),
/// b = d(x,y). The edges px and py are meridians; `edge` is the traced
/// minimal geodesic from x to y.
struct TriangleRealization {
  SurfacePoint p, x, y;
  double a = 0, b = 0, c = 0;
  double angle_p = 0, angle_x = 0, angle_y = 0;
  ConnectingGeodesic edge;
  GeodesicArc edge_trace;
  bool ambiguous = false;  // more than one pole angle realizes b

  double angle_sum() const { return angle_p + angle_x + angle_y; }
};

namespace detail {

// Edge samples dense enough that the strip decomposition of the interior
// integral converges at second order in the spacing.
inline int strip_count(const RadialProfile& s, double length, double angle) {
  constexpr double kScale = 1e-6;
  const double n = kScale * (length + angle) * std::pow(s.tolerances().quad_tol, -0.75);
  return std::max(16, static_cast<int>(std::ceil(n)));
}

inline TriangleRealization realize(const RadialProfile& s, SurfacePoint x, SurfacePoint y,
                                   const ConnectingGeodesic& edge) {
  TriangleRealization tri;
  tri.p = SurfacePoint(0.0, 0.0);
  tri.x = x;
  tri.y = y;
  tri.a = x.t;
  tri.c = y.t;
  tri.b = edge.length;
  tri.edge = edge;
  tri.angle_p = angular_separation(x.theta, y.theta);
  const int n = strip_count(s, tri.b, tri.angle_p);
  tri.edge_trace = trace(s, edge.arc, tri.b, tri.b / n);
  const auto& first = tri.edge_trace.samples.front();
  const auto& last = tri.edge_trace.samples.back();
  const double nu = edge.arc.nu;
  // Angles between the edge tangents and the meridians towards p, with the
  // θ-component ν/f taken from the Clairaut relation.
  tri.angle_x = std::atan2(nu / s.warping(x.t), -first.t_rate);
  tri.angle_y = std::atan2(nu / s.warping(last.t), last.t_rate);
  return tri;
}

}  // namespace detail

/// Realization of the triangle spanned by the pole and two points of the
/// surface.
inline TriangleRealization make_triangle(const RadialProfile& surface, SurfacePoint x, SurfacePoint y) {
  if (!(x.t > 0.0 && y.t > 0.0)) throw DomainViolation("triangle vertices x, y must lie off the pole");
  const double sep = angular_separation(x.theta, y.theta);
  if (!(sep > 0.0 && sep < kPi)) throw DomainViolation("the pole angle must lie in (0, π)");
  auto sols = connect(surface, x, y);
  return detail::realize(surface, x, y, sols.front());
}

/// Places x̃ = (a, 0) and finds θ* in (0, π) with d((a, 0), (c, θ*)) = b.
/// The distance increases with θ, so the root is bracketed by the
/// degenerate configurations θ = 0 and θ = π.
inline TriangleRealization embed_triangle(const RadialProfile& surface, double a, double b, double c) {
  if (!(a > 0.0 && c > 0.0)) throw DomainViolation("sides a and c must be positive");
  if (a > surface.horizon() || c > surface.horizon()) throw DomainViolation("sides a and c exceed the horizon");
  const double rt = surface.tolerances().root_tol;
  const RadialConnector rc(surface, a, c, surface.tolerances().max_turnings);
  auto dist = [&](double theta) {
    auto sols = rc.solve(theta);
    if (sols.empty()) throw NoConnectionFound("no connecting geodesic during embedding");
    return sols.front().length;
  };
  const double lower = std::abs(a - c);
  const double upper = dist(kPi);
  if (!(b > lower + rt && b < upper - rt))
    throw DomainViolation("side b = " + std::to_string(b) + " outside (" + std::to_string(lower) + ", " +
                          std::to_string(upper) + ")");
  auto g = [&](double theta) { return dist(theta) - b; };
  const double theta = refine_root(g, 0.0, kPi, lower - b, upper - b);

  // More than one sign change on a coarse sweep means the embedding is not
  // unique; the realization is still returned, flagged.
  constexpr int kProbe = 16;
  int changes = 0;
  double prev = lower - b;
  for (int k = 1; k <= kProbe; ++k) {
    const double cur = k == kProbe ? upper - b : g(kPi * k / kProbe);
    if ((cur > 0) != (prev > 0)) ++changes;
    prev = cur;
  }

  const SurfacePoint x(a, 0.0), y(c, theta);
  auto sols = rc.solve(theta);
  TriangleRealization tri = detail::realize(surface, x, y, detail::place(sols.front(), x, y));
  tri.ambiguous = changes > 1;
  return tri;
}

/// |∫∫ G dA − (angle sum − π)| over the triangle. The interior is split
/// into radial strips between consecutive edge samples (and where the edge
/// crosses a profile breakpoint); on each strip the radial integral
/// ∫_0^t G f dt is exact, and the strips are summed by the trapezoid rule
/// in θ.
inline double gauss_bonnet_audit(const RadialProfile& surface, const TriangleRealization& tri) {
  const auto& smp = tri.edge_trace.samples;
  if (smp.size() < 2) throw PreconditionViolation("gauss_bonnet_audit needs a traced edge");
  const GeodesicPath path(surface, tri.edge_trace);
  const auto breaks = surface.breakpoints();
  std::vector<std::array<double, 2>> nodes;  // (t, θ)
  nodes.push_back({smp.front().t, smp.front().theta});
  for (std::size_t k = 0; k + 1 < smp.size(); ++k) {
    const auto& u = smp[k];
    const auto& v = smp[k + 1];
    for (double bp : breaks) {
      if ((u.t - bp) * (v.t - bp) >= 0.0) continue;
      double lo = u.s, hi = v.s;
      const bool rising = v.t > u.t;
      while (hi - lo > 1e-14 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        ((path.state(mid)[0] < bp) == rising ? lo : hi) = mid;
      }
      nodes.push_back({bp, path.state(0.5 * (lo + hi))[2]});
    }
    nodes.push_back({v.t, v.theta});
  }
  double curvature = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double h0 = surface.curvature_moment(nodes[k][0]), h1 = surface.curvature_moment(nodes[k + 1][0]);
    curvature += 0.5 * (h0 + h1) * std::abs(nodes[k + 1][1] - nodes[k][1]);
  }
  return std::abs(curvature - (tri.angle_sum() - kPi));
}

struct Dominance {
  bool holds = false;
  double worst_margin = 0.0;  // min over nodes of G_M − G_M̃
  double worst_t = 0.0;
};

/// G_M(t) >= G_M̃(t) at the nodes of a uniform grid on [0, T].
inline Dominance dominance_check(const RadialProfile& m, const RadialProfile& model, int grid_n) {
  if (grid_n < 2) throw ValidationError("dominance grid needs at least 2 cells");
  const double T = std::min(m.horizon(), model.horizon());
  if (std::abs(m.horizon() - model.horizon()) > 1e-12 * std::max(1.0, T))
    throw PreconditionViolation("dominance needs a shared horizon");
  Dominance d;
  d.worst_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid_n; ++i) {
    const double t = T * i / grid_n;
    const double margin = m.curvature(t) - model.curvature(t);
    if (margin < d.worst_margin) {
      d.worst_margin = margin;
      d.worst_t = t;
    }
  }
  d.holds = d.worst_margin >= -10.0 * std::max(m.tolerances().quad_tol, model.tolerances().quad_tol);
  return d;
}

struct AlexandrovSample {
  double t = 0.0;
  double theta = 0.0;
  bool ambiguous = false;
};

/// θ(t) for the triangle shrunk towards p: x(t), y(t) at distance a·t, c·t
/// along the meridians px, py, and θ(t) the pole angle of its embedding in
/// M̃. The samples are returned as computed; monotonicity is not enforced.
inline std::vector<AlexandrovSample> alexandrov_profile(const RadialProfile& m, const RadialProfile& model,
                                                        const TriangleRealization& tri, int n) {
  if (n < 1) throw ValidationError("alexandrov_profile needs at least one sample");
  if (!dominance_check(m, model, m.tolerances().grid_n).holds)
    throw PreconditionViolation("radial curvature of M is not bounded below by that of the model");
  if (!(tri.angle_p < kPi)) throw PreconditionViolation("pole angle must be below π");
  std::vector<AlexandrovSample> out(static_cast<std::size_t>(n));
  parallel_for(out.size(), [&](std::size_t k) {
    const double t = static_cast<double>(k + 1) / n;
    const SurfacePoint xt(tri.a * t, tri.x.theta), yt(tri.c * t, tri.y.theta);
    const double bt = distance(m, xt, yt);
    const TriangleRealization e = embed_triangle(model, tri.a * t, bt, tri.c * t);
    out[k] = {t, e.angle_p, e.ambiguous};
  });
  return out;
}

struct ComparisonReport {
  std::array<double, 3> side_residuals{};  // |a − ã|, |b − b̃|, |c − c̃|
  std::array<double, 3> slacks{};          // ∠_M − ∠_M̃ at p, x, y
  bool pass = false;
  bool in_sector = false;  // embedded pole angle below δ₀
  TriangleRealization model;
};

/// Embeds a triangle of M into M̃ with equal sides and compares angles.
inline ComparisonReport tct_verify(const RadialProfile& m, const RadialProfile& model,
                                   const TriangleRealization& tri, double delta0, double angle_tol = 1e-6) {
  if (!(delta0 > 0.0 && delta0 <= kPi)) throw ValidationError("δ₀ must lie in (0, π]");
  if (!(tri.angle_p < delta0)) throw PreconditionViolation("pole angle is not below δ₀");
  if (!dominance_check(m, model, m.tolerances().grid_n).holds)
    throw PreconditionViolation("radial curvature of M is not bounded below by that of the model");
  ComparisonReport r;
  r.model = embed_triangle(model, tri.a, tri.b, tri.c);
  const double b_model = distance(model, r.model.x, r.model.y);
  r.side_residuals = {std::abs(tri.a - r.model.a), std::abs(tri.b - b_model), std::abs(tri.c - r.model.c)};
  r.slacks = {tri.angle_p - r.model.angle_p, tri.angle_x - r.model.angle_x, tri.angle_y - r.model.angle_y};
  r.pass = std::all_of(r.slacks.begin(), r.slacks.end(), [&](double s) { return s >= -angle_tol; });
  r.in_sector = r.model.angle_p < delta0;
  return r;
}

/// tct_verify over a batch of triangles, in parallel.
inline std::vector<ComparisonReport> tct_verify(const RadialProfile& m, const RadialProfile& model,
                                                const std::vector<TriangleRealization>& tris, double delta0,
                                                double angle_tol = 1e-6) {
  std::vector<ComparisonReport> out(tris.size());
  parallel_for(tris.size(), [&](std::size_t i) { out[i] = tct_verify(m, model, tris[i], delta0, angle_tol); });
  return out;
}

inline void write_csv(std::ostream& os, const std::vector<ComparisonReport>& reports) {
  const auto old = os.precision(12);
  os << "side_residual_a,side_residual_b,side_residual_c,slack_p,slack_x,slack_y,pass\n";
  for (const auto& r : reports)
    os << r.side_residuals[0] << ',' << r.side_residuals[1] << ',' << r.side_residuals[2] << ',' << r.slacks[0]
       << ',' << r.slacks[1] << ',' << r.slacks[2] << ',' << (r.pass ? "true" : "false") << '\n';
  os.precision(old);
}

}  // namespace revsurf
