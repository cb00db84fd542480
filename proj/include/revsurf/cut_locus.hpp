#pragma once

// Conjugate points, cut points and sector scans on a model surface.
//
// A geodesic γ from x is minimal up to its cut time, the last s with
// d(x, γ(s)) = s. On a surface the cut point is either the first conjugate
// point (zero of the Jacobi field J'' + G(t(s)) J = 0) or a point reached by
// two minimal geodesics.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "revsurf/geodesic.hpp"
#include "revsurf/numerics.hpp"

namespace revsurf {

namespace detail {

// First s in (0, s_max] where component `j` of the state turns non-positive,
// integrating x' = rhs(x, s) with dense output.
template <std::size_t N, class Rhs>
std::optional<double> first_sign_change(Rhs rhs, std::array<double, N> x0, double s_max, std::size_t j,
                                        double tol) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, N>;
  auto dense = ode::make_dense_output(tol, tol, ode::runge_kutta_dopri5<State>());
  dense.initialize(x0, 0.0, std::min(1e-2, s_max / 16.0));
  State y;
  std::size_t steps = 0;
  while (dense.current_time() < s_max) {
    if (++steps > 50'000'000) throw OdeFailure("Jacobi integration exceeded the step budget");
    const auto [s0, s1raw] = dense.do_step(rhs);
    const double s1 = std::min(s1raw, s_max);
    dense.calc_state(s1, y);
    if (!std::isfinite(y[j])) throw OdeFailure("Jacobi integration diverged");
    if (y[j] > 0.0) continue;
    double lo = s0, hi = s1;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      dense.calc_state(mid, y);
      (y[j] > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
  return std::nullopt;
}

}  // namespace detail

/// First zero s* in (0, s_max] of J'' + K(s) J = 0, J(0) = 0, J'(0) = 1.
inline std::optional<double> conjugate_time(const std::function<double(double)>& K, double s_max,
                                            double ode_tol = 1e-12) {
  if (!(s_max > 0.0)) throw ValidationError("conjugate search length must be positive");
  auto rhs = [&](const std::array<double, 2>& x, std::array<double, 2>& dx, double s) {
    dx[0] = x[1];
    dx[1] = -K(s) * x[0];
  };
  return detail::first_sign_change<2>(rhs, {0.0, 1.0}, s_max, 0, ode_tol);
}

/// First conjugate point along a traced arc, with J integrated jointly with
/// the geodesic (K(s) = G(t(s)) since the curvature depends on t only).
inline std::optional<double> conjugate_time(const RadialProfile& surface, const GeodesicArc& arc) {
  if (arc.samples.empty()) throw ValidationError("conjugate_time needs a traced arc");
  const double s_max = arc.traced_length();
  if (!(s_max > 0.0)) return std::nullopt;
  const double tol = surface.tolerances().ode_tol;
  if (arc.nu == 0.0) {
    const double dir = arc.psi == 0.0 ? 1.0 : -1.0;
    const double t0 = arc.start.t;
    return conjugate_time([&](double s) { return surface.curvature(std::abs(t0 + dir * s)); }, s_max, tol);
  }
  const detail::GeodesicRhs geo{&surface, arc.nu, static_cast<double>(arc.orientation)};
  auto rhs = [&](const std::array<double, 5>& x, std::array<double, 5>& dx, double s) {
    const detail::GeoState g{x[0], x[1], x[2]};
    detail::GeoState dg;
    geo(g, dg, s);
    dx[0] = dg[0];
    dx[1] = dg[1];
    dx[2] = dg[2];
    dx[3] = x[4];
    dx[4] = -surface.curvature(x[0]) * x[3];
  };
  std::array<double, 5> x0{arc.start.t, std::cos(arc.psi), arc.start.theta, 0.0, 1.0};
  return detail::first_sign_change<5>(rhs, x0, s_max, 3, tol);
}

enum class CutCause { kConjugate, kNonUnique, kNoneWithinHorizon };

inline const char* to_string(CutCause c) {
  switch (c) {
    case CutCause::kConjugate: return "conjugate";
    case CutCause::kNonUnique: return "non-unique";
    case CutCause::kNoneWithinHorizon: return "none-within-horizon";
  }
  return "?";
}

struct CutTime {
  std::optional<double> cut_s;
  std::optional<double> conjugate_s;
  std::optional<SurfacePoint> cut_point;
  CutCause cause = CutCause::kNoneWithinHorizon;
  double searched_to = 0.0;  // arclength actually examined
};

/// Slack in the minimality predicate d(base, γ(s)) >= s − slack.
inline double minimality_slack(const RadialProfile& surface, double s) {
  return 10.0 * surface.tolerances().root_tol * std::max(1.0, s);
}

/// Cut time of the geodesic leaving `base` at angle psi: coarse scan of the
/// minimality predicate, bisection to root_tol, then the minimum with the
/// first conjugate time.
inline CutTime cut_time(const RadialProfile& surface, SurfacePoint base, double psi, double s_max,
                        int orientation = 1, int coarse_samples = 32) {
  if (!(base.t > 0.0)) throw ValidationError("cut_time needs a base point off the pole");
  GeodesicArc arc = trace(surface, launch(surface, base, psi, orientation), s_max);
  const double s_end = arc.traced_length();
  CutTime out;
  out.searched_to = s_end;
  out.conjugate_s = conjugate_time(surface, arc);
  const GeodesicPath path(surface, arc);
  auto minimal = [&](double s) {
    SurfacePoint q = path.point(s);
    q.t = std::min(q.t, surface.horizon());  // the exit sample may overshoot by rounding
    return distance(surface, base, q) >= s - minimality_slack(surface, s);
  };

  std::optional<double> lost;
  double lo = 0.0;
  for (int k = 1; k <= coarse_samples; ++k) {
    const double s = s_end * k / coarse_samples;
    if (!minimal(s)) {
      double hi = s;
      const double eps = surface.tolerances().root_tol;
      while (hi - lo > eps * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        (minimal(mid) ? lo : hi) = mid;
      }
      lost = 0.5 * (lo + hi);
      break;
    }
    lo = s;
  }

  if (out.conjugate_s && (!lost || *out.conjugate_s <= *lost)) {
    out.cut_s = out.conjugate_s;
    out.cause = CutCause::kConjugate;
  } else if (lost) {
    out.cut_s = lost;
    out.cause = CutCause::kNonUnique;
  }
  if (out.cut_s) out.cut_point = path.point(*out.cut_s);
  return out;
}

struct CutRecord {
  double psi = 0.0;
  std::optional<double> conjugate_s;
  std::optional<double> cut_s;
  std::optional<SurfacePoint> cut_point;
  CutCause cause = CutCause::kNoneWithinHorizon;
};

struct CutReport {
  SurfacePoint base;
  std::vector<CutRecord> records;  // ψ in (0, π], θ-increasing side
  std::optional<std::size_t> tip;  // record with the cut point closest to the pole

  /// Cut points on both sides of the base meridian (mirror images included).
  std::vector<SurfacePoint> cut_points() const {
    std::vector<SurfacePoint> out;
    for (const auto& r : records) {
      if (!r.cut_point) continue;
      out.push_back(*r.cut_point);
      out.emplace_back(r.cut_point->t, 2.0 * base.theta - r.cut_point->theta);
    }
    return out;
  }
};

/// Cut times for n_dirs launch angles ψ_k = kπ / n_dirs, k = 1..n_dirs.
/// Directions with θ decreasing are the mirror images across the base
/// meridian.
inline CutReport cut_locus(const RadialProfile& surface, SurfacePoint base, int n_dirs, double s_max) {
  if (n_dirs < 8) throw ValidationError("cut_locus needs at least 8 directions");
  if (!(base.t > 0.0)) throw ValidationError("cut_locus needs a base point off the pole");
  CutReport rep;
  rep.base = base;
  rep.records.resize(static_cast<std::size_t>(n_dirs));
  parallel_for(rep.records.size(), [&](std::size_t k) {
    const double psi = kPi * static_cast<double>(k + 1) / n_dirs;
    const CutTime c = cut_time(surface, base, psi, s_max);
    rep.records[k] = {psi, c.conjugate_s, c.cut_s, c.cut_point, c.cause};
  });
  for (std::size_t k = 0; k < rep.records.size(); ++k) {
    const auto& r = rep.records[k];
    if (r.cut_point && (!rep.tip || r.cut_point->t < rep.records[*rep.tip].cut_point->t)) rep.tip = k;
  }
  return rep;
}

inline void write_csv(std::ostream& os, const CutReport& rep) {
  const auto old = os.precision(12);
  os << "psi,conjugate_s,cut_s,cut_t,cut_theta,cause\n";
  auto opt = [&](const std::optional<double>& v) {
    if (v) os << *v;
  };
  for (const auto& r : rep.records) {
    os << r.psi << ',';
    opt(r.conjugate_s);
    os << ',';
    opt(r.cut_s);
    os << ',';
    if (r.cut_point) os << r.cut_point->t;
    os << ',';
    if (r.cut_point) os << r.cut_point->theta;
    os << ',' << to_string(r.cause) << '\n';
  }
  os.precision(old);
}

/// Sample points for a sector scan: (r, f·δ) for every radius r and angle
/// fraction f in (0, 1).
struct SectorSamples {
  std::vector<double> radii;
  std::vector<double> angle_fractions;
};

struct SectorVerdict {
  double delta = 0.0;
  bool has_cut_pair = false;
  std::optional<std::pair<SurfacePoint, SurfacePoint>> witness;
  std::optional<double> delta0_estimate;
  // Closest approach to the pole of the segment joining a conjugate-pair
  // witness; absent for other witnesses.
  std::optional<double> witness_clearance;
  bool incomplete = false;  // some direction was cut short by the horizon
  std::size_t pairs_checked = 0;
};

inline bool in_open_sector(double theta, double delta) {
  const double w = wrap_angle(theta);
  return w > 0.0 && w < delta;
}

/// For each δ, looks for a sampled point of V(δ) whose cut locus meets
/// V(δ). Cut loci are computed once per radius and rotated, since the
/// metric is rotationally symmetric. "No pair" means none at this sampling.
inline std::vector<SectorVerdict> sector_scan(const RadialProfile& surface, const std::vector<double>& deltas,
                                              const SectorSamples& samples, double s_max, int n_dirs = 32) {
  for (double d : deltas)
    if (!(d > 0.0 && d < kPi)) throw ValidationError("sector angles must lie in (0, π)");
  for (double r : samples.radii)
    if (!(r > 0.0 && r <= surface.horizon())) throw ValidationError("sample radii must lie in (0, tmax]");
  for (double f : samples.angle_fractions)
    if (!(f > 0.0 && f < 1.0)) throw ValidationError("angle fractions must lie in (0, 1)");

  std::vector<CutReport> loci;
  loci.reserve(samples.radii.size());
  for (double r : samples.radii) loci.push_back(cut_locus(surface, SurfacePoint(r, 0.0), n_dirs, s_max));
  bool incomplete = false;
  for (const auto& rep : loci)
    for (const auto& rec : rep.records)
      if (!rec.cut_s && !rec.conjugate_s) incomplete = true;

  std::vector<SectorVerdict> out;
  for (double delta : deltas) {
    SectorVerdict v;
    v.delta = delta;
    v.incomplete = incomplete;
    for (std::size_t i = 0; i < loci.size() && !v.has_cut_pair; ++i) {
      const auto& rep = loci[i];
      for (double frac : samples.angle_fractions) {
        const double phi = frac * delta;
        const SurfacePoint p(rep.base.t, phi);
        for (const auto& rec : rep.records) {
          if (!rec.cut_point) continue;
          for (int side : {1, -1}) {
            ++v.pairs_checked;
            const double theta = phi + side * rec.cut_point->theta;
            if (!in_open_sector(theta, delta)) continue;
            v.has_cut_pair = true;
            v.witness = std::make_pair(p, SurfacePoint(rec.cut_point->t, theta));
            if (rec.cause == CutCause::kConjugate) {
              const GeodesicArc arc = trace(surface, launch(surface, p, rec.psi, side), *rec.cut_s);
              double m = arc.start.t;
              for (const auto& x : arc.samples) m = std::min(m, x.t);
              v.witness_clearance = m;
            }
            break;
          }
          if (v.has_cut_pair) break;
        }
        if (v.has_cut_pair) break;
      }
    }
    out.push_back(v);
  }
  // δ₀ estimate: largest scanned δ below which no scanned δ has a pair.
  std::vector<std::size_t> order(out.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return out[a].delta < out[b].delta; });
  std::optional<double> d0;
  for (auto i : order) {
    if (out[i].has_cut_pair) break;
    d0 = out[i].delta;
  }
  for (auto& v : out) v.delta0_estimate = d0;
  return out;
}

inline void write_summary(std::ostream& os, const std::vector<SectorVerdict>& verdicts) {
  const auto old = os.precision(12);
  for (const auto& v : verdicts) {
    os << "delta=" << v.delta << " cut_pair=" << (v.has_cut_pair ? "found" : "none-at-resolution")
       << " checked=" << v.pairs_checked;
    if (v.witness)
      os << " witness=(" << v.witness->first.t << ',' << v.witness->first.theta << ")->(" << v.witness->second.t
         << ',' << v.witness->second.theta << ')';
    if (v.witness_clearance) os << " clearance=" << *v.witness_clearance;
    if (v.incomplete) os << " incomplete";
    os << '\n';
  }
  if (!verdicts.empty()) {
    os << "delta0_estimate=";
    if (verdicts.front().delta0_estimate)
      os << *verdicts.front().delta0_estimate;
    else
      os << "none";
    os << '\n';
  }
  os.precision(old);
}

}  // namespace revsurf
