#pragma once

// Geodesics on a model surface of revolution.
//
// Unit-speed geodesics σ(s) = (t(s), θ(s)) conserve the Clairaut constant
// ν = f(t)^2 |θ'| = f(t) sin∠(σ', ∂/∂t). Between turning points (f(t) = ν)
// the angular advance is ∫ ν / (f √(f² − ν²)) dt, which is what the shooting
// solver in RadialConnector matches against the target angle.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "revsurf/error.hpp"
#include "revsurf/model_surface.hpp"
#include "revsurf/numerics.hpp"

namespace revsurf {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into [0, 2π).
inline double wrap_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Angular separation in [0, π].
inline double angular_separation(double a, double b) {
  const double d = wrap_angle(b - a);
  return std::min(d, kTwoPi - d);
}

/// Geodesic polar coordinates about the pole; the pole itself has θ = 0.
struct SurfacePoint {
  double t = 0.0;
  double theta = 0.0;

  SurfacePoint() = default;
  SurfacePoint(double t_, double theta_) : t(t_), theta(t_ == 0.0 ? 0.0 : wrap_angle(theta_)) {
    if (!(t_ >= 0.0) || !std::isfinite(t_)) throw ValidationError("radial coordinate must be >= 0");
  }
};

struct ArcSample {
  double s;
  double t;
  double theta;  // unwrapped
  int branch;    // sign of t'
  double t_rate;  // t'(s)
};

struct GeodesicArc {
  SurfacePoint start;
  double psi = 0.0;      // angle to the outward meridian, in [0, π]
  int orientation = 1;   // +1 when θ increases along the arc
  double nu = 0.0;       // Clairaut constant
  std::vector<ArcSample> samples;
  std::vector<double> turnings;
  bool horizon_exit = false;

  double traced_length() const { return samples.empty() ? 0.0 : samples.back().s; }
};

/// Launch data for the geodesic leaving p0 at angle psi to ∂/∂t.
inline GeodesicArc launch(const RadialProfile& surface, SurfacePoint p0, double psi, int orientation = 1) {
  if (!(psi >= 0.0 && psi <= kPi)) throw ValidationError("launch angle must lie in [0, π]");
  if (p0.t > surface.horizon()) throw ValidationError("launch point lies beyond the horizon");
  if (p0.t == 0.0 && psi != 0.0)
    throw PoleLaunchWithSpin("geodesics from the pole are meridians; use psi = 0");
  GeodesicArc arc;
  arc.start = p0;
  arc.psi = psi;
  arc.orientation = orientation >= 0 ? 1 : -1;
  arc.nu = (psi == 0.0 || psi == kPi) ? 0.0 : surface.warping(p0.t) * std::sin(psi);
  return arc;
}

/// |f(t) sin∠(σ', ∂/∂t) − ν| evaluated from a sample's state.
inline double clairaut_residual(const RadialProfile& surface, const GeodesicArc& arc, const ArcSample& x) {
  if (arc.nu == 0.0) return 0.0;
  const double f = surface.warping(x.t);
  const double angular = arc.nu / f;  // f |θ'|
  const double speed = std::hypot(x.t_rate, angular);
  return std::abs(f * angular / speed - arc.nu);
}

namespace detail {

using GeoState = std::array<double, 3>;  // t, t', θ

struct GeodesicRhs {
  const RadialProfile* surface;
  double nu;
  double sign;
  void operator()(const GeoState& x, GeoState& dx, double /*s*/) const {
    const WarpingValue w = surface->warping_at(x[0]);
    const double inv = 1.0 / w.f;
    dx[0] = x[1];
    dx[1] = nu * nu * w.fp * inv * inv * inv;
    dx[2] = sign * nu * inv * inv;
  }
};

inline int initial_branch(const RadialProfile& surface, double t0, double p0, double nu) {
  if (std::abs(p0) > 1e-14) return p0 > 0 ? 1 : -1;
  const double fp = surface.warping_slope(t0);
  return (nu > 0.0 && fp < 0.0) ? -1 : 1;
}

// Closed-form meridian motion, continuing through the pole onto θ + π.
inline GeoState meridian_state(const GeodesicArc& arc, double s) {
  const double dir = arc.psi == 0.0 ? 1.0 : -1.0;
  const double t = arc.start.t + dir * s;
  if (t >= 0.0) return {t, dir, arc.start.theta};
  return {-t, 1.0, arc.start.theta + kPi};
}

}  // namespace detail

/// Integrates the launched geodesic up to arclength s_max. Samples are
/// emitted at every accepted step (or every `spacing` when positive), plus
/// each turning point. Leaving the horizon stops the trace with
/// horizon_exit set.
inline GeodesicArc trace(const RadialProfile& surface, GeodesicArc arc, double s_max, double spacing = 0.0) {
  if (!(s_max > 0.0)) throw ValidationError("trace length must be positive");
  arc.samples.clear();
  arc.turnings.clear();
  arc.horizon_exit = false;
  const double T = surface.horizon();
  const double theta0 = arc.start.theta;

  if (arc.nu == 0.0) {
    const double dir = arc.psi == 0.0 ? 1.0 : -1.0;
    double end = s_max;
    if (dir > 0 && arc.start.t + s_max > T) {
      end = T - arc.start.t;
      arc.horizon_exit = true;
    } else if (dir < 0 && s_max - arc.start.t > T) {
      end = arc.start.t + T;
      arc.horizon_exit = true;
    }
    const double step = spacing > 0.0 ? spacing : std::max(end / 256.0, 1e-6);
    std::vector<double> ss;
    for (double s = 0.0; s < end; s += step) ss.push_back(s);
    if (dir < 0 && arc.start.t < end) ss.push_back(arc.start.t);
    ss.push_back(end);
    std::sort(ss.begin(), ss.end());
    ss.erase(std::unique(ss.begin(), ss.end()), ss.end());
    for (double s : ss) {
      const auto x = detail::meridian_state(arc, s);
      arc.samples.push_back({s, x[0], x[2], x[1] > 0 ? 1 : -1, x[1]});
    }
    return arc;
  }

  namespace ode = boost::numeric::odeint;
  const double tol = surface.tolerances().ode_tol;
  auto dense = ode::make_dense_output(tol, tol, ode::runge_kutta_dopri5<detail::GeoState>());
  const detail::GeodesicRhs rhs{&surface, arc.nu, static_cast<double>(arc.orientation)};
  detail::GeoState x0{arc.start.t, std::cos(arc.psi), theta0};
  if (std::abs(x0[1]) < 1e-15) x0[1] = 0.0;
  int branch = detail::initial_branch(surface, x0[0], x0[1], arc.nu);
  arc.samples.push_back({0.0, x0[0], x0[2], branch, x0[1]});
  dense.initialize(x0, 0.0, std::min(1e-2, s_max / 16.0));

  detail::GeoState y;
  auto state_at = [&](double s) {
    dense.calc_state(s, y);
    return y;
  };
  auto bisect = [&](double lo, double hi, auto&& g) {
    double glo = g(state_at(lo));
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      const double gm = g(state_at(mid));
      if ((gm > 0) == (glo > 0)) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  double next_out = spacing > 0.0 ? spacing : 0.0;
  std::size_t steps = 0;
  while (dense.current_time() < s_max) {
    if (++steps > 50'000'000) throw OdeFailure("geodesic trace exceeded the step budget");
    const auto [s0, s1raw] = dense.do_step(rhs);
    const double s1 = std::min(s1raw, s_max);
    const double p_start = arc.samples.back().t_rate;
    const auto end_state = state_at(s1);
    if (!std::isfinite(end_state[0])) throw OdeFailure("geodesic trace diverged");

    double stop = s1;
    if (end_state[0] > T) {
      stop = bisect(s0, s1, [&](const detail::GeoState& z) { return z[0] - T; });
      arc.horizon_exit = true;
    }
    // Turning point: t' changes sign inside the step.
    const auto stop_state = state_at(stop);
    std::optional<double> turn;
    if (branch > 0 ? stop_state[1] < 0.0 : stop_state[1] > 0.0) {
      turn = bisect(s0, stop, [&](const detail::GeoState& z) { return z[1]; });
    } else if (p_start == 0.0 && s0 == 0.0) {
      // launched on a turning point: branch already chosen by t''.
    }
    auto emit = [&](double s) {
      const auto z = state_at(s);
      arc.samples.push_back({s, z[0], z[2], branch, z[1]});
    };
    if (spacing > 0.0) {
      while (next_out < stop && (!turn || next_out < *turn)) {
        emit(next_out);
        next_out += spacing;
      }
    }
    if (turn) {
      branch = -branch;
      const auto z = state_at(*turn);
      arc.samples.push_back({*turn, z[0], z[2], branch, 0.0});
      arc.turnings.push_back(*turn);
      if (spacing > 0.0) {
        while (next_out < stop) {
          emit(next_out);
          next_out += spacing;
        }
      }
    }
    const bool last = arc.horizon_exit || stop >= s_max;
    if ((spacing <= 0.0 || last) && arc.samples.back().s < stop) emit(stop);
    if (arc.horizon_exit) break;
  }
  return arc;
}

/// Random access into a traced arc: re-integrates from the nearest sample.
/// Trace CSV: one row per sample, θ unwrapped.
inline void write_csv(std::ostream& os, const GeodesicArc& arc) {
  const auto old = os.precision(12);
  os << "s,t,theta,branch\n";
  for (const auto& x : arc.samples) os << x.s << ',' << x.t << ',' << x.theta << ',' << x.branch << '\n';
  os.precision(old);
}

class GeodesicPath {
 public:
  GeodesicPath(const RadialProfile& surface, GeodesicArc arc) : surface_(&surface), arc_(std::move(arc)) {
    if (arc_.samples.empty()) throw ValidationError("geodesic path needs a traced arc");
  }

  double length() const { return arc_.traced_length(); }
  const GeodesicArc& arc() const { return arc_; }

  /// (t, t', unwrapped θ) at arclength s in [0, length()].
  std::array<double, 3> state(double s) const {
    s = std::clamp(s, 0.0, length());
    if (arc_.nu == 0.0) return detail::meridian_state(arc_, s);
    const auto& smp = arc_.samples;
    auto it = std::upper_bound(smp.begin(), smp.end(), s, [](double v, const ArcSample& a) { return v < a.s; });
    const ArcSample& from = *std::prev(it);
    detail::GeoState x{from.t, from.t_rate, from.theta};
    if (s == from.s) return x;
    namespace ode = boost::numeric::odeint;
    const double tol = surface_->tolerances().ode_tol;
    auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_dopri5<detail::GeoState>());
    const detail::GeodesicRhs rhs{surface_, arc_.nu, static_cast<double>(arc_.orientation)};
    ode::integrate_adaptive(stepper, rhs, x, from.s, s, std::min(1e-2, s - from.s));
    return x;
  }

  SurfacePoint point(double s) const {
    const auto x = state(s);
    return SurfacePoint(std::max(0.0, x[0]), x[2]);
  }

 private:
  const RadialProfile* surface_;
  GeodesicArc arc_;
};

// ---------------------------------------------------------------------------
// Radial integrals along a monotone branch.

enum class BranchWeight {
  kAngle,   // ν / (f √(f² − ν²))         : θ-advance
  kLength,  // f / √(f² − ν²)             : arclength
  kArea,    // H(t) ν / (f √(f² − ν²))    : ∫ H dθ, H(t) = ∫_0^t G f
};

namespace detail {

// Integral over [a, b] (a < b, f >= ν inside) of weight / √(f² − ν²). Each
// half is mapped by t = anchor ± (w² − δ0), where anchor ∓ δ0 is the
// (possibly virtual) turning point given by the linearisation of f − ν at
// the anchor. The map removes the inverse square root; near the anchor
// f − ν is taken from its Taylor expansion, in which c0 cancels exactly.
// Bits 0 and 1 of `turning` mark a and b as turning radii; -1 detects them
// from f(anchor) = ν to rounding. When nu_ref > 0, ν = nu_ref − gap and
// f − ν at the anchors is formed as (f − nu_ref) + gap, keeping gaps below
// the rounding of ν.
inline double branch_integral(const RadialProfile& s, double nu, double a, double b, BranchWeight w,
                              double tol, int turning_mask = -1, double nu_ref = 0.0, double gap = 0.0) {
  if (!(b > a)) return 0.0;
  if (w == BranchWeight::kAngle && nu == 0.0) return 0.0;
  const double mid = 0.5 * (a + b);
  const auto breaks = s.breakpoints();
  double total = 0.0;
  for (int side = 0; side < 2; ++side) {
    const double anchor = side == 0 ? a : b;
    const double half = side == 0 ? mid - a : b - mid;
    const double dir = side == 0 ? 1.0 : -1.0;
    const double eps = 1e-13 * std::max(1.0, anchor);
    const WarpingValue wa = s.warping_at(anchor);
    const double fpp = -s.curvature(anchor + dir * eps) * wa.f;
    // A turning anchor (f = ν to rounding) is made exact by integrating
    // against ν = f(anchor) on this half: the integral depends on the
    // turning location like its square root, so a residual c0 ~ 1e-16
    // would otherwise cost ~1e-8.
    const bool turning =
        turning_mask < 0 ? std::abs(wa.f - nu) <= 1e-12 * nu : ((turning_mask >> side) & 1) != 0;
    const double nu_side = turning ? wa.f : nu;
    const double c0 = (!turning && nu_ref > 0.0) ? (wa.f - nu_ref) + gap : wa.f - nu_side;
    const double c1 = dir * wa.fp;
    if (turning && std::abs(wa.fp) <= 1e-12)
      throw BranchViolation("geodesic is asymptotic to a parallel at t = " + std::to_string(anchor));
    const double delta0 = (c1 > 0.0 && c0 > 0.0) ? c0 / c1 : 0.0;
    const double taylor_zone = std::min(half, 1e-6 * std::max(1.0, anchor));
    auto integrand = [&](double v, bool taylor) {
      const double d = std::max(0.0, v * v - delta0);
      const double t = anchor + dir * d;
      const WarpingValue wv = s.warping_at(t);
      double diff;
      if (taylor) {
        diff = (delta0 > 0.0 ? c1 * v * v : c0 + c1 * d) + 0.5 * fpp * d * d;
      } else {
        diff = wv.f - nu_side;
      }
      if (diff <= 0.0) return 0.0;
      const double root = std::sqrt(diff * (wv.f + nu_side));
      double weight = 0.0;
      switch (w) {
        case BranchWeight::kAngle: weight = nu / wv.f; break;
        case BranchWeight::kLength: weight = wv.f; break;
        case BranchWeight::kArea: weight = s.curvature_moment(t) * nu / wv.f; break;
      }
      return 2.0 * v * weight / root;
    };
    auto to_v = [&](double d) { return std::sqrt(delta0 + d); };
    const double v0 = to_v(0.0), vz = to_v(taylor_zone);
    total += integrate([&](double v) { return integrand(v, true); }, v0, vz, tol);
    // Direct part, split at profile breakpoints.
    std::vector<double> cuts;
    for (double bp : breaks) {
      const double d = dir * (bp - anchor);
      if (d > taylor_zone && d < half) cuts.push_back(to_v(d));
    }
    std::sort(cuts.begin(), cuts.end());
    total += integrate_pieces([&](double v) { return integrand(v, false); }, vz, to_v(half), cuts, tol);
  }
  return total;
}

}  // namespace detail

/// θ-advance ∫_{t_lo}^{t_hi} ν / (f √(f² − ν²)) dt along a monotone branch.
/// t_hi = +∞ integrates to the horizon and adds the tail of the linearly
/// continued warping function, arcsin(ν / f(T)) / f'(T).
inline double theta_advance(const RadialProfile& surface, double nu, double t_lo, double t_hi) {
  if (!(nu >= 0.0)) throw ValidationError("Clairaut constant must be non-negative");
  if (!(t_hi >= t_lo) || t_lo < 0.0) throw ValidationError("need 0 <= t_lo <= t_hi");
  if (nu == 0.0) return 0.0;
  const double T = surface.horizon();
  const bool to_infinity = std::isinf(t_hi);
  const double hi = to_infinity ? T : t_hi;
  if (hi > T) throw ValidationError("theta_advance upper limit lies beyond the horizon");
  const double slack = 1e-10 * nu;
  if (surface.min_warping(t_lo, hi) < nu - slack)
    throw BranchViolation("f(t) < ν inside the integration range; the branch turns before t_hi");
  double value = detail::branch_integral(surface, nu, t_lo, hi, BranchWeight::kAngle,
                                         surface.tolerances().quad_tol);
  if (to_infinity) {
    const WarpingValue end = surface.warping_at(T);
    if (!(end.fp > 0.0)) throw BranchViolation("no tail continuation: f is not increasing at the horizon");
    value += std::asin(std::min(1.0, nu / end.f)) / end.fp;
  }
  return value;
}

// ---------------------------------------------------------------------------
// Two-point problem by shooting in ν.

/// One connecting geodesic between two points.
struct ConnectingGeodesic {
  GeodesicArc arc;   // launch data at A (not traced)
  double length = 0.0;
  int turnings = 0;  // number of turning points (pole passage counts as 0)
  bool through_pole = false;
  int arrival_branch = 1;  // sign of t' on arrival at B
};

/// Shooting solver for fixed endpoint radii. The ν-sweep for each branch
/// pattern depends only on (t_A, t_B), so one connector serves every angular
/// separation between those radii.
class RadialConnector {
 public:
  static constexpr int kSweepNodes = 256;

  RadialConnector(const RadialProfile& surface, double t_a, double t_b, int max_turnings)
      : s_(&surface), ta_(t_a), tb_(t_b) {
    if (t_a < 0 || t_b < 0) throw ValidationError("radii must be non-negative");
    if (t_a > surface.horizon() || t_b > surface.horizon())
      throw ValidationError("endpoint lies beyond the horizon");
    if (t_a == 0.0 || t_b == 0.0) return;
    lo_ = std::min(t_a, t_b);
    hi_ = std::max(t_a, t_b);
    nu_max_ = surface.min_warping(lo_, hi_);
    const double sweep_tol = std::max(1e-9, surface.tolerances().quad_tol);
    for (int k = 0; k <= max_turnings; ++k) {
      for (int inward = 1; inward >= 0; --inward) {
        if (k == 0 && inward == 0) continue;
        Pattern pat{k, k == 0 ? (t_b < t_a) : inward == 1};
        if (k == 0 && t_a == t_b) continue;
        Sweep sw{pat, {}, {}};
        sw.nu.resize(kSweepNodes + 1);
        sw.theta.resize(kSweepNodes + 1);
        bool any = false;
        for (int j = 0; j <= kSweepNodes; ++j) {
          const double nu = nu_max_ * j / kSweepNodes;
          sw.nu[j] = nu;
          auto r = evaluate(pat, phi_of(nu), sweep_tol, false);
          sw.theta[j] = r ? r->theta : std::numeric_limits<double>::quiet_NaN();
          any = any || r.has_value();
        }
        if (any) sweeps_.push_back(std::move(sw));
      }
    }
  }

  double nu_max() const { return nu_max_; }

  /// All connecting geodesics whose θ-advance equals `delta` in [0, π],
  /// sorted by length.
  std::vector<ConnectingGeodesic> solve(double delta) const {
    std::vector<ConnectingGeodesic> out;
    const double tol = s_->tolerances().quad_tol;
    if (ta_ == 0.0 || tb_ == 0.0) {
      ConnectingGeodesic c;
      c.length = ta_ + tb_;
      c.arc.start = SurfacePoint(ta_, 0.0);
      c.arc.psi = ta_ == 0.0 ? 0.0 : kPi;
      c.arrival_branch = tb_ == 0.0 ? -1 : 1;
      out.push_back(c);
      return out;
    }
    if (delta <= 1e-15) {
      if (ta_ != tb_) {
        ConnectingGeodesic c;
        c.length = hi_ - lo_;
        c.arc.start = SurfacePoint(ta_, 0.0);
        c.arc.psi = tb_ > ta_ ? 0.0 : kPi;
        c.arrival_branch = tb_ > ta_ ? 1 : -1;
        out.push_back(c);
      }
      return out;
    }
    if (std::abs(delta - kPi) <= 1e-14) {
      ConnectingGeodesic c;
      c.length = ta_ + tb_;
      c.through_pole = true;
      c.arc.start = SurfacePoint(ta_, 0.0);
      c.arc.psi = kPi;
      c.arrival_branch = 1;
      out.push_back(c);
    }
    for (const Sweep& sw : sweeps_) {
      for (int j = 0; j < kSweepNodes; ++j) {
        const double g0 = sw.theta[j] - delta, g1 = sw.theta[j + 1] - delta;
        if (std::isnan(g0) || std::isnan(g1)) continue;
        if (g1 == 0.0 && j + 1 < kSweepNodes) continue;  // picked up by the next cell
        if ((g0 > 0) == (g1 > 0) && g0 != 0.0 && g1 != 0.0) continue;
        // Refined in φ with ν = ν_max sin φ: near ν_max the θ-advance goes
        // like √(ν_max − ν) but is smooth in φ.
        auto theta_minus = [&](double phi) {
          auto r = evaluate(sw.pattern, phi, tol, false);
          return r ? r->theta - delta : std::numeric_limits<double>::quiet_NaN();
        };
        const double a = phi_of(sw.nu[j]), b = phi_of(sw.nu[j + 1]);
        const double ga = theta_minus(a), gb = theta_minus(b);
        if (std::isnan(ga) || std::isnan(gb)) continue;
        double phi;
        if ((ga > 0) != (gb > 0) || ga == 0.0 || gb == 0.0) {
          phi = refine_root(theta_minus, a, b, ga, gb);
        } else {
          // Coarse sweep and precise evaluation disagree on the sign; take
          // the endpoint closer to zero when it is within tolerance.
          const double best = std::abs(ga) < std::abs(gb) ? a : b;
          if (std::min(std::abs(ga), std::abs(gb)) > 1e-9) continue;
          phi = best;
        }
        if (phi == 0.0) continue;  // meridian or pole passage, handled above
        auto r = evaluate(sw.pattern, phi, tol, true);
        if (!r) continue;
        out.push_back(make_candidate(sw.pattern, phi, r->length));
      }
    }
    deduplicate(out);
    return out;
  }

 private:
  struct Pattern {
    int turns;
    bool first_inward;
  };
  struct Sweep {
    Pattern pattern;
    std::vector<double> nu, theta;
  };
  struct Evaluation {
    double theta;
    double length;
  };

  // θ-advance (and optionally length) of the branch pattern at ν; nullopt
  // when the pattern does not exist for this ν.
  std::optional<Evaluation> evaluate(const Pattern& p, double phi, double tol, bool with_length) const {
    if (phi < 0.0 || phi > kPi / 2) return std::nullopt;
    const double nu = nu_of(phi), gap = gap_of(phi);
    if (nu == 0.0) {
      if (p.turns == 0) return Evaluation{0.0, hi_ - lo_};
      if (p.turns == 1 && p.first_inward) return Evaluation{kPi, ta_ + tb_};
      return std::nullopt;
    }
    const bool needs_outer = p.turns >= 2 || (p.turns == 1 && !p.first_inward);
    const bool needs_inner = p.turns >= 2 || (p.turns == 1 && p.first_inward);
    double t_in = 0.0, t_out = 0.0;
    if (needs_inner) t_in = s_->turning_radius_below(nu, lo_);
    if (needs_outer) {
      auto r = s_->turning_radius_above(nu, hi_);
      if (!r) return std::nullopt;
      t_out = *r;
    }
    // Radii visited: A, turning points, B.
    std::vector<double> path{ta_};
    bool inward = p.first_inward;
    for (int k = 0; k < p.turns; ++k) {
      path.push_back(inward ? t_in : t_out);
      inward = !inward;
    }
    path.push_back(tb_);
    Evaluation e{0.0, 0.0};
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      const bool swap = path[i] > path[i + 1];
      const double a = swap ? path[i + 1] : path[i], b = swap ? path[i] : path[i + 1];
      const bool turn_i = i > 0, turn_j = i + 2 < path.size();
      const int mask = ((swap ? turn_j : turn_i) ? 1 : 0) | ((swap ? turn_i : turn_j) ? 2 : 0);
      e.theta += detail::branch_integral(*s_, nu, a, b, BranchWeight::kAngle, tol, mask, nu_max_, gap);
      if (with_length)
        e.length += detail::branch_integral(*s_, nu, a, b, BranchWeight::kLength, tol, mask, nu_max_, gap);
    }
    return e;
  }

  double nu_of(double phi) const { return phi >= kPi / 2 ? nu_max_ : nu_max_ * std::sin(phi); }
  double phi_of(double nu) const { return nu >= nu_max_ ? kPi / 2 : std::asin(nu / nu_max_); }
  // ν_max − ν_max sin φ without cancellation.
  double gap_of(double phi) const {
    const double h = 0.5 * (kPi / 2 - std::clamp(phi, 0.0, kPi / 2));
    return 2.0 * nu_max_ * std::sin(h) * std::sin(h);
  }

  ConnectingGeodesic make_candidate(const Pattern& p, double phi, double length) const {
    const double nu = nu_of(phi);
    ConnectingGeodesic c;
    c.length = length;
    c.turnings = p.turns;
    int start_branch;
    if (p.turns == 0) {
      start_branch = tb_ > ta_ ? 1 : -1;
      c.arrival_branch = start_branch;
    } else {
      start_branch = p.first_inward ? -1 : 1;
      // After an odd number of turns the direction is reversed.
      c.arrival_branch = (p.turns % 2 == 1) ? -start_branch : start_branch;
    }
    // cos ψ from f(t_A) − ν = (f(t_A) − ν_max) + ν_max (1 − sin φ), which
    // keeps the launch angle accurate for nearly tangential departures.
    const double fa = s_->warping(ta_);
    const double gap = std::max(0.0, fa - nu_max_) + gap_of(phi);
    const double psi = std::atan2(nu, std::sqrt(gap * (fa + nu)));
    c.arc.start = SurfacePoint(ta_, 0.0);
    c.arc.nu = nu;
    c.arc.psi = start_branch > 0 ? psi : kPi - psi;
    c.arc.orientation = 1;
    return c;
  }

  void deduplicate(std::vector<ConnectingGeodesic>& v) const {
    const double rt = s_->tolerances().root_tol;
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.length < b.length; });
    std::vector<ConnectingGeodesic> out;
    for (auto& c : v) {
      bool dup = false;
      for (auto& o : out) {
        if (std::abs(o.length - c.length) <= rt && std::abs(o.arc.nu - c.arc.nu) <= 1e-9 * std::max(1.0, nu_max_) &&
            o.through_pole == c.through_pole) {
          if (c.turnings < o.turnings) o = c;
          dup = true;
          break;
        }
      }
      if (!dup) out.push_back(c);
    }
    // Ties within root_tol: prefer fewer turnings, then smaller ν.
    if (out.size() > 1) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < out.size() && out[i].length - out[0].length <= rt; ++i) {
        const auto& a = out[i];
        const auto& b = out[best];
        if (a.turnings < b.turnings || (a.turnings == b.turnings && a.arc.nu < b.arc.nu)) best = i;
      }
      std::rotate(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(best),
                  out.begin() + static_cast<std::ptrdiff_t>(best) + 1);
    }
    v = std::move(out);
  }

  const RadialProfile* s_;
  double ta_, tb_;
  double lo_ = 0.0, hi_ = 0.0, nu_max_ = 0.0;
  std::vector<Sweep> sweeps_;
};

namespace detail {

// Orients a connector solution for endpoints A and B.
inline ConnectingGeodesic place(ConnectingGeodesic c, SurfacePoint a, SurfacePoint b) {
  const double fwd = wrap_angle(b.theta - a.theta);
  c.arc.start = a;
  c.arc.orientation = fwd <= kPi ? 1 : -1;
  if (c.through_pole || c.arc.nu == 0.0) c.arc.orientation = 1;
  return c;
}

}  // namespace detail

/// All connecting geodesics from A to B with up to max_turnings turning
/// points, sorted by length (ties: fewer turnings, then smaller ν).
inline std::vector<ConnectingGeodesic> connect(const RadialProfile& surface, SurfacePoint a, SurfacePoint b,
                                               std::optional<int> max_turnings = std::nullopt) {
  const int k = max_turnings.value_or(surface.tolerances().max_turnings);
  if (a.t == b.t && (a.t == 0.0 || angular_separation(a.theta, b.theta) == 0.0))
    throw ValidationError("connect needs two distinct points");
  RadialConnector rc(surface, a.t, b.t, k);
  auto sols = rc.solve(angular_separation(a.theta, b.theta));
  if (sols.empty()) throw NoConnectionFound("no connecting geodesic with at most " + std::to_string(k) + " turnings");
  for (auto& c : sols) c = detail::place(std::move(c), a, b);
  return sols;
}

/// Riemannian distance as the shortest connecting geodesic.
inline double distance(const RadialProfile& surface, SurfacePoint a, SurfacePoint b) {
  if (a.t == b.t && (a.t == 0.0 || angular_separation(a.theta, b.theta) == 0.0)) return 0.0;
  return connect(surface, a, b).front().length;
}

}  // namespace revsurf
