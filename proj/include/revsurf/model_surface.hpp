#pragma once

// Model surfaces of revolution (M, p) with metric dt^2 + f(t)^2 dθ^2, where
// the warping function solves f'' + G f = 0, f(0) = 0, f'(0) = 1 for the
// radial curvature G.
//
// A RadialProfile is immutable once built. Every profile carries a node
// table (t, f, f', one-sided f'') on [0, T_max]; profiles defined through G
// evaluate f by quintic Hermite interpolation of that table, profiles defined
// by a closed-form f evaluate it directly.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "revsurf/error.hpp"
#include "revsurf/expression.hpp"
#include "revsurf/numerics.hpp"

namespace revsurf {

struct Tolerances {
  double ode_tol = 1e-12;
  double quad_tol = 1e-12;
  double root_tol = 1e-10;
  int grid_n = 2048;
  int max_turnings = 2;

  void validate() const {
    auto check = [](double v, const char* name) {
      if (!(v > 0.0 && v <= 1e-2))
        throw ValidationError(std::string(name) + " must lie in (0, 1e-2]");
    };
    check(ode_tol, "ode_tol");
    check(quad_tol, "quad_tol");
    check(root_tol, "root_tol");
    if (grid_n < 64) throw ValidationError("grid_n must be at least 64");
    if (max_turnings < 0) throw ValidationError("max_turnings must be non-negative");
  }
};

/// Decay annotation for t > T_max: |G(t)| <= C t^(-beta).
struct TailBound {
  double C = 0.0;
  double beta = 0.0;
};

/// A function of the radial coordinate given in closed form or by samples.
class RadialFunction {
 public:
  RadialFunction() = default;
  RadialFunction(Expression e) : impl_(std::move(e)) {}  // NOLINT(google-explicit-constructor)
  RadialFunction(MonotoneCubic c) : impl_(std::move(c)) {}  // NOLINT(google-explicit-constructor)
  static RadialFunction parse(std::string_view text) { return RadialFunction(Expression::parse(text)); }

  double operator()(double t) const {
    return std::visit([t](const auto& f) { return f(t); }, impl_);
  }
  bool closed_form() const { return std::holds_alternative<Expression>(impl_); }
  const Expression& expression() const { return std::get<Expression>(impl_); }
  /// Points where the function may fail to be smooth: `if` switches of a
  /// closed form, knots of sampled data.
  std::vector<double> breakpoints() const {
    if (closed_form()) return expression().breakpoints();
    const auto k = std::get<MonotoneCubic>(impl_).knots();
    return {k.begin(), k.end()};
  }
  std::string describe() const {
    if (closed_form()) return expression().str();
    return "sampled(" + std::to_string(std::get<MonotoneCubic>(impl_).knots().size()) + " nodes)";
  }

 private:
  std::variant<Expression, MonotoneCubic> impl_;
};

struct WarpingValue {
  double f;
  double fp;
};

struct SurfaceClass {
  std::optional<double> von_mangoldt_from;
  std::optional<double> cartan_hadamard_from;
};

class RadialProfile;
RadialProfile from_curvature(const RadialFunction& G, double t_max, const Tolerances& tol,
                             std::optional<TailBound> tail);
RadialProfile from_warping(const RadialFunction& f, double t_max, const Tolerances& tol,
                           std::optional<TailBound> tail);

class RadialProfile {
 public:
  enum class Kind { kCurvature, kWarping };

  double horizon() const { return nodes_.back(); }
  const Tolerances& tolerances() const { return tol_; }
  const std::optional<TailBound>& tail() const { return tail_; }
  Kind kind() const { return kind_; }
  std::span<const double> breakpoints() const { return breaks_; }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> node_warping() const { return f_; }
  std::span<const double> node_slope() const { return fp_; }
  const std::string& description() const { return description_; }

  /// Radial curvature G(t). Beyond the horizon closed forms keep evaluating;
  /// sampled data is held at its last value.
  double curvature(double t) const {
    if (kind_ == Kind::kWarping && warp_) {
      if (t < 1e-7) return g_at_pole_;
      return -warp_->d2(t) / warp_->f(t);
    }
    return source_(t);
  }

  /// The curvature as a standalone function: closed form when the profile
  /// came from a closed-form warping or curvature, samples otherwise.
  RadialFunction curvature_function() const {
    if (kind_ == Kind::kWarping && warp_)
      return RadialFunction(Expression::switch_at(1e-7, Expression::constant(g_at_pole_), -warp_->d2 / warp_->f));
    return source_;
  }

  /// f and f' at t. Beyond the horizon f is continued linearly.
  WarpingValue warping_at(double t) const {
    if (t <= 0.0) return {0.0, 1.0};
    const double T = nodes_.back();
    if (t > T) {
      const WarpingValue end{f_.back(), fp_.back()};
      return {end.f + end.fp * (t - T), end.fp};
    }
    if (warp_) return {warp_->f(t), warp_->d1(t)};
    if (t <= seed_end_) {
      const double t2 = t * t;
      return {t - g0_ * t2 * t / 6.0, 1.0 - 0.5 * g0_ * t2};
    }
    const std::size_t i = locate_cell(nodes_, t);
    auto [v, s] = quintic_hermite(nodes_[i], nodes_[i + 1], f_[i], fp_[i], fpp_right_[i], f_[i + 1],
                                  fp_[i + 1], fpp_left_[i + 1], t);
    return {v, s};
  }
  double warping(double t) const { return warping_at(t).f; }
  double warping_slope(double t) const { return warping_at(t).fp; }

  /// ∫_0^r G(t) f(t) dt, which equals 1 − f'(r) because f'' = −G f.
  double curvature_moment(double r) const { return 1.0 - warping_slope(std::clamp(r, 0.0, horizon())); }

  /// Minimum of f over [a, b] from node values and endpoints.
  double min_warping(double a, double b) const {
    if (a > b) std::swap(a, b);
    double m = std::min(warping(a), warping(b));
    auto lo = std::upper_bound(nodes_.begin(), nodes_.end(), a);
    for (auto it = lo; it != nodes_.end() && *it < b; ++it)
      m = std::min(m, f_[static_cast<std::size_t>(it - nodes_.begin())]);
    return m;
  }

  /// Largest t < below with f(t) = nu (f > nu on (t, below]). Exists for
  /// 0 < nu <= f(below) because f(0) = 0.
  double turning_radius_below(double nu, double below) const {
    auto g = [&](double t) { return warping(t) - nu; };
    const double gb = g(below);
    if (gb <= 0.0) return below;
    std::size_t i = locate_cell(nodes_, below);
    double hi = below, ghi = gb;
    for (;;) {
      const double lo = nodes_[i];
      if (f_[i] - nu <= 0.0) {
        const double glo = g(lo);
        if (glo <= 0.0) return refine_root(g, lo, hi, glo, ghi);
      }
      if (i == 0) return 0.0;
      hi = lo;
      ghi = f_[i] - nu;
      --i;
    }
  }

  /// Smallest t > above with f(t) = nu inside the horizon, if any.
  std::optional<double> turning_radius_above(double nu, double above) const {
    auto g = [&](double t) { return warping(t) - nu; };
    const double ga = g(above);
    if (ga <= 0.0) return above;
    std::size_t i = locate_cell(nodes_, above) + 1;
    double lo = above, glo = ga;
    for (; i < nodes_.size(); ++i) {
      if (f_[i] - nu <= 0.0) return refine_root(g, lo, nodes_[i], glo, g(nodes_[i]));
      lo = nodes_[i];
      glo = f_[i] - nu;
    }
    return std::nullopt;
  }

 private:
  friend RadialProfile from_curvature(const RadialFunction&, double, const Tolerances&,
                                      std::optional<TailBound>);
  friend RadialProfile from_warping(const RadialFunction&, double, const Tolerances&,
                                    std::optional<TailBound>);

  struct ClosedWarping {
    Expression f, d1, d2;
  };

  Kind kind_ = Kind::kCurvature;
  Tolerances tol_;
  std::optional<TailBound> tail_;
  RadialFunction source_;
  std::shared_ptr<const ClosedWarping> warp_;
  std::string description_;
  double g0_ = 0.0;
  double g_at_pole_ = 0.0;
  double seed_end_ = 0.0;
  std::vector<double> breaks_;
  std::vector<double> nodes_, f_, fp_, fpp_left_, fpp_right_;
};

namespace detail {

inline std::vector<double> build_grid(double t_max, int grid_n, std::span<const double> extra) {
  std::vector<double> x;
  x.reserve(static_cast<std::size_t>(grid_n) + extra.size());
  for (int i = 0; i < grid_n; ++i) x.push_back(t_max * i / (grid_n - 1));
  for (double b : extra)
    if (b > 0.0 && b < t_max) x.push_back(b);
  std::sort(x.begin(), x.end());
  std::vector<double> out;
  for (double v : x)
    if (out.empty() || v - out.back() > 1e-12 * std::max(1.0, t_max)) out.push_back(v);
  out.back() = t_max;
  return out;
}

inline void check_horizon(double t_max) {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ValidationError("tmax must be positive");
}

}  // namespace detail

/// Solves f'' + G f = 0, f(0) = 0, f'(0) = 1 on [0, t_max].
inline RadialProfile from_curvature(const RadialFunction& G, double t_max, const Tolerances& tol,
                                    std::optional<TailBound> tail = std::nullopt) {
  tol.validate();
  detail::check_horizon(t_max);
  RadialProfile p;
  p.kind_ = RadialProfile::Kind::kCurvature;
  p.tol_ = tol;
  p.tail_ = tail;
  p.source_ = G;
  p.description_ = "curvature " + G.describe();
  p.breaks_ = G.breakpoints();
  p.breaks_.erase(std::remove_if(p.breaks_.begin(), p.breaks_.end(),
                                 [&](double b) { return b <= 0.0 || b >= t_max; }),
                  p.breaks_.end());

  // Series seed f = t - G(0) t^3 / 6 near the pole.
  p.seed_end_ = std::min(1e-3 * t_max, 1e-4);
  if (!p.breaks_.empty()) p.seed_end_ = std::min(p.seed_end_, 0.5 * p.breaks_.front());
  p.g0_ = G(0.0);

  std::vector<double> extra = p.breaks_;
  extra.push_back(p.seed_end_);
  auto grid = detail::build_grid(t_max, tol.grid_n, extra);
  // Drop nodes strictly inside the seed interval.
  std::vector<double> nodes;
  for (double x : grid)
    if (x == 0.0 || x >= p.seed_end_) nodes.push_back(x);
  p.nodes_ = std::move(nodes);
  const std::size_t n = p.nodes_.size();
  p.f_.assign(n, 0.0);
  p.fp_.assign(n, 1.0);
  p.fpp_left_.assign(n, 0.0);
  p.fpp_right_.assign(n, 0.0);

  using State = std::array<double, 2>;
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_controlled(1e-2 * tol.ode_tol, tol.ode_tol, ode::runge_kutta_fehlberg78<State>());

  const double s = p.seed_end_;
  State y{s - p.g0_ * s * s * s / 6.0, 1.0 - 0.5 * p.g0_ * s * s};
  p.f_[1] = y[0];
  p.fp_[1] = y[1];
  p.fpp_left_[1] = -G(s) * y[0];
  p.fpp_right_[0] = 0.0;
  p.fpp_left_[0] = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double a = p.nodes_[i], b = p.nodes_[i + 1];
    const double eps = 1e-13 * std::max(1.0, b);
    auto rhs = [&](const State& x, State& dx, double t) {
      dx[0] = x[1];
      dx[1] = -G(std::clamp(t, a + eps, b - eps)) * x[0];
    };
    p.fpp_right_[i] = -G(a + eps) * y[0];
    try {
      ode::integrate_adaptive(stepper, rhs, y, a, b, 0.25 * (b - a));
    } catch (const std::exception& e) {
      throw OdeFailure(std::string("warping ODE failed near t = ") + std::to_string(a) + ": " + e.what());
    }
    if (!std::isfinite(y[0]) || !std::isfinite(y[1]))
      throw OdeFailure("warping ODE diverged near t = " + std::to_string(b));
    if (y[0] <= 0.0) {
      std::ostringstream os;
      os << "warping function reaches zero at t ~ " << b << " inside the horizon " << t_max;
      throw NonPositiveWarping(os.str());
    }
    p.f_[i + 1] = y[0];
    p.fp_[i + 1] = y[1];
    p.fpp_left_[i + 1] = -G(b - eps) * y[0];
  }
  p.fpp_right_[n - 1] = p.fpp_left_[n - 1];
  return p;
}

/// Builds a profile from the warping function; G is recovered as -f''/f.
inline RadialProfile from_warping(const RadialFunction& f, double t_max, const Tolerances& tol,
                                  std::optional<TailBound> tail = std::nullopt) {
  tol.validate();
  detail::check_horizon(t_max);
  if (!f.closed_form()) {
    // Sampled warping: curvature by second differences at the sample nodes,
    // then the profile is rebuilt through the warping ODE.
    throw ValidationError("sampled warping data must go through from_warping_samples");
  }
  const Expression& e = f.expression();
  const Expression d1 = e.derivative();
  const Expression d2 = d1.derivative();
  const Expression d3 = d2.derivative();
  const double f0 = e(0.0), fp0 = d1(0.0);
  if (!(std::abs(f0) <= 1e-8)) {
    std::ostringstream os;
    os << "warping must satisfy f(0) = 0 (got " << f0 << ")";
    throw InvalidWarping(os.str());
  }
  if (!(std::abs(fp0 - 1.0) <= 1e-8)) {
    std::ostringstream os;
    os << "warping must satisfy f'(0) = 1 (got " << fp0 << ")";
    throw InvalidWarping(os.str());
  }

  RadialProfile p;
  p.kind_ = RadialProfile::Kind::kWarping;
  p.tol_ = tol;
  p.tail_ = tail;
  p.description_ = "warping " + e.str();
  p.warp_ = std::make_shared<RadialProfile::ClosedWarping>(RadialProfile::ClosedWarping{e, d1, d2});
  p.g_at_pole_ = -d3(0.0) / fp0;
  p.breaks_ = e.breakpoints();
  p.breaks_.erase(std::remove_if(p.breaks_.begin(), p.breaks_.end(),
                                 [&](double b) { return b <= 0.0 || b >= t_max; }),
                  p.breaks_.end());
  p.nodes_ = detail::build_grid(t_max, tol.grid_n, p.breaks_);
  const std::size_t n = p.nodes_.size();
  p.f_.resize(n);
  p.fp_.resize(n);
  p.fpp_left_.resize(n);
  p.fpp_right_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = p.nodes_[i];
    p.f_[i] = e(t);
    p.fp_[i] = d1(t);
    p.fpp_left_[i] = p.fpp_right_[i] = d2(t);
    if (i > 0 && !(p.f_[i] > 0.0)) {
      std::ostringstream os;
      os << "warping must be positive on (0, tmax]; f(" << t << ") = " << p.f_[i];
      throw InvalidWarping(os.str());
    }
    if (!std::isfinite(p.f_[i]) || !std::isfinite(p.fp_[i]))
      throw InvalidWarping("warping is not finite at t = " + std::to_string(t));
  }
  return p;
}

/// Sampled warping (t_i, f_i) with t_0 = 0. The curvature is estimated by
/// second differences and the profile is re-integrated from it.
inline RadialProfile from_warping_samples(std::span<const double> t, std::span<const double> f,
                                          double t_max, const Tolerances& tol,
                                          std::optional<TailBound> tail = std::nullopt) {
  if (t.size() != f.size() || t.size() < 4) throw ValidationError("warping samples need at least 4 rows");
  if (t[0] != 0.0) throw InvalidWarping("warping samples must start at t = 0");
  if (std::abs(f[0]) > 1e-8) throw InvalidWarping("warping samples must satisfy f(0) = 0");
  const double h0 = t[1] - t[0], h1 = t[2] - t[1];
  // Second-order one-sided slope at t = 0.
  const double slope0 = -(2 * h0 + h1) / (h0 * (h0 + h1)) * f[0] + (h0 + h1) / (h0 * h1) * f[1] -
                        h0 / (h1 * (h0 + h1)) * f[2];
  if (std::abs(slope0 - 1.0) > 1e-2) {
    std::ostringstream os;
    os << "warping samples must satisfy f'(0) = 1 (estimated " << slope0 << ")";
    throw InvalidWarping(os.str());
  }
  std::vector<double> gx(t.begin(), t.end()), gy(t.size());
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(f[i] > 0.0)) throw InvalidWarping("warping samples must be positive for t > 0");
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const double a = t[i] - t[i - 1], b = t[i + 1] - t[i];
    const double fpp = 2.0 * (a * f[i + 1] - (a + b) * f[i] + b * f[i - 1]) / (a * b * (a + b));
    gy[i] = -fpp / f[i];
  }
  gy[0] = gy[1] + (gy[1] - gy[2]) * (t[1] - t[0]) / (t[2] - t[1]);
  const std::size_t n = t.size();
  gy[n - 1] = gy[n - 2];
  return from_curvature(RadialFunction(MonotoneCubic(gx, gy)), t_max, tol, tail);
}

/// Verdict for the improper total curvature c = ∫ G dM = 2π(1 - lim f').
struct TotalCurvature {
  enum class Verdict { kFinite, kNegativeInfinity, kUndetermined };
  double value = 0.0;         // best estimate (−inf for the divergent verdict)
  double horizon_value = 0.0;  // 2π(1 − f'(T_max))
  double error_bound = 0.0;   // bound on |value − c| from the tail annotation
  double f_prime_horizon = 1.0;
  Verdict verdict = Verdict::kUndetermined;
};

inline const char* to_string(TotalCurvature::Verdict v) {
  switch (v) {
    case TotalCurvature::Verdict::kFinite: return "finite";
    case TotalCurvature::Verdict::kNegativeInfinity: return "-inf";
    case TotalCurvature::Verdict::kUndetermined: return "undetermined";
  }
  return "?";
}

inline TotalCurvature total_curvature(const RadialProfile& s) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  const auto nodes = s.nodes();
  const auto fp = s.node_slope();
  const auto fw = s.node_warping();
  const std::size_t n = nodes.size();
  const double T = nodes.back();
  TotalCurvature out;
  out.f_prime_horizon = fp.back();
  out.horizon_value = kTwoPi * (1.0 - fp.back());
  out.value = out.horizon_value;

  if (const auto& tail = s.tail()) {
    const double C = tail->C, beta = tail->beta;
    if (beta > 2.0) {
      // Correction from a power-law continuation of G beyond the horizon,
      // with f continued linearly.
      const double GT = s.curvature(T);
      const double a = fw.back() - fp.back() * T;
      const double corr = -GT * std::pow(T, beta) *
                          (a * std::pow(T, 1.0 - beta) / (beta - 1.0) +
                           fp.back() * std::pow(T, 2.0 - beta) / (beta - 2.0));
      out.value = kTwoPi * (1.0 - (fp.back() + corr));
      // Gronwall bound on the growth of f' past the horizon.
      double sup_fp = 0.0;
      for (double v : fp) sup_fp = std::max(sup_fp, std::abs(v));
      const double decay = C * std::pow(T, 2.0 - beta) / (beta - 2.0);
      out.error_bound = kTwoPi * sup_fp * std::exp(decay) * decay;
      out.verdict = TotalCurvature::Verdict::kFinite;
      return out;
    }
    // Non-integrable annotation: −∞ when f' visibly grows without bound.
    const std::size_t half = n / 2;
    bool increasing = true;
    for (std::size_t i = half; i + 1 < n; ++i)
      if (fp[i + 1] < fp[i]) increasing = false;
    if (increasing && fp.back() > 1.0 && fp.back() >= 2.0 * fp[half]) {
      out.value = -std::numeric_limits<double>::infinity();
      out.verdict = TotalCurvature::Verdict::kNegativeInfinity;
    }
    return out;
  }
  // No annotation: finite only when G vanishes on the final stretch.
  const double slack = 10.0 * s.tolerances().quad_tol;
  std::size_t first_flat = n;
  for (std::size_t i = n; i-- > 0;) {
    const double t = nodes[i];
    const double eps = 1e-13 * std::max(1.0, t);
    const double g = std::max(std::abs(s.curvature(t)), std::abs(s.curvature(std::min(t + eps, T))));
    if (g > slack) break;
    first_flat = i;
  }
  if (first_flat < n && nodes[first_flat] <= 0.9 * T) {
    out.value = kTwoPi * (1.0 - fp[first_flat]);
    out.verdict = TotalCurvature::Verdict::kFinite;
  }
  return out;
}

namespace detail {

// Nodewise (VM)/(CH) test on G sampled on both sides of every node so that
// jumps are seen.
template <class Curvature>
SurfaceClass classify_nodes(std::span<const double> nodes, Curvature&& G, double slack) {
  const double T = nodes.back();
  std::vector<double> ts, gs;
  for (double t : nodes) {
    const double eps = 1e-12 * std::max(1.0, t);
    if (t > 0.0) {
      ts.push_back(t);
      gs.push_back(G(t - eps));
    }
    ts.push_back(t);
    gs.push_back(t < T ? G(t + eps) : G(t));
  }
  if (ts.front() == 0.0) gs.front() = G(0.0);
  SurfaceClass out;
  const std::size_t m = ts.size();
  std::optional<double> vm = 0.0;
  for (std::size_t i = m - 1; i-- > 0;) {
    if (gs[i + 1] > gs[i] + slack) {
      vm = ts[i + 1];
      break;
    }
  }
  std::optional<double> ch = 0.0;
  for (std::size_t i = m; i-- > 0;) {
    if (gs[i] > slack) {
      ch = i + 1 < m ? std::optional<double>(ts[i + 1]) : std::nullopt;
      break;
    }
  }
  if (vm && *vm <= 0.5 * T) out.von_mangoldt_from = *vm;
  if (ch && *ch <= 0.5 * T) out.cartan_hadamard_from = *ch;
  return out;
}

}  // namespace detail

/// Earliest node from which G is non-increasing (von Mangoldt) and
/// non-positive (Cartan-Hadamard) through the horizon. A condition is only
/// reported when it is witnessed on at least the outer half of the horizon.
inline SurfaceClass classify(const RadialProfile& s) {
  return detail::classify_nodes(s.nodes(), [&](double t) { return s.curvature(t); },
                                10.0 * s.tolerances().quad_tol);
}

/// Same test for a curvature function alone, on the grid a profile with this
/// horizon would use. Useful when G does not define a non-compact model on
/// the whole horizon (f reaches zero).
inline SurfaceClass classify(const RadialFunction& G, double t_max, const Tolerances& tol = {}) {
  tol.validate();
  detail::check_horizon(t_max);
  const auto grid = detail::build_grid(t_max, tol.grid_n, G.breakpoints());
  return detail::classify_nodes(grid, G, 10.0 * tol.quad_tol);
}

/// ∫ over the sector V(δ) ∩ B_T of |G| dM = δ ∫_0^T |G(t)| f(t) dt.
inline double sector_curvature_mass(const RadialProfile& s, double delta, double T) {
  if (!(delta > 0.0 && delta <= 2.0 * std::numbers::pi))
    throw PreconditionViolation("sector angle must lie in (0, 2π]");
  if (!(T > 0.0 && T <= s.horizon())) throw PreconditionViolation("radius must lie in (0, tmax]");
  auto integrand = [&](double t) { return std::abs(s.curvature(t)) * s.warping(t); };
  // Split at sign changes of G so |G| is smooth on every piece.
  std::vector<double> breaks(s.breakpoints().begin(), s.breakpoints().end());
  const auto nodes = s.nodes();
  auto g = [&](double t) { return s.curvature(t); };
  for (std::size_t i = 0; i + 1 < nodes.size() && nodes[i] < T; ++i) {
    const double a = nodes[i], b = std::min(nodes[i + 1], T);
    const double ga = g(a), gb = g(b);
    if ((ga < 0 && gb > 0) || (ga > 0 && gb < 0)) breaks.push_back(refine_root(g, a, b, ga, gb));
  }
  std::sort(breaks.begin(), breaks.end());
  return delta * integrate_pieces(integrand, 0.0, T, breaks, s.tolerances().quad_tol);
}

struct GrowthReport {
  enum class Integral { kConvergent, kDivergent, kUndetermined };
  std::vector<std::pair<double, double>> boundary_length;  // (t, 2π f(t))
  double reciprocal_square_integral = 0.0;                 // ∫_1^T f^-2 dt
  double tail_estimate = 0.0;                              // linear-continuation tail
  double growth_exponent = 0.0;                            // T f'(T) / f(T)
  Integral classification = Integral::kUndetermined;
};

inline const char* to_string(GrowthReport::Integral v) {
  switch (v) {
    case GrowthReport::Integral::kConvergent: return "convergent";
    case GrowthReport::Integral::kDivergent: return "divergent";
    case GrowthReport::Integral::kUndetermined: return "undetermined";
  }
  return "?";
}

/// Boundary lengths L(t) = 2π f(t) and the reciprocal-square integral whose
/// divergence forces the rigid case for slowly growing models.
inline GrowthReport growth_diagnostics(const RadialProfile& s) {
  const double T = s.horizon();
  if (!(T > 1.0)) throw PreconditionViolation("growth diagnostics need tmax > 1");
  GrowthReport r;
  const auto nodes = s.nodes();
  const auto fw = s.node_warping();
  for (std::size_t i = 0; i < nodes.size(); ++i)
    r.boundary_length.emplace_back(nodes[i], 2.0 * std::numbers::pi * fw[i]);
  auto inv2 = [&](double t) {
    const double f = s.warping(t);
    return 1.0 / (f * f);
  };
  r.reciprocal_square_integral = integrate_pieces(inv2, 1.0, T, s.breakpoints(), s.tolerances().quad_tol);
  const WarpingValue end = s.warping_at(T);
  r.growth_exponent = T * end.fp / end.f;
  // f ~ t^a has ∫ f^-2 < ∞ iff a > 1/2.
  if (r.growth_exponent <= 0.55) {
    r.classification = GrowthReport::Integral::kDivergent;
    r.tail_estimate = std::numeric_limits<double>::infinity();
  } else if (end.fp > 0.0) {
    r.tail_estimate = 1.0 / (end.fp * end.f);
    r.classification = (s.tail() && s.tail()->beta > 2.0) || r.growth_exponent >= 0.9
                           ? GrowthReport::Integral::kConvergent
                           : GrowthReport::Integral::kUndetermined;
  }
  return r;
}

}  // namespace revsurf
