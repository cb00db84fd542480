#pragma once

// Finiteness of total curvature from a radial curvature bound. A finite
// family of directions stands in for the full set of 2-planes; the lower
// envelope G of their curvatures is clamped to G* = min(0, G), and the
// model m'' + G* m = 0 has finite total curvature whenever
// Λ(∞) = ∫ -t G*(t) dt is finite, with m' <= exp(Λ).

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "revsurf/csv.hpp"
#include "revsurf/error.hpp"
#include "revsurf/model_surface.hpp"
#include "revsurf/numerics.hpp"

namespace revsurf {

struct FieldDirection {
  std::string label;
  std::vector<double> t;
  std::vector<double> K;
  std::optional<Expression> closed_form;
  double lipschitz = 0.0;  // max |ΔK / Δt| on the grid
};

namespace detail {

inline double grid_lipschitz(const std::vector<double>& t, const std::vector<double>& v) {
  double l = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) l = std::max(l, std::abs(v[i + 1] - v[i]) / (t[i + 1] - t[i]));
  return l;
}

inline void check_direction(const FieldDirection& d) {
  if (d.t.size() != d.K.size() || d.t.size() < 2)
    throw ValidationError("direction " + d.label + " needs at least two samples");
  if (d.t.front() != 0.0) throw ValidationError("direction " + d.label + " must start at t = 0");
  for (std::size_t i = 0; i < d.t.size(); ++i) {
    if (!std::isfinite(d.K[i])) throw ValidationError("direction " + d.label + " has a non-finite curvature");
    if (i > 0 && !(d.t[i] > d.t[i - 1]))
      throw ValidationError("direction " + d.label + " grid must be strictly increasing");
  }
}

}  // namespace detail

/// Curvatures K(t, v) along a finite family of directions v.
class CurvatureField {
 public:
  CurvatureField() = default;
  explicit CurvatureField(std::vector<FieldDirection> dirs) : dirs_(std::move(dirs)) {
    if (dirs_.empty()) throw ValidationError("a curvature field needs at least one direction");
    for (auto& d : dirs_) {
      detail::check_direction(d);
      d.lipschitz = detail::grid_lipschitz(d.t, d.K);
    }
  }

  /// Closed-form directions sampled on a uniform grid of n cells on [0, T].
  static CurvatureField from_expressions(const std::vector<std::string>& exprs, double T, int n = 2048) {
    if (!(T > 0.0)) throw ValidationError("field horizon must be positive");
    if (n < 2) throw ValidationError("field grid needs at least 2 cells");
    std::vector<FieldDirection> dirs;
    for (std::size_t k = 0; k < exprs.size(); ++k) {
      FieldDirection d;
      d.label = "K_" + std::to_string(k + 1);
      d.closed_form = Expression::parse(exprs[k]);
      for (int i = 0; i <= n; ++i) {
        const double t = i == n ? T : T * i / n;
        d.t.push_back(t);
        d.K.push_back((*d.closed_form)(t));
      }
      dirs.push_back(std::move(d));
    }
    return CurvatureField(std::move(dirs));
  }

  const std::vector<FieldDirection>& directions() const { return dirs_; }
  double horizon() const { return dirs_.front().t.back(); }

 private:
  std::vector<FieldDirection> dirs_;
};

/// Field CSV: header `t,K_1,...,K_k`, one row per grid node.
inline CurvatureField read_field_csv(std::istream& in) {
  auto table = read_numeric_csv(in);
  if (table.header.size() < 2 || table.header[0] != "t")
    throw ParseError("field header must be t,K_1,...,K_k", 1);
  std::vector<FieldDirection> dirs;
  for (std::size_t k = 1; k < table.header.size(); ++k) {
    FieldDirection d;
    d.label = table.header[k];
    d.t = table.columns[0];
    d.K = table.columns[k];
    dirs.push_back(std::move(d));
  }
  return CurvatureField(std::move(dirs));
}

/// Nodal curvature bound with the function used downstream: a closed form
/// when every direction has one, the monotone cubic through the nodes
/// otherwise.
struct CurvatureBound {
  std::vector<double> t, G;
  double lipschitz = 0.0;
  RadialFunction function;

  double horizon() const { return t.back(); }
};

/// G(t) = min over directions of K(t, v).
inline CurvatureBound lower_envelope(const CurvatureField& field) {
  const auto& dirs = field.directions();
  if (dirs.empty()) throw ValidationError("a curvature field needs at least one direction");
  const auto& grid = dirs.front().t;
  for (const auto& d : dirs)
    if (d.t != grid) throw GridMismatch("direction " + d.label + " is sampled on a different grid");
  CurvatureBound out;
  out.t = grid;
  out.G = dirs.front().K;
  for (const auto& d : dirs)
    for (std::size_t i = 0; i < grid.size(); ++i) out.G[i] = std::min(out.G[i], d.K[i]);
  out.lipschitz = detail::grid_lipschitz(out.t, out.G);
  const bool closed = std::all_of(dirs.begin(), dirs.end(), [](const auto& d) { return d.closed_form.has_value(); });
  if (closed) {
    Expression e = *dirs.front().closed_form;
    for (std::size_t k = 1; k < dirs.size(); ++k) e = Expression::min(e, *dirs[k].closed_form);
    out.function = RadialFunction(e);
  } else {
    out.function = RadialFunction(MonotoneCubic(out.t, out.G));
  }
  return out;
}

/// G*(t) = min(0, G(t)).
inline CurvatureBound clamp_nonpositive(const CurvatureBound& g) {
  CurvatureBound out = g;
  for (double& v : out.G) v = std::min(0.0, v);
  out.lipschitz = detail::grid_lipschitz(out.t, out.G);
  if (g.function.closed_form())
    out.function = RadialFunction(Expression::min(Expression::constant(0.0), g.function.expression()));
  else
    out.function = RadialFunction(MonotoneCubic(out.t, out.G));
  return out;
}

/// Λ on the horizon with what can be said about the remainder.
struct LambdaEstimate {
  double horizon_value = 0.0;        // ∫_0^T -t G*(t) dt
  std::optional<double> limit;       // Λ(∞) when the tail is known to converge
  double tail_bound = 0.0;           // bound on Λ(∞) − Λ(T)
  bool divergent = false;

  double best() const { return limit ? *limit : horizon_value; }
};

namespace detail {

// G* vanishes on the last tenth of the horizon (checked on the nodes and
// just past them so that jumps are seen).
inline bool vanishes_on_final_stretch(const RadialFunction& g, std::span<const double> t, double slack) {
  const double T = t.back();
  for (std::size_t i = t.size(); i-- > 0;) {
    if (t[i] < 0.9 * T) return true;
    const double eps = 1e-13 * std::max(1.0, t[i]);
    if (std::abs(g(t[i])) > slack || std::abs(g(std::min(t[i] + eps, T))) > slack) return false;
  }
  return true;
}

}  // namespace detail

/// Λ(T) = ∫_0^T -t G*(t) dt. With a tail annotation |G*| <= C t^(-β) the
/// remainder is at most C T^(2-β)/(β-2) when β > 2 and is flagged divergent
/// otherwise.
inline LambdaEstimate lambda_integral(const CurvatureBound& gstar, std::optional<TailBound> tail,
                                      double quad_tol = 1e-12) {
  for (double v : gstar.G)
    if (v > 0.0) throw PreconditionViolation("lambda_integral needs G* <= 0");
  const auto& g = gstar.function;
  const double T = gstar.horizon();
  auto integrand = [&](double t) { return -t * std::min(0.0, g(t)); };
  LambdaEstimate out;
  const auto breaks = g.breakpoints();
  out.horizon_value = integrate_pieces(integrand, 0.0, T, breaks, quad_tol);
  if (tail) {
    if (tail->beta <= 2.0) {
      out.divergent = tail->C > 0.0;
      if (!out.divergent) out.limit = out.horizon_value;
      return out;
    }
    out.tail_bound = tail->C * std::pow(T, 2.0 - tail->beta) / (tail->beta - 2.0);
    if (g.closed_form())
      out.limit = out.horizon_value + integrate_to_infinity(integrand, T, quad_tol);
    else
      out.limit = out.horizon_value;
    return out;
  }
  if (detail::vanishes_on_final_stretch(g, gstar.t, 10.0 * quad_tol)) out.limit = out.horizon_value;
  return out;
}

struct GronwallAudit {
  std::vector<double> t, m_prime, bound;  // bound = exp(Λ(t))
  bool monotone = true;                   // m' non-decreasing at the nodes
};

/// Throws AuditFailure at the first node where m' > exp(Λ) + slack.
inline void check_gronwall(const std::vector<double>& t, const std::vector<double>& m_prime,
                           const std::vector<double>& lambda, double slack) {
  if (t.size() != m_prime.size() || t.size() != lambda.size())
    throw ValidationError("gronwall check needs equally long samples");
  for (std::size_t i = 0; i < t.size(); ++i)
    if (m_prime[i] > std::exp(lambda[i]) + slack) {
      std::ostringstream os;
      os.precision(12);
      os << "m'(" << t[i] << ") = " << m_prime[i] << " exceeds exp(Lambda) = " << std::exp(lambda[i]);
      throw AuditFailure(os.str(), i, t[i]);
    }
}

/// Solves m'' + G* m = 0 and checks m' <= exp(Λ) at every node.
inline GronwallAudit gronwall_audit(const RadialProfile& m) {
  const auto t = m.nodes();
  const auto fp = m.node_slope();
  const double quad_tol = m.tolerances().quad_tol;
  GronwallAudit a;
  a.t.assign(t.begin(), t.end());
  a.m_prime.assign(fp.begin(), fp.end());
  std::vector<double> lambda(t.size(), 0.0);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double lo = t[i], hi = t[i + 1], eps = 1e-13 * std::max(1.0, hi);
    auto integrand = [&](double s) { return -s * std::min(0.0, m.curvature(std::clamp(s, lo + eps, hi - eps))); };
    lambda[i + 1] = lambda[i] + integrate(integrand, lo, hi, quad_tol);
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (m.curvature(t[i]) > 10.0 * quad_tol) throw PreconditionViolation("gronwall_audit needs G* <= 0");
    a.bound.push_back(std::exp(lambda[i]));
    if (i > 0 && a.m_prime[i] < a.m_prime[i - 1] - 10.0 * m.tolerances().ode_tol) a.monotone = false;
  }
  check_gronwall(a.t, a.m_prime, lambda, 10.0 * m.tolerances().ode_tol);
  return a;
}

inline GronwallAudit gronwall_audit(const CurvatureBound& gstar, const Tolerances& tol = {}) {
  return gronwall_audit(from_curvature(gstar.function, gstar.horizon(), tol));
}

struct DecayCheck {
  double alpha = 0.0, N = 0.0, C = 1.0;
  bool pass = false;
  double growth_exponent = 0.0;  // fitted γ in -t^(2+α) K ~ t^γ on the outer half
  double margin = 0.0;           // min over nodes of t^(2+α) K − C N
  double lambda_tail_bound = 0.0;  // ∫_1^∞ -t G* <= C |N| / α
};

/// liminf t^(2+α) K(t) > N on the nodes of [1, T]. A fitted C >= 1 absorbs
/// the finite part; a polynomially growing -t^(2+α) K fails the check.
template <class K>
DecayCheck polynomial_decay_check(K&& k_min, double alpha, double N, double T, int n = 2048) {
  if (!(alpha > 0.0)) throw PreconditionViolation("decay exponent α must be positive");
  if (N > 0.0) throw PreconditionViolation("decay constant N must be non-positive");
  if (!(T > 1.0)) throw PreconditionViolation("decay check needs a horizon beyond t = 1");
  DecayCheck d;
  d.alpha = alpha;
  d.N = N;
  std::vector<double> ts, qs;
  for (int i = 1; i <= n; ++i) {
    const double t = 1.0 + (T - 1.0) * i / n;
    ts.push_back(t);
    qs.push_back(std::pow(t, 2.0 + alpha) * k_min(t));
  }
  // Least-squares slope of log(-q) against log t on the outer half.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t i = ts.size() / 2; i < ts.size(); ++i) {
    if (!(qs[i] < 0.0)) continue;
    const double x = std::log(ts[i]), y = std::log(-qs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt >= 2) d.growth_exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  constexpr double kGrowth = 0.1;
  double need = 1.0;
  bool bounded = true;
  for (double q : qs) {
    if (q > 0.0) continue;
    if (N == 0.0) {
      bounded = false;
      break;
    }
    need = std::max(need, q / N);
  }
  d.C = need * (1.0 + 1e-9);
  d.pass = bounded && d.growth_exponent <= kGrowth;
  d.margin = std::numeric_limits<double>::infinity();
  for (double q : qs) d.margin = std::min(d.margin, q - d.C * N);
  d.lambda_tail_bound = d.pass ? d.C * std::abs(N) / alpha : std::numeric_limits<double>::infinity();
  return d;
}

struct DecayHypothesis {
  double alpha = 1.0;
  double N = -1.0;
};

struct MilnorReport {
  enum class Verdict { kFinite, kInfinite, kInconclusive };
  LambdaEstimate lambda;
  TotalCurvature total_curvature;                    // of the clamped model m
  std::optional<TotalCurvature> envelope_curvature;  // of the model built from G itself
  double m_prime_horizon = 1.0;
  bool gronwall_ok = false;
  bool m_prime_monotone = false;
  std::optional<DecayCheck> decay_check;
  std::optional<TailBound> tail_used;
  Verdict verdict = Verdict::kInconclusive;
  std::vector<std::string> notes;
};

inline const char* to_string(MilnorReport::Verdict v) {
  switch (v) {
    case MilnorReport::Verdict::kFinite: return "finite-total-curvature";
    case MilnorReport::Verdict::kInfinite: return "infinite";
    case MilnorReport::Verdict::kInconclusive: return "inconclusive";
  }
  return "?";
}

/// Envelope, clamp, Λ, Gronwall audit and total curvature of the clamped
/// model. A decay hypothesis that passes supplies the tail annotation
/// |G*| <= C|N| t^(-2-α) when none is given.
inline MilnorReport milnor_verdict(const CurvatureField& field, std::optional<TailBound> tail = std::nullopt,
                                   std::optional<DecayHypothesis> decay = std::nullopt,
                                   const Tolerances& tol = {}) {
  tol.validate();
  MilnorReport r;
  const CurvatureBound g = lower_envelope(field);
  const CurvatureBound gstar = clamp_nonpositive(g);
  if (decay) {
    r.decay_check = polynomial_decay_check(g.function, decay->alpha, decay->N, g.horizon(), tol.grid_n);
    if (!tail && r.decay_check->pass && decay->N < 0.0)
      tail = TailBound{r.decay_check->C * std::abs(decay->N), 2.0 + decay->alpha};
  }
  r.tail_used = tail;
  r.lambda = lambda_integral(gstar, tail, tol.quad_tol);
  const RadialProfile m = from_curvature(gstar.function, gstar.horizon(), tol, tail);
  const GronwallAudit audit = gronwall_audit(m);
  r.gronwall_ok = true;
  r.m_prime_monotone = audit.monotone;
  r.m_prime_horizon = audit.m_prime.back();
  r.total_curvature = total_curvature(m);
  try {
    r.envelope_curvature = total_curvature(from_curvature(g.function, g.horizon(), tol, tail));
  } catch (const ValidationFailure&) {
    r.notes.push_back("the model built from G itself closes up inside the horizon");
  }
  // m >= t gives m'(t) >= 1 + Λ(t); the annotation only bounds |G*| from
  // above, so divergence is declared when m' also grows visibly.
  if (r.lambda.divergent && r.total_curvature.verdict == TotalCurvature::Verdict::kNegativeInfinity)
    r.verdict = MilnorReport::Verdict::kInfinite;
  else if (r.lambda.limit && r.gronwall_ok)
    r.verdict = MilnorReport::Verdict::kFinite;
  r.notes.push_back("G is the lower envelope of " + std::to_string(field.directions().size()) +
                    " sampled directions, not of every 2-plane");
  r.notes.push_back("G* <= 0, so the clamped model is Cartan-Hadamard from t = 0");
  r.notes.push_back("finite total curvature of the clamped model, through the sector and comparison theorems, "
                    "gives finite topological type; that step is cited, not computed");
  r.notes.push_back("only m and m' enter; smoothness of the metric at the base point is not used");
  return r;
}

inline void write_report(std::ostream& os, const MilnorReport& r) {
  const auto old = os.precision(12);
  os << "lambda_horizon=" << r.lambda.horizon_value << '\n';
  os << "lambda_limit=";
  if (r.lambda.limit) os << *r.lambda.limit;
  os << '\n';
  os << "lambda_tail_bound=" << r.lambda.tail_bound << '\n';
  os << "lambda_divergent=" << (r.lambda.divergent ? "true" : "false") << '\n';
  os << "m_prime_horizon=" << r.m_prime_horizon << '\n';
  os << "gronwall_ok=" << (r.gronwall_ok ? "true" : "false") << '\n';
  os << "total_curvature=" << r.total_curvature.value << " (" << to_string(r.total_curvature.verdict) << ")\n";
  if (r.envelope_curvature)
    os << "envelope_total_curvature=" << r.envelope_curvature->value << " ("
       << to_string(r.envelope_curvature->verdict) << ")\n";
  if (r.decay_check)
    os << "decay_check alpha=" << r.decay_check->alpha << " N=" << r.decay_check->N << " C=" << r.decay_check->C
       << " pass=" << (r.decay_check->pass ? "true" : "false") << '\n';
  for (const auto& n : r.notes) os << "note: " << n << '\n';
  os << "lambda,total_curvature,m_prime,verdict\n";
  os << r.lambda.best() << ',' << r.total_curvature.value << ',' << r.m_prime_horizon << ','
     << to_string(r.verdict) << '\n';
  os.precision(old);
}

}  // namespace revsurf
