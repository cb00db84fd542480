#pragma once

// Small numerical building blocks shared by the geometry modules:
// adaptive quadrature, bracketed root refinement, interpolants and a
// deterministic parallel loop.

#include <algorithm>
#include <array>
#include <queue>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "revsurf/error.hpp"

namespace revsurf {

namespace detail {

// One 15-point Gauss-Kronrod panel on [a, b]: {estimate, error, L1}. The
// error is scaled to the panel (Boost's adaptive driver leaves it on
// [-1, 1], which stalls on narrow intervals).
template <class F>
std::array<double, 3> gk15_panel(F& f, double a, double b) {
  double err = 0.0, l1 = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &err, &l1);
  return {v, err * 0.5 * std::abs(b - a), l1};
}

// Globally adaptive: bisects the panel with the largest error estimate
// until the summed estimate meets abs_tol. The panel budget bounds the work
// when rounding noise in the integrand sits above the tolerance.
template <class F>
double gk15_adaptive(F& f, double a, double b, double abs_tol, const std::array<double, 3>& whole,
                     double& err_out, std::size_t max_panels = 1000) {
  struct Panel {
    double a, b, value, err;
    bool operator<(const Panel& o) const { return err < o.err; }
  };
  std::priority_queue<Panel> heap;
  heap.push({a, b, whole[0], whole[1]});
  double value = whole[0], err = whole[1];
  while (err > abs_tol && heap.size() < max_panels) {
    const Panel p = heap.top();
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) break;
    heap.pop();
    const auto l = gk15_panel(f, p.a, mid);
    const auto r = gk15_panel(f, mid, p.b);
    value += l[0] + r[0] - p.value;
    err += l[1] + r[1] - p.err;
    heap.push({p.a, mid, l[0], l[1]});
    heap.push({mid, p.b, r[0], r[1]});
  }
  // Re-sum to shed the drift of the running updates.
  value = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().err;
    heap.pop();
  }
  err_out = err;
  return value;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (15 point) integral of `f` over [a, b] with
/// relative tolerance `tol`.
template <class F>
double integrate(F&& f, double a, double b, double tol, double* error_estimate = nullptr) {
  if (a == b) {
    if (error_estimate) *error_estimate = 0.0;
    return 0.0;
  }
  auto g = [&](double x) { return f(x); };
  const auto whole = detail::gk15_panel(g, a, b);
  const double abs_tol = std::max(tol * whole[2], 1e-300);
  double err = 0.0;
  const double v = detail::gk15_adaptive(g, a, b, abs_tol, whole, err);
  if (error_estimate) *error_estimate = err;
  return v;
}

/// Adaptive integral over [a, b] split at interior breakpoints.
template <class F>
double integrate_pieces(F&& f, double a, double b, std::span<const double> breaks, double tol) {
  double total = 0.0;
  double lo = a;
  for (double x : breaks) {
    if (x <= lo || x >= b) continue;
    total += integrate(f, lo, x, tol);
    lo = x;
  }
  return total + integrate(f, lo, b, tol);
}

/// Improper integral of `f` over [a, inf).
template <class F>
double integrate_to_infinity(F&& f, double a, double tol) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate([&](double x) { return f(x); }, a,
                              std::numeric_limits<double>::infinity(), tol);
}

/// Root of `g` in [lo, hi] given a sign change (or a zero at an end).
template <class G>
double refine_root(G&& g, double lo, double hi, double glo, double ghi) {
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if ((glo > 0) == (ghi > 0)) throw NumericalFailure("refine_root: interval does not bracket");
  std::uintmax_t max_iter = 200;
  boost::math::tools::eps_tolerance<double> tol(52);
  auto r = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, tol, max_iter);
  return 0.5 * (r.first + r.second);
}

/// Threads used for embarrassingly parallel sweeps; capped by REVSURF_THREADS.
inline unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("REVSURF_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

/// Runs body(i) for i in [0, n). Results must be written to per-index slots
/// so that output does not depend on scheduling.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const unsigned workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Index of the cell [x[i], x[i+1]] containing `t` (clamped to the range).
inline std::size_t locate_cell(std::span<const double> x, double t) {
  if (t <= x.front()) return 0;
  if (t >= x.back()) return x.size() - 2;
  auto it = std::upper_bound(x.begin(), x.end(), t);
  return static_cast<std::size_t>(it - x.begin()) - 1;
}

/// Shape-preserving piecewise cubic (Fritsch-Carlson) through sampled data.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.size() != y_.size() || x_.size() < 2)
      throw ValidationError("monotone cubic needs at least two samples of equal length");
    for (std::size_t i = 1; i < x_.size(); ++i)
      if (!(x_[i] > x_[i - 1])) throw ValidationError("sample abscissae must be strictly increasing");
    const std::size_t n = x_.size();
    std::vector<double> delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    d_.assign(n, 0.0);
    d_[0] = delta[0];
    d_[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0) {
        d_[i] = 0.0;
      } else {
        const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
        const double w1 = 2 * h1 + h0, w2 = h1 + 2 * h0;
        d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
      }
    }
  }

  double operator()(double t) const {
    const std::size_t i = locate_cell(x_, t);
    const double h = x_[i + 1] - x_[i];
    const double s = (t - x_[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
  }

  std::span<const double> knots() const { return x_; }
  std::span<const double> values() const { return y_; }

 private:
  std::vector<double> x_, y_, d_;
};

/// Quintic Hermite interpolation on one cell from value, slope and second
/// derivative at both ends. Returns {value, first derivative}.
inline std::pair<double, double> quintic_hermite(double t0, double t1, double y0, double d0, double c0,
                                                 double y1, double d1, double c1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  const double H0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
  const double H1 = s - 6 * s3 + 8 * s4 - 3 * s5;
  const double H2 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
  const double H3 = 10 * s3 - 15 * s4 + 6 * s5;
  const double H4 = -4 * s3 + 7 * s4 - 3 * s5;
  const double H5 = 0.5 * (s3 - 2 * s4 + s5);
  const double dH0 = -30 * s2 + 60 * s3 - 30 * s4;
  const double dH1 = 1 - 18 * s2 + 32 * s3 - 15 * s4;
  const double dH2 = 0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4);
  const double dH3 = 30 * s2 - 60 * s3 + 30 * s4;
  const double dH4 = -12 * s2 + 28 * s3 - 15 * s4;
  const double dH5 = 0.5 * (3 * s2 - 8 * s3 + 5 * s4);
  const double value =
      H0 * y0 + H1 * h * d0 + H2 * h * h * c0 + H3 * y1 + H4 * h * d1 + H5 * h * h * c1;
  const double slope =
      (dH0 * y0 + dH1 * h * d0 + dH2 * h * h * c0 + dH3 * y1 + dH4 * h * d1 + dH5 * h * h * c1) / h;
  return {value, slope};
}

}  // namespace revsurf
