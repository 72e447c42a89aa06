#pragma once

// Generic 1-D routines: bracketed root finding, golden-section maximization
// and adaptive Simpson quadrature. Header-only so the callables inline.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <type_traits>

#include "tailbound/errors.hpp"

namespace tailbound::numerics {

struct RootOptions {
  double tol_x = 1e-10;
  double tol_f = 1e-12;
  int max_iter = 200;
};

/// An interval [lo, hi] on which f changes sign. Only constructible through
/// certify(), so holding one means the sign change has been checked.
class RootBracket {
 public:
  template <class F>
  static RootBracket certify(F&& f, double lo, double hi, RootOptions opts = {}) {
    return from_values(lo, hi, f(lo), f(hi), opts);
  }

  /// For callers that already evaluated f at both ends while bracketing.
  static RootBracket from_values(double lo, double hi, double f_lo, double f_hi,
                                 RootOptions opts = {}) {
    if (!(lo < hi)) {
      throw BracketError("root bracket needs lo < hi (got [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "])");
    }
    if (std::isnan(f_lo) || std::isnan(f_hi) || (f_lo > 0.0 && f_hi > 0.0) ||
        (f_lo < 0.0 && f_hi < 0.0)) {
      throw BracketError("no sign change on [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]: f(lo)=" + std::to_string(f_lo) +
                         ", f(hi)=" + std::to_string(f_hi));
    }
    return RootBracket(lo, hi, f_lo, f_hi, opts);
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double f_lo() const { return f_lo_; }
  double f_hi() const { return f_hi_; }
  const RootOptions& options() const { return opts_; }

 private:
  RootBracket(double lo, double hi, double f_lo, double f_hi, RootOptions opts)
      : lo_(lo), hi_(hi), f_lo_(f_lo), f_hi_(f_hi), opts_(opts) {}

  double lo_, hi_, f_lo_, f_hi_;
  RootOptions opts_;
};

/// Illinois false position, falling back to bisection whenever the secant
/// step leaves the bracket or fails to halve it within three steps.
/// Returns x with |f(x)| <= tol_f, or the better end once the bracket is
/// narrower than tol_x. The result always lies in [lo, hi].
template <class F>
double find_root(F&& f, const RootBracket& bracket) {
  const RootOptions& opt = bracket.options();
  double a = bracket.lo(), b = bracket.hi();
  double fa = bracket.f_lo(), fb = bracket.f_hi();
  if (std::abs(fa) <= opt.tol_f) return a;
  if (std::abs(fb) <= opt.tol_f) return b;
  // Weighted copies used for the secant step; fa/fb stay the true values.
  double wa = fa, wb = fb;
  int side = 0;
  double width_checkpoint = b - a;
  int since_checkpoint = 0;
  bool force_bisect = false;
  for (int iter = 0; iter < opt.max_iter; ++iter) {
    if (b - a <= opt.tol_x) return std::abs(fa) < std::abs(fb) ? a : b;
    double x = (a * wb - b * wa) / (wb - wa);
    if (force_bisect || !(x > a && x < b)) {
      x = 0.5 * (a + b);
      force_bisect = false;
      side = 0;
      wa = fa;
      wb = fb;
    }
    const double fx = f(x);
    if (std::abs(fx) <= opt.tol_f) return x;
    if ((fx < 0.0) == (fa < 0.0)) {
      a = x;
      fa = wa = fx;
      if (side == -1) wb *= 0.5;
      side = -1;
    } else {
      b = x;
      fb = wb = fx;
      if (side == +1) wa *= 0.5;
      side = +1;
    }
    if (++since_checkpoint == 3) {
      force_bisect = (b - a) > 0.5 * width_checkpoint;
      width_checkpoint = b - a;
      since_checkpoint = 0;
    }
  }
  throw ConvergenceError("find_root: no convergence in " + std::to_string(opt.max_iter) +
                         " iterations on [" + std::to_string(a) + ", " + std::to_string(b) +
                         "]");
}

struct OptimBracket {
  double lo;
  double hi;
  double tol_x = 1e-10;
  int max_iter = 200;
};

struct MaximizeResult {
  double x;
  double fx;
  int evals;
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
/// Only interior points are evaluated; f may return -inf.
template <class F>
MaximizeResult maximize_unimodal(F&& f, const OptimBracket& bracket) {
  if (!(bracket.lo < bracket.hi)) {
    throw ArgumentError("maximize_unimodal needs lo < hi");
  }
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = bracket.lo, b = bracket.hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  int evals = 2;
  int iter = 0;
  while (b - a > bracket.tol_x) {
    if (++iter > bracket.max_iter) {
      throw ConvergenceError("maximize_unimodal: no convergence in " +
                             std::to_string(bracket.max_iter) + " iterations");
    }
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  return fc > fd ? MaximizeResult{c, fc, evals} : MaximizeResult{d, fd, evals};
}

struct QuadratureResult {
  double value;
  int evals;
  /// Set when some panel hit the depth cap before meeting its tolerance.
  bool accuracy_warning;
};

namespace detail {

template <class F>
struct Simpson {
  F& f;
  double tol_abs;
  int depth_cap;
  int evals = 0;
  bool warned = false;

  static constexpr int kMinDepth = 4;

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double eps,
                 int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    evals += 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    // Below this the difference is rounding noise, not truncation error.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                         (std::abs(left) + std::abs(right));
    if (depth >= kMinDepth && std::abs(delta) <= std::max(15.0 * eps, floor)) {
      return left + right + delta / 15.0;
    }
    if (depth >= depth_cap) {
      warned = true;
      return left + right + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * eps, depth + 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * eps, depth + 1);
  }
};

}  // namespace detail

/// Adaptive Simpson with Richardson correction. The tolerance is relative
/// to a coarse estimate of the integral of |f|; depth is capped at
/// `depth_cap` and a capped panel sets accuracy_warning.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-10,
                                    int depth_cap = 60) {
  if (!(a < b)) {
    if (a == b) return {0.0, 0, false};
    throw ArgumentError("integrate_adaptive needs a < b");
  }
  // Coarse composite Simpson on |f| sets the scale for the relative tolerance.
  constexpr int kCoarse = 16;
  const double h = (b - a) / kCoarse;
  double scale = 0.0;
  for (int i = 0; i <= kCoarse; ++i) {
    const double w = (i == 0 || i == kCoarse) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    scale += w * std::abs(f(a + i * h));
  }
  scale *= h / 3.0;

  using Fn = std::remove_reference_t<F>;
  detail::Simpson<Fn> s{f, rel_tol * scale, depth_cap};
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  s.evals = kCoarse + 4;
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double value = s.recurse(a, b, fa, fm, fb, whole, s.tol_abs, 0);
  return {value, s.evals, s.warned};
}

}  // namespace tailbound::numerics
