#include "tailbound/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tailbound/errors.hpp"
#include "tailbound/numerics.hpp"

namespace tailbound {

namespace {

constexpr int kMaxExpansions = 1100;

void require_in_range(const CumulantModel& model, double y) {
  if (!std::isfinite(y) || !model.slope_range().contains(y)) {
    throw RangeError("y=" + std::to_string(y) + " is outside the range of K' for " +
                     model.name());
  }
}

}  // namespace

double checked_rate(double raw, double magnitude) {
  if (raw >= 0.0) return raw;
  if (raw >= -1e-12 * std::max(1.0, magnitude)) return 0.0;
  throw InternalConsistencyError("negative rate " + std::to_string(raw) +
                                 " (term magnitude " + std::to_string(magnitude) + ")");
}

double xi(const CumulantModel& model, double y) {
  require_in_range(model, y);
  const double mean = model.mean();
  if (y == mean) return 0.0;

  auto slope_gap = [&](double s) { return model.eval(s).k1 - y; };

  double lo, hi, f_lo, f_hi;
  if (y > mean) {
    lo = 0.0;
    f_lo = mean - y;
    hi = lo;
    f_hi = f_lo;
    const double xs = model.xi_star();
    if (std::isfinite(xs)) {
      // Approach the pole geometrically: b_n = xi* (1 - 2^-n).
      for (int n = 1; n <= 60; ++n) {
        const double b = xs * (1.0 - std::ldexp(1.0, -n));
        if (!(b < xs)) break;
        const double fb = slope_gap(b);
        if (fb > 0.0) {
          hi = b;
          f_hi = fb;
          break;
        }
        lo = b;
        f_lo = fb;
      }
    } else {
      double b = 1.0;
      for (int n = 0; n < kMaxExpansions && std::isfinite(b); ++n, b *= 2.0) {
        const double fb = slope_gap(b);
        if (fb > 0.0) {
          hi = b;
          f_hi = fb;
          break;
        }
        lo = b;
        f_lo = fb;
      }
    }
    if (!(f_hi > 0.0)) {
      throw RangeError("could not bracket Xi(" + std::to_string(y) + ") for " + model.name());
    }
  } else {
    hi = 0.0;
    f_hi = mean - y;
    lo = hi;
    f_lo = f_hi;
    double b = -1.0;
    for (int n = 0; n < kMaxExpansions && std::isfinite(b); ++n, b *= 2.0) {
      const double fb = slope_gap(b);
      if (fb < 0.0) {
        lo = b;
        f_lo = fb;
        break;
      }
      hi = b;
      f_hi = fb;
    }
    if (!(f_lo < 0.0)) {
      throw RangeError("could not bracket Xi(" + std::to_string(y) + ") for " + model.name());
    }
  }

  numerics::RootOptions opts;
  opts.tol_f = 1e-12 * std::max(1.0, std::abs(y));
  opts.tol_x = 1e-15 * std::max({1.0, std::abs(lo), std::abs(hi)});
  opts.max_iter = 200;
  try {
    return numerics::find_root(slope_gap,
                               numerics::RootBracket::from_values(lo, hi, f_lo, f_hi, opts));
  } catch (const ConvergenceError& e) {
    throw ConvergenceError("Xi(" + std::to_string(y) + ") for " + model.name() + ": " + e.what());
  }
}

DualSample dual_sample(const CumulantModel& model, double t) {
  const double s = xi(model, t);
  const CumulantValues v = model.eval(s);
  return {t, s, v.k, v.k2};
}

DualPoint dual_point(const CumulantModel& model, double y) {
  const DualSample d = dual_sample(model, y);
  const double r = checked_rate(y * d.xi - d.k, std::abs(y * d.xi) + std::abs(d.k));
  return {y, d.xi, d.xi_prime(), r};
}

double xi_inverse(const CumulantModel& model, double lambda) { return model.eval(lambda).k1; }

double rate(const CumulantModel& model, double y) { return dual_point(model, y).rate; }

double tilted_rate_between(const DualSample& center, const DualSample& target) {
  const double raw = target.t * (target.xi - center.xi) + center.k - target.k;
  const double magnitude = std::abs(target.t * target.xi) + std::abs(target.t * center.xi) +
                           std::abs(center.k) + std::abs(target.k);
  return checked_rate(raw, magnitude);
}

namespace {

void require_tilt_args(const CumulantModel& model, double alpha, double delta, double y) {
  if (!(alpha >= 1.0)) throw ArgumentError("tilt requires alpha >= 1");
  if (!(delta > 0.0)) throw ArgumentError("tilt requires delta > 0");
  if (!(y > model.mean())) throw ArgumentError("tilt requires y above the mean");
}

}  // namespace

double tilted_rate(const CumulantModel& model, double alpha, double delta, double y) {
  require_tilt_args(model, alpha, delta, y);
  if (delta == alpha) return 0.0;
  return tilted_rate_between(dual_sample(model, alpha * y), dual_sample(model, delta * y));
}

TiltedRates tilted_pair(const CumulantModel& model, double alpha, double delta, double y) {
  require_tilt_args(model, alpha, delta, y);
  const DualSample center = dual_sample(model, alpha * y);
  const double i_y = alpha == 1.0 ? 0.0 : tilted_rate_between(center, dual_sample(model, y));
  const double i_dy =
      delta == alpha ? 0.0 : tilted_rate_between(center, dual_sample(model, delta * y));
  return {alpha, delta, y, i_y, i_dy, std::exp(-i_y), std::exp(-i_dy)};
}

}  // namespace tailbound
