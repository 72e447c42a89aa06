#include "tailbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "tailbound/errors.hpp"
#include "tailbound/numerics.hpp"

namespace tailbound {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

// Golden-section bracket used by the dense-scan searches.
constexpr int kScanPoints = 2048;
constexpr double kScanTop = 16.0;

double scan_alpha(int i) { return std::pow(kScanTop, static_cast<double>(i) / kScanPoints); }

// Dense log-spaced scan on (1, 16] followed by golden refinement between the
// neighbours of the best point. Used for the comparison bounds, whose
// objectives are not known to be unimodal.
template <class F>
BoundResult scan_and_refine(F&& log_objective, const char* what) {
  BoundResult out;
  int best = -1;
  double best_log = kNegInf;
  for (int i = 1; i <= kScanPoints; ++i) {
    const double v = log_objective(scan_alpha(i));
    ++out.evals;
    if (v > best_log) {
      best_log = v;
      best = i;
    }
  }
  if (best < 0) {
    out.status = BoundStatus::inapplicable;
    out.detail = std::string(what) + " is inapplicable for every alpha in (1, 16]";
    return out;
  }
  const double lo = best == 1 ? 1.0 + 1e-9 : scan_alpha(best - 1);
  const double hi = best == kScanPoints ? kScanTop : scan_alpha(best + 1);
  double alpha = scan_alpha(best);
  if (lo < hi) {
    const auto refined =
        numerics::maximize_unimodal(log_objective, numerics::OptimBracket{lo, hi, 1e-10, 200});
    out.evals += refined.evals;
    if (refined.fx > best_log) {
      best_log = refined.fx;
      alpha = refined.x;
    }
  }
  out.status = BoundStatus::ok;
  out.alpha_opt = alpha;
  out.value = std::exp(best_log);
  return out;
}

void require_above_mean(const CumulantModel& model, double y) {
  if (!(y > model.mean())) {
    throw ArgumentError("y must exceed the mean (" + fmt(model.mean()) + ")");
  }
}

}  // namespace

std::string_view status_name(BoundStatus status) {
  switch (status) {
    case BoundStatus::ok: return "ok";
    case BoundStatus::inapplicable: return "inapplicable";
    case BoundStatus::infeasible: return "infeasible";
    case BoundStatus::solver_failure: return "solver_failure";
  }
  return "solver_failure";
}

double chernoff_upper(const CumulantModel& model, double y, Tail tail) {
  if (tail == Tail::right && !(y > model.mean())) {
    throw ArgumentError("right-tail bound requires y above the mean (" + fmt(model.mean()) + ")");
  }
  if (tail == Tail::left && !(y < model.mean())) {
    throw ArgumentError("left-tail bound requires y below the mean (" + fmt(model.mean()) + ")");
  }
  return std::min(1.0, std::exp(-rate(model, y)));
}

// ---------------------------------------------------------------------------
// TailProblem

TailProblem::TailProblem(const CumulantModel& model, double y)
    : model_(model), y_(y), at_y_{} {
  require_above_mean(model_, y);
  if (!(y > 0.0)) throw ArgumentError("lower bounds require y > 0");
  at_y_ = dual_sample(model_, y);
}

DualSample TailProblem::sample(double t) const {
  ++evals_;
  return dual_sample(model_, t);
}

TailProblem::Tilt TailProblem::tilt(double alpha) const {
  if (alpha == 1.0) return {at_y_, 0.0, 0.0};
  const DualSample center = sample(alpha * y_);
  const double i_y = tilted_rate_between(center, at_y_);
  return {center, i_y, -std::expm1(-i_y)};
}

ObjectiveState TailProblem::objective(const Tilt& t, double alpha, double delta) const {
  const DualSample& c = t.center;
  const DualSample d = delta == alpha ? c : sample(delta * y_);
  const double i_dy = delta == alpha ? 0.0 : tilted_rate_between(c, d);
  const double b = std::exp(-i_dy);
  const double at = alpha * y_;
  const double i_mu = checked_rate(at * c.xi - c.k, std::abs(at * c.xi) + std::abs(c.k));

  ObjectiveState s{};
  s.alpha = alpha;
  s.delta = delta;
  s.y = y_;
  s.A = t.a();
  s.B = b;
  s.xi_alpha_y = c.xi;
  s.xi_delta_y = d.xi;
  s.G = b * d.xi - t.one_minus_a * c.xi;
  const double slack = t.one_minus_a - b;  // 1 - A - B
  if (slack > 0.0) {
    s.log_L = std::log(slack) - i_mu - c.xi * y_ * (delta - alpha);
    s.L = std::exp(s.log_L);
  } else {
    s.log_L = kNegInf;
    s.L = kNegInf;
  }
  return s;
}

ObjectiveState TailProblem::objective(double alpha, double delta) const {
  return objective(tilt(alpha), alpha, delta);
}

double TailProblem::delta_star_or_inf(double alpha) const {
  const Tilt t = tilt(alpha);
  if (!(t.one_minus_a > 0.0)) return kInf;
  // (alpha - A) / (1 - A) rewritten as alpha + A (alpha - 1) / (1 - A).
  return alpha + t.a() * (alpha - 1.0) / t.one_minus_a;
}

double TailProblem::delta_star(double alpha) const {
  if (!(alpha >= 1.0)) throw ArgumentError("delta_star requires alpha >= 1");
  const double d = delta_star_or_inf(alpha);
  if (!std::isfinite(d)) {
    throw DegenerateArgumentError("A(alpha, y) == 1 at alpha=" + fmt(alpha) +
                                  "; the optimal delta is unbounded");
  }
  return d;
}

double TailProblem::g(double alpha, double delta) const {
  return objective(alpha, delta).G;
}

double TailProblem::delta_hat(double alpha) const {
  if (!(alpha > 1.0)) throw ArgumentError("delta_hat requires alpha > 1");
  const Tilt t = tilt(alpha);
  auto g_of = [&](double delta) { return objective(t, alpha, delta).G; };

  // Expand right by doubling until G turns negative.
  double inside = alpha;
  double outside = 2.0 * alpha;
  double g_out = g_of(outside);
  while (!(g_out < 0.0)) {
    inside = outside;
    outside *= 2.0;
    if (outside > 1e6 * alpha) {
      throw ConvergenceError("delta_hat: G(" + fmt(alpha) + ", .) keeps its sign up to delta=" +
                             fmt(outside));
    }
    g_out = g_of(outside);
  }
  // Start the bracket at the maximizer of G (it is unimodal in delta).
  const auto peak = numerics::maximize_unimodal(
      g_of, numerics::OptimBracket{alpha, outside, 1e-8 * alpha, 200});
  double lo = inside;
  double g_lo = g_of(inside);
  if (peak.x > lo && peak.fx > 0.0) {
    lo = peak.x;
    g_lo = peak.fx;
  }
  numerics::RootOptions opts;
  opts.tol_f = 1e-13;
  opts.tol_x = 1e-14 * outside;
  return numerics::find_root(g_of, numerics::RootBracket::from_values(lo, outside, g_lo, g_out,
                                                                      opts));
}

double TailProblem::frontier_gap(double alpha) const {
  const Tilt t = tilt(alpha);
  if (!(t.one_minus_a > 0.0)) return 0.0;
  const double ds = alpha + t.a() * (alpha - 1.0) / t.one_minus_a;
  const DualSample d = sample(ds * y_);
  const double b_hat = std::exp(-tilted_rate_between(t.center, d));
  return b_hat - t.one_minus_a;
}

double TailProblem::reduced_objective(double alpha) const {
  const Tilt t = tilt(alpha);
  if (!(t.one_minus_a > 0.0)) return kNegInf;
  const double ds = alpha + t.a() * (alpha - 1.0) / t.one_minus_a;
  return objective(t, alpha, ds).log_L;
}

double TailProblem::stroock_objective(double alpha) const {
  if (!(alpha > 1.0)) return kNegInf;
  if (!model_.slope_range().contains((2.0 * alpha - 1.0) * y_)) return kNegInf;
  const DualSample c = sample(alpha * y_);
  const double spread = c.xi_prime() * y_ * y_ * (alpha - 1.0) * (alpha - 1.0);
  if (!(spread > 1.0)) return kNegInf;
  const double at = alpha * y_;
  const double i_mu = checked_rate(at * c.xi - c.k, std::abs(at * c.xi) + std::abs(c.k));
  return std::log1p(-1.0 / spread) - i_mu - c.xi * y_ * (alpha - 1.0);
}

// 2 Xi(alpha y) - Xi(y) carries the rounding of two solves; within that of
// xi* it is treated as reaching the pole (exp(1) at alpha = 2 is exactly there).
bool TailProblem::below_xi_star(double lambda, double xi_a, double xi_1) const {
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                       (2.0 * std::abs(xi_a) + std::abs(xi_1));
  return lambda < model_.xi_star() - noise;
}

std::optional<double> TailProblem::bo_delta(double alpha) const {
  const DualSample c = sample(alpha * y_);
  const double lambda = 2.0 * c.xi - at_y_.xi;
  if (!below_xi_star(lambda, c.xi, at_y_.xi)) return std::nullopt;
  return model_.eval(lambda).k1 / y_;
}

double TailProblem::bo_objective(double alpha) const {
  if (!(alpha > 1.0)) return kNegInf;
  const DualSample c = sample(alpha * y_);
  const double lambda = 2.0 * c.xi - at_y_.xi;
  if (!below_xi_star(lambda, c.xi, at_y_.xi)) return kNegInf;
  // Xi(delta y) = lambda by construction, so no extra solve is needed.
  const CumulantValues kv = model_.eval(lambda);
  const DualSample d{kv.k1, lambda, kv.k, kv.k2};
  const double delta = kv.k1 / y_;
  const double i_y = tilted_rate_between(c, at_y_);
  const double i_dy = tilted_rate_between(c, d);
  const double a = std::exp(-i_y), b = std::exp(-i_dy);
  if (!(-std::expm1(-i_y) - b > 0.0)) return kNegInf;
  const double weight = c.xi / (c.xi - at_y_.xi);
  const double numerator = 1.0 - weight * (a + b);
  if (!(numerator > 0.0)) return kNegInf;
  const double at = alpha * y_;
  const double i_mu = checked_rate(at * c.xi - c.k, std::abs(at * c.xi) + std::abs(c.k));
  return std::log(numerator) - i_mu - c.xi * y_ * (delta - alpha);
}

// ---------------------------------------------------------------------------
// Free-function surface

ObjectiveState objective_L(const CumulantModel& model, double alpha, double delta, double y) {
  if (!(alpha > 1.0 && delta > alpha)) {
    throw ArgumentError("objective requires 1 < alpha < delta");
  }
  return TailProblem(model, y).objective(alpha, delta);
}

double delta_star(const CumulantModel& model, double alpha, double y) {
  return TailProblem(model, y).delta_star(alpha);
}

double delta_hat(const CumulantModel& model, double alpha, double y) {
  return TailProblem(model, y).delta_hat(alpha);
}

std::optional<double> bo_delta(const CumulantModel& model, double alpha, double y) {
  return TailProblem(model, y).bo_delta(alpha);
}

namespace {

BoundResult solver_failure(const TailProblem& p, const std::string& why, double lo, double hi) {
  BoundResult out;
  out.status = BoundStatus::solver_failure;
  out.detail = why;
  constexpr int kProfile = 64;
  for (int i = 0; i <= kProfile; ++i) {
    const double a = lo + (hi - lo) * i / kProfile;
    double v = kNegInf;
    try {
      v = p.reduced_objective(a);
    } catch (const Error&) {
    }
    out.profile.emplace_back(a, v);
  }
  out.evals = p.evals();
  return out;
}

}  // namespace

BoundResult lower_bound_new(const CumulantModel& model, double y, NewBoundOptions opts) {
  if (!(y > 0.0) && y > model.mean()) {
    BoundResult out;
    out.status = BoundStatus::inapplicable;
    out.detail = "the tilt construction needs y > 0";
    return out;
  }
  const TailProblem p(model, y);
  const double alpha_lo = 1.0 + opts.alpha_inset;

  try {
    // 1. Minimum of the (quasiconvex) optimal-delta curve.
    double alpha_hi = 0.0;
    {
      double prev2 = kInf, prev1 = kInf;
      int rising = 0;
      for (int j = 0; j <= 60; ++j) {
        alpha_hi = 1.0 + std::ldexp(1.0, j);
        const double d = p.delta_star_or_inf(alpha_hi);
        rising = (d > prev1) ? rising + 1 : 0;
        prev2 = prev1;
        prev1 = d;
        if (rising >= 2 && prev2 < kInf) break;
      }
      if (rising < 2) {
        return solver_failure(p, "optimal-delta curve never turned upward", alpha_lo, alpha_hi);
      }
    }
    const auto check = numerics::maximize_unimodal(
        [&](double a) { return -p.delta_star_or_inf(a); },
        numerics::OptimBracket{alpha_lo, alpha_hi, 1e-9, 300});
    const double alpha_check = check.x;

    // 2. Feasibility frontier: A + B_hat - 1 changes sign on (1, alpha_check].
    double lo = alpha_lo;
    double gap_lo = p.frontier_gap(lo);
    for (int m = 1; !(gap_lo < 0.0) && m <= 6; ++m) {
      lo = 1.0 + opts.alpha_inset * std::pow(10.0, m);
      if (lo >= alpha_check) break;
      gap_lo = p.frontier_gap(lo);
    }
    if (!(gap_lo < 0.0)) {
      return solver_failure(p, "no feasible alpha near 1 (A + B_hat >= 1)", alpha_lo,
                            alpha_check);
    }
    double hi = alpha_check;
    double gap_hi = p.frontier_gap(hi);
    std::string note;
    for (int m = 0; !(gap_hi > 0.0) && m < 40; ++m) {
      hi *= 1.5;
      gap_hi = p.frontier_gap(hi);
    }
    if (!(gap_hi > 0.0)) {
      return solver_failure(p, "feasibility frontier not bracketed", lo, hi);
    }
    if (hi != alpha_check) note = "frontier found beyond the optimal-delta minimum; ";
    numerics::RootOptions ropts;
    // Near alpha = 1 the gap itself is ~1e-12, so only the width criterion
    // is meaningful.
    ropts.tol_f = 0.0;
    ropts.tol_x = 1e-14 * hi;
    const double alpha_hat = numerics::find_root(
        [&](double a) { return p.frontier_gap(a); },
        numerics::RootBracket::from_values(lo, hi, gap_lo, gap_hi, ropts));

    // 3. Golden-section maximization of log L_hat on the feasible interval.
    const double top = alpha_hat - opts.frontier_inset;
    if (!(top > lo)) {
      return solver_failure(p, "feasible interval is empty after insets", lo, alpha_hat);
    }
    const auto best = numerics::maximize_unimodal(
        [&](double a) { return p.reduced_objective(a); },
        numerics::OptimBracket{lo, top, opts.tol_alpha, 300});
    if (!std::isfinite(best.fx)) {
      return solver_failure(p, "reduced objective infeasible on (1, alpha_hat)", lo, top);
    }

    BoundResult out;
    out.status = BoundStatus::ok;
    out.value = std::exp(best.fx);
    out.alpha_opt = best.x;
    out.delta_opt = p.delta_star(best.x);
    out.alpha_hat = alpha_hat;
    out.alpha_check = alpha_check;
    out.detail = note;

    // 4. Cross-check: where the optimal-delta curve meets the root of G.
    if (opts.cross_check) {
      try {
        auto gap = [&](double a) { return p.delta_star_or_inf(a) - p.delta_hat(a); };
        double a = 1.0 + 0.5 * (best.x - 1.0);
        double b = best.x + 0.5 * (top - best.x);
        double ga = gap(a), gb = gap(b);
        for (int m = 0; !(ga > 0.0) && m < 30 && a > lo; ++m) {
          a = std::max(lo, 1.0 + 0.5 * (a - 1.0));
          ga = gap(a);
        }
        if (!(gb < 0.0) && b < top) {
          b = top;
          gb = gap(b);
        }
        numerics::RootOptions copts;
        copts.tol_f = 1e-12;
        copts.tol_x = 1e-13 * b;
        const double cross =
            numerics::find_root(gap, numerics::RootBracket::from_values(a, b, ga, gb, copts));
        out.alpha_cross = cross;
        out.g_at_cross = p.g(cross, p.delta_hat(cross));
      } catch (const Error& e) {
        out.detail += std::string("cross-check failed: ") + e.what();
      }
    }
    out.evals = p.evals();
    return out;
  } catch (const ConvergenceError& e) {
    return solver_failure(p, e.what(), alpha_lo, 2.0);
  } catch (const BracketError& e) {
    return solver_failure(p, e.what(), alpha_lo, 2.0);
  } catch (const InternalConsistencyError& e) {
    return solver_failure(p, e.what(), alpha_lo, 2.0);
  }
}

BoundResult stroock_lower(const CumulantModel& model, double y) {
  if (!(y > 0.0) && y > model.mean()) {
    BoundResult out;
    out.status = BoundStatus::inapplicable;
    out.detail = "the tilt construction needs y > 0";
    return out;
  }
  const TailProblem p(model, y);
  BoundResult out =
      scan_and_refine([&](double a) { return p.stroock_objective(a); }, "Stroock bound");
  if (out.ok()) out.delta_opt = 2.0 * *out.alpha_opt - 1.0;
  out.evals = p.evals();
  return out;
}

BoundResult bo_lower(const CumulantModel& model, double y) {
  if (!(y > 0.0) && y > model.mean()) {
    BoundResult out;
    out.status = BoundStatus::inapplicable;
    out.detail = "the tilt construction needs y > 0";
    return out;
  }
  const TailProblem p(model, y);
  BoundResult out = scan_and_refine([&](double a) { return p.bo_objective(a); }, "B-O bound");
  if (out.ok()) out.delta_opt = p.bo_delta(*out.alpha_opt);
  out.evals = p.evals();
  return out;
}

SaddlepointResult saddlepoint_tail(const CumulantModel& model, double y, double trunc_nats,
                                   double rel_tol) {
  require_above_mean(model, y);
  if (!(trunc_nats > 0.0)) throw ArgumentError("truncation threshold must be positive");
  const double base = rate(model, y);

  // Truncation point: first T = y + step 2^k with I(T) >= I(y) + trunc_nats.
  const double step =
      std::max(y - model.mean(), std::sqrt(model.eval(0.0).k2)) / 8.0;
  const double cap = y + 1e6 * std::max(1.0, std::abs(y));
  bool warning = false;
  double upper = y + step;
  while (true) {
    if (upper > cap) {
      upper = cap;
      warning = true;
      break;
    }
    if (!model.slope_range().contains(upper)) {
      upper = std::nextafter(model.slope_range().hi, y);
      warning = true;
      break;
    }
    if (rate(model, upper) >= base + trunc_nats) break;
    upper = y + 2.0 * (upper - y);
  }

  auto integrand = [&](double t) {
    const DualPoint d = dual_point(model, t);
    return std::sqrt(d.xi_prime) * std::exp(-(d.rate - base));
  };
  const auto q = numerics::integrate_adaptive(integrand, y, upper, rel_tol);
  const double value = q.value * std::exp(-base) / std::sqrt(2.0 * std::numbers::pi);
  return {value, upper, warning || q.accuracy_warning};
}

}  // namespace tailbound
