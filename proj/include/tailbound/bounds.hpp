#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tailbound/cumulant_model.hpp"
#include "tailbound/legendre.hpp"

namespace tailbound {

enum class BoundStatus { ok, inapplicable, infeasible, solver_failure };

std::string_view status_name(BoundStatus status);

struct BoundResult {
  BoundStatus status = BoundStatus::ok;
  /// Raw bound value; meaningful only when status == ok. Not clamped.
  double value = 0.0;
  std::optional<double> alpha_opt;
  std::optional<double> delta_opt;
  /// Feasibility frontier (new bound only).
  std::optional<double> alpha_hat;
  /// Location of the minimum of the optimal-delta curve (new bound only).
  std::optional<double> alpha_check;
  /// Intersection of the optimal-delta and G-root curves, and G there.
  std::optional<double> alpha_cross;
  std::optional<double> g_at_cross;
  int evals = 0;
  std::string detail;
  /// (alpha, log objective) samples kept when the solver fails.
  std::vector<std::pair<double, double>> profile;

  bool ok() const { return status == BoundStatus::ok; }
};

/// One evaluation of the two-parameter objective
///   L = (1 - A - B) exp{-I(alpha y) - Xi(alpha y) y (delta - alpha)}.
/// L is -inf when 1 - A - B <= 0.
struct ObjectiveState {
  double alpha;
  double delta;
  double y;
  double A;
  double B;
  double L;
  double log_L;
  double G;
  double xi_alpha_y;
  double xi_delta_y;

  bool feasible() const { return log_L > -std::numeric_limits<double>::infinity(); }
};

enum class Tail { right, left };

/// exp(-I(y)), clamped to <= 1. Right tail needs y > mean, left y < mean.
double chernoff_upper(const CumulantModel& model, double y, Tail tail = Tail::right);

/// Binds a model to one tail abscissa y > mean and evaluates every piece of
/// the bound formulas there. Xi(y) is solved once at construction.
/// Lower bounds need y > 0 as well (the tilt centers at alpha y > y).
/// Not thread-safe (it counts evaluations); make one per thread.
class TailProblem {
 public:
  TailProblem(const CumulantModel& model, double y);

  const CumulantModel& model() const { return model_; }
  double y() const { return y_; }
  const DualSample& at_y() const { return at_y_; }
  int evals() const { return evals_; }

  DualSample sample(double t) const;

  /// I(alpha y), A and 1 - A for the tilt centered at alpha y.
  struct Tilt {
    DualSample center;
    double i_y;          // I_alpha(y)
    double one_minus_a;  // 1 - A, computed without cancellation
    double a() const { return 1.0 - one_minus_a; }
  };
  Tilt tilt(double alpha) const;

  ObjectiveState objective(double alpha, double delta) const;
  ObjectiveState objective(const Tilt& tilt, double alpha, double delta) const;

  /// (alpha - A) / (1 - A). Throws DegenerateArgumentError when A == 1.
  double delta_star(double alpha) const;
  /// Same, but +inf instead of throwing.
  double delta_star_or_inf(double alpha) const;

  /// G(alpha, delta) = B Xi(delta y) - (1 - A) Xi(alpha y).
  double g(double alpha, double delta) const;

  /// Root of G(alpha, .) to the right of its maximum. Throws ConvergenceError
  /// if no sign change is found before delta = 1e6 alpha.
  double delta_hat(double alpha) const;

  /// A + B_hat - 1 with B_hat taken at delta_star(alpha).
  double frontier_gap(double alpha) const;

  /// log L(alpha, delta_star(alpha)); -inf where infeasible.
  double reduced_objective(double alpha) const;

  /// Log of the Chebyshev-based bound with delta = 2 alpha - 1; -inf where
  /// Xi'(alpha y) y^2 (alpha - 1)^2 <= 1.
  double stroock_objective(double alpha) const;

  /// Log of the Bagdasarov-Ostrovskii bound; -inf where it does not apply.
  double bo_objective(double alpha) const;

  /// delta(alpha) = Xi^{-1}(2 Xi(alpha y) - Xi(y)) / y, or nullopt when
  /// 2 Xi(alpha y) - Xi(y) >= xi*.
  std::optional<double> bo_delta(double alpha) const;

 private:
  bool below_xi_star(double lambda, double xi_a, double xi_1) const;

  CumulantModel model_;
  double y_;
  DualSample at_y_;
  mutable int evals_ = 0;
};

ObjectiveState objective_L(const CumulantModel& model, double alpha, double delta, double y);
double delta_star(const CumulantModel& model, double alpha, double y);
double delta_hat(const CumulantModel& model, double alpha, double y);
std::optional<double> bo_delta(const CumulantModel& model, double alpha, double y);

struct NewBoundOptions {
  double alpha_inset = 1e-6;      // search starts at 1 + alpha_inset
  double frontier_inset = 1e-9;   // and stops at alpha_hat - frontier_inset
  double tol_alpha = 1e-10;
  bool cross_check = true;
};

/// Maximizes L(alpha, delta_star(alpha), y) over the feasible interval
/// (1, alpha_hat) found from the frontier A + B_hat = 1.
BoundResult lower_bound_new(const CumulantModel& model, double y, NewBoundOptions opts = {});

BoundResult stroock_lower(const CumulantModel& model, double y);
BoundResult bo_lower(const CumulantModel& model, double y);

struct SaddlepointResult {
  double value;
  double upper_limit;
  bool accuracy_warning;
};

/// (2 pi)^{-1/2} int_y^T sqrt(Xi'(t)) e^{-I(t)} dt, with T the first point of
/// a geometric grid where I(T) >= I(y) + trunc_nats.
SaddlepointResult saddlepoint_tail(const CumulantModel& model, double y,
                                   double trunc_nats = 40.0, double rel_tol = 1e-10);

}  // namespace tailbound
