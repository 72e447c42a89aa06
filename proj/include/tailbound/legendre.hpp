#pragma once

#include "tailbound/cumulant_model.hpp"

namespace tailbound {

/// The Legendre dual at one abscissa y: xi = Xi(y) solves K'(xi) = y,
/// xi_prime = 1 / K''(Xi(y)) and rate = y Xi(y) - K(Xi(y)).
struct DualPoint {
  double y;
  double xi;
  double xi_prime;
  double rate;
};

/// Rates of the measure tilted so that its mean sits at alpha*y, evaluated
/// at y and delta*y, together with A = e^{-I_alpha(y)}, B = e^{-I_alpha(delta y)}.
struct TiltedRates {
  double alpha;
  double delta;
  double y;
  double I_alpha_y;
  double I_alpha_delta_y;
  double A;
  double B;
};

/// Everything the bound formulas need at one abscissa t: Xi(t), K(Xi(t)),
/// K''(Xi(t)). Solving for Xi is the expensive step, so callers that reuse
/// an abscissa keep one of these around.
struct DualSample {
  double t;
  double xi;
  double k;
  double k2;

  double xi_prime() const { return 1.0 / k2; }
};

/// Root of K'(xi) = y, bracketed then refined by safeguarded false position.
/// Throws RangeError when y is outside the open range of K'.
double xi(const CumulantModel& model, double y);

DualSample dual_sample(const CumulantModel& model, double t);
DualPoint dual_point(const CumulantModel& model, double y);

/// Xi^{-1}(lambda) = K'(lambda). Throws DomainError for lambda >= xi*.
double xi_inverse(const CumulantModel& model, double lambda);

/// I(y) = y Xi(y) - K(Xi(y)); zero at the mean.
double rate(const CumulantModel& model, double y);

/// I_alpha(delta y) = delta y (Xi(delta y) - Xi(alpha y)) + K(Xi(alpha y)) - K(Xi(delta y)).
/// delta = 1 gives I_alpha(y). Requires alpha >= 1, delta > 0, y > mean.
double tilted_rate(const CumulantModel& model, double alpha, double delta, double y);

TiltedRates tilted_pair(const CumulantModel& model, double alpha, double delta, double y);

/// Rate of the measure tilted to mean `center.t`, evaluated at `target.t`.
double tilted_rate_between(const DualSample& center, const DualSample& target);

/// Accepts tiny negative rates produced by cancellation and clamps them to 0;
/// anything beyond 1e-12 (relative to the magnitude of the cancelled terms)
/// throws InternalConsistencyError.
double checked_rate(double raw, double magnitude);

}  // namespace tailbound
