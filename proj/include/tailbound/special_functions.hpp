#pragma once

namespace tailbound::special {

// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
// Power series for x < a + 1, Lentz continued fraction otherwise; both
// iterate to 1e-14 relative with at most 300 terms.
double gamma_q(double a, double x);

// Regularized lower incomplete gamma P(a, x) = 1 - Q(a, x), computed
// without cancellation on whichever side is small.
double gamma_p(double a, double x);

// e^{-x} * sum_{j<k} x^j / j!  (= Q(k, x) for integer k >= 1).
double poisson_series_q(int k, double x);

// P(N >= n) for N ~ Poisson(lambda), summed over the upper tail directly.
double poisson_upper_tail(long n, double lambda);

// 0.5 * erfc(z / sqrt(2)).
double normal_upper_tail(double z);

}  // namespace tailbound::special
