#include "tailbound/special_functions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "tailbound/errors.hpp"

namespace tailbound::special {
namespace {

constexpr double kRelTol = 1e-14;
constexpr int kMaxTerms = 300;

// log of x^a e^{-x} / Gamma(a)
double log_prefactor(double a, double x) {
  return a * std::log(x) - x - std::lgamma(a);
}

double lower_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 0; n < kMaxTerms; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kRelTol) {
      return sum * std::exp(log_prefactor(a, x));
    }
  }
  throw ConvergenceError("incomplete gamma series did not converge for a=" +
                         std::to_string(a) + ", x=" + std::to_string(x));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double upper_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kRelTol;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kRelTol) {
      return std::exp(log_prefactor(a, x)) * h;
    }
  }
  throw ConvergenceError("incomplete gamma continued fraction did not converge for a=" +
                         std::to_string(a) + ", x=" + std::to_string(x));
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0.0)) throw ArgumentError("gamma_q: shape must be positive");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - lower_series(a, x);
  return upper_fraction(a, x);
}

double gamma_p(double a, double x) {
  if (!(a > 0.0)) throw ArgumentError("gamma_p: shape must be positive");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return lower_series(a, x);
  return 1.0 - upper_fraction(a, x);
}

double poisson_series_q(int k, double x) {
  if (k <= 0) return 0.0;
  if (x <= 0.0) return 1.0;
  const double log_x = std::log(x);
  double sum = 0.0;
  for (int j = 0; j < k; ++j) {
    sum += std::exp(-x + j * log_x - std::lgamma(j + 1.0));
  }
  return sum;
}

double poisson_upper_tail(long n, double lambda) {
  if (n <= 0) return 1.0;
  if (lambda <= 0.0) return 0.0;
  const double nd = static_cast<double>(n);
  double term = std::exp(-lambda + nd * std::log(lambda) - std::lgamma(nd + 1.0));
  double sum = term;
  // Terms peak near lambda and decay geometrically past it.
  const long cap = n + 100000;
  for (long j = n; j < cap; ++j) {
    term *= lambda / static_cast<double>(j + 1);
    sum += term;
    if (static_cast<double>(j) > lambda && term <= sum * 1e-17) break;
  }
  return sum > 1.0 ? 1.0 : sum;
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace tailbound::special
