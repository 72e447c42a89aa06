#include "tailbound/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "tailbound/errors.hpp"

namespace tailbound::mc {

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Sampler::Sampler(const DistributionSpec& spec, std::uint64_t seed)
    : spec_(spec), engine_(seed) {
  (void)make_model(spec);  // validates the parameters
}

double Sampler::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

// Marsaglia polar method; the second variate of each pair is cached.
double Sampler::standard_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  has_spare_ = true;
  return u * f;
}

double Sampler::standard_gamma(double shape) {
  if (shape == std::floor(shape) && shape <= 64.0) {
    // Sum of exponentials: -log of a product of uniforms, 16 factors at a time.
    const int k = static_cast<int>(shape);
    double total = 0.0;
    for (int done = 0; done < k;) {
      double prod = 1.0;
      const int chunk = std::min(16, k - done);
      for (int i = 0; i < chunk; ++i) prod *= uniform();
      total -= std::log(prod);
      done += chunk;
    }
    return total;
  }
  if (shape < 1.0) {
    // Gamma(k) = Gamma(k + 1) * U^{1/k}
    const double g = standard_gamma(shape + 1.0);
    return g * std::pow(uniform(), 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze/rejection.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = standard_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Sampler::poisson() {
  const double lambda = spec_.params[0];
  if (lambda <= 30.0) {
    // Sequential inversion of the CDF.
    const double u = uniform();
    double p = std::exp(-lambda);
    double cdf = p;
    double x = 0.0;
    const double cap = lambda + 40.0 * std::sqrt(lambda) + 40.0;
    while (u > cdf && x < cap) {
      x += 1.0;
      p *= lambda / x;
      cdf += p;
    }
    return x;
  }
  // Hormann's transformed rejection (PTRS).
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  while (true) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -lambda + k * loglam - std::lgamma(k + 1.0)) {
      return k;
    }
  }
}

double Sampler::next() {
  const auto& p = spec_.params;
  switch (spec_.family) {
    case Family::gamma:
      return p[1] * standard_gamma(p[0]);
    case Family::exponential:
      return -std::log(uniform()) / p[0];
    case Family::normal:
      return p[0] + p[1] * standard_normal();
    case Family::poisson:
      return poisson();
    case Family::custom:
      break;
  }
  throw ArgumentError("no sampler for custom models");
}

std::vector<double> sample(const DistributionSpec& spec, std::uint64_t seed, std::size_t n) {
  std::vector<double> out;
  out.reserve(n);
  for (std::uint64_t block = 0; out.size() < n; ++block) {
    Sampler s(spec, substream_seed(seed, block));
    const std::size_t take = std::min(kBlockSize, n - out.size());
    for (std::size_t i = 0; i < take; ++i) out.push_back(s.next());
  }
  return out;
}

McEstimate wilson(std::uint64_t hits, std::uint64_t n, double y, double confidence) {
  if (n == 0) throw ArgumentError("empirical tail needs at least one sample");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw ArgumentError("confidence must lie in (0, 1)");
  }
  const double z =
      boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + 0.5 * confidence);
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2n = z * z / nn;
  const double denom = 1.0 + z2n;
  const double center = (p + 0.5 * z2n) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + 0.25 * z2n / nn);

  McEstimate e;
  e.y = y;
  e.n = n;
  e.hits = hits;
  e.p_hat = p;
  e.confidence = confidence;
  e.ci_lo = hits == 0 ? 0.0 : std::clamp(center - half, 0.0, p);
  e.ci_hi = hits == n ? 1.0 : std::clamp(center + half, p, 1.0);
  return e;
}

McEstimate empirical_tail(std::span<const double> samples, double y, double confidence) {
  if (samples.empty()) throw ArgumentError("empirical tail needs at least one sample");
  const auto hits = static_cast<std::uint64_t>(
      std::count_if(samples.begin(), samples.end(), [y](double x) { return x >= y; }));
  return wilson(hits, samples.size(), y, confidence);
}

namespace {

std::uint64_t count_block(const DistributionSpec& spec, std::uint64_t seed, std::size_t n,
                          std::uint64_t block, double y) {
  Sampler s(spec, substream_seed(seed, block));
  const std::size_t begin = block * kBlockSize;
  const std::size_t take = std::min(kBlockSize, n - begin);
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < take; ++i) hits += s.next() >= y ? 1 : 0;
  return hits;
}

}  // namespace

std::uint64_t count_tail_serial(const DistributionSpec& spec, std::uint64_t seed, std::size_t n,
                                double y) {
  const std::uint64_t blocks = (n + kBlockSize - 1) / kBlockSize;
  std::uint64_t hits = 0;
  for (std::uint64_t b = 0; b < blocks; ++b) hits += count_block(spec, seed, n, b, y);
  return hits;
}

std::uint64_t count_tail_parallel(const DistributionSpec& spec, std::uint64_t seed, std::size_t n,
                                  double y, int threads) {
  (void)make_model(spec);
  const auto blocks = static_cast<std::int64_t>((n + kBlockSize - 1) / kBlockSize);
  std::uint64_t hits = 0;
#pragma omp parallel for reduction(+ : hits) schedule(static) num_threads(std::max(1, threads))
  for (std::int64_t b = 0; b < blocks; ++b) {
    hits += count_block(spec, seed, n, static_cast<std::uint64_t>(b), y);
  }
  return hits;
}

McEstimate mc_tail(const DistributionSpec& spec, std::uint64_t seed, std::size_t n, double y,
                   double confidence, int threads) {
  const std::uint64_t hits = threads > 1 ? count_tail_parallel(spec, seed, n, y, threads)
                                         : count_tail_serial(spec, seed, n, y);
  return wilson(hits, n, y, confidence);
}

}  // namespace tailbound::mc
