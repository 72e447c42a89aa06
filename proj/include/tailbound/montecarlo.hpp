#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "tailbound/cumulant_model.hpp"

namespace tailbound::mc {

/// Samples are produced in fixed-size blocks; block b of a stream seeded
/// with s is drawn from its own engine seeded with substream_seed(s, b).
/// Splitting work by block therefore cannot change the stream.
inline constexpr std::size_t kBlockSize = std::size_t{1} << 16;

/// SplitMix64 finalizer over (seed, index).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

/// Draws from one catalog distribution. Uniforms come from mt19937_64 and
/// every transform is implemented here, so streams are identical across
/// standard libraries.
class Sampler {
 public:
  Sampler(const DistributionSpec& spec, std::uint64_t seed);

  double next();

 private:
  double uniform();  // in (0, 1)
  double standard_normal();
  double standard_gamma(double shape);
  double poisson();

  DistributionSpec spec_;
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// The first n values of the stream for (spec, seed).
std::vector<double> sample(const DistributionSpec& spec, std::uint64_t seed, std::size_t n);

struct McEstimate {
  double y = 0.0;
  std::uint64_t n = 0;
  std::uint64_t hits = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double confidence = 0.999;
};

/// Wilson score interval for hits out of n at the given two-sided level.
McEstimate wilson(std::uint64_t hits, std::uint64_t n, double y, double confidence);

/// Fraction of samples >= y with its Wilson interval. Throws ArgumentError
/// for an empty sample or a confidence outside (0, 1).
McEstimate empirical_tail(std::span<const double> samples, double y, double confidence = 0.999);

/// Streams n samples without storing them and counts those >= y.
std::uint64_t count_tail_serial(const DistributionSpec& spec, std::uint64_t seed, std::size_t n,
                                double y);

/// Same count, blocks distributed over OpenMP threads. Equal to the serial
/// count for every thread count.
std::uint64_t count_tail_parallel(const DistributionSpec& spec, std::uint64_t seed, std::size_t n,
                                  double y, int threads);

McEstimate mc_tail(const DistributionSpec& spec, std::uint64_t seed, std::size_t n, double y,
                   double confidence = 0.999, int threads = 1);

}  // namespace tailbound::mc
