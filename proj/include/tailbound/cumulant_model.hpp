#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tailbound {

enum class Family { gamma, exponential, normal, poisson, custom };

std::string_view family_name(Family family);

/// A catalog distribution: family tag plus its parameter vector.
///   gamma:       shape k > 0, scale theta > 0
///   exponential: rate lambda > 0
///   normal:      location m, scale sigma > 0
///   poisson:     rate lambda > 0
struct DistributionSpec {
  Family family = Family::normal;
  std::vector<double> params;

  /// Parses `family:p1,p2`, e.g. `gamma:8,1`, `exp:1`, `normal:0,1`,
  /// `poisson:4`. Parameter ranges are checked by make_model.
  static DistributionSpec parse(std::string_view text);
  std::string to_string() const;
};

struct CumulantValues {
  double k;   // K(xi) = log E[e^{xi X}]
  double k1;  // K'(xi)
  double k2;  // K''(xi)
};

/// Open interval; either end may be infinite.
struct Interval {
  double lo;
  double hi;
  bool contains(double v) const { return v > lo && v < hi; }
};

/// A distribution seen through its cumulant transform K on (-inf, xi_star).
/// Immutable; copies share the evaluator of custom models.
class CumulantModel {
 public:
  using Evaluator = std::function<CumulantValues(double)>;

  /// Model from user-supplied closed forms. `slope_range` is the open range
  /// of K' over the domain. Custom models have no exact tail and no sampler.
  static CumulantModel custom(std::string name, Evaluator eval, double xi_star, double mean,
                              Interval slope_range);

  const std::string& name() const { return name_; }
  Family family() const { return family_; }
  std::span<const double> params() const { return params_; }
  double xi_star() const { return xi_star_; }
  double mean() const { return mean_; }
  Interval slope_range() const { return slope_range_; }

  /// Throws DomainError for xi >= xi_star.
  CumulantValues eval(double xi) const;

  /// The catalog spec this model was built from; empty for custom models.
  std::optional<DistributionSpec> spec() const;

 private:
  friend CumulantModel make_model(const DistributionSpec& spec);
  CumulantModel() = default;

  std::string name_;
  Family family_ = Family::custom;
  std::vector<double> params_;
  double xi_star_ = 0.0;
  double mean_ = 0.0;
  Interval slope_range_{0.0, 0.0};
  // gamma/exponential use (shape_, scale_); normal uses (loc_, scale_);
  // poisson uses rate_.
  double shape_ = 0.0;
  double scale_ = 0.0;
  double loc_ = 0.0;
  double rate_ = 0.0;
  Evaluator custom_;
};

/// Throws ArgumentError naming the offending parameter.
CumulantModel make_model(const DistributionSpec& spec);

inline CumulantValues cumulant_eval(const CumulantModel& model, double xi) {
  return model.eval(xi);
}

/// P(X >= y) in closed form, or nullopt when the model has no formula.
std::optional<double> exact_tail(const CumulantModel& model, double y);

}  // namespace tailbound
