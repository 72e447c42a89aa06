#include "tailbound/cumulant_model.hpp"

#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "tailbound/errors.hpp"
#include "tailbound/special_functions.hpp"

namespace tailbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest representation that round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    char shorter[32];
    std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

void require(bool ok, std::string_view family, std::string_view param, double value,
             std::string_view rule) {
  if (!ok) {
    throw ArgumentError(std::string(family) + " parameter " + std::string(param) + " must be " +
                        std::string(rule) + " (got " + format_number(value) + ")");
  }
}

void require_count(const DistributionSpec& spec, std::size_t n) {
  if (spec.params.size() != n) {
    throw ArgumentError(std::string(family_name(spec.family)) + " expects " + std::to_string(n) +
                        " parameter(s), got " + std::to_string(spec.params.size()));
  }
}

}  // namespace

DomainError::DomainError(double xi, double xi_star)
    : Error("cumulant evaluated outside its domain: xi=" + format_number(xi) +
            " >= xi*=" + format_number(xi_star)),
      xi_(xi),
      xi_star_(xi_star) {}

std::string_view family_name(Family family) {
  switch (family) {
    case Family::gamma: return "gamma";
    case Family::exponential: return "exp";
    case Family::normal: return "normal";
    case Family::poisson: return "poisson";
    case Family::custom: return "custom";
  }
  return "custom";
}

DistributionSpec DistributionSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ArgumentError("distribution spec '" + std::string(text) +
                        "' must have the form family:p1[,p2]");
  }
  const std::string_view tag = text.substr(0, colon);
  DistributionSpec spec;
  if (tag == "gamma") {
    spec.family = Family::gamma;
  } else if (tag == "exp" || tag == "exponential") {
    spec.family = Family::exponential;
  } else if (tag == "normal") {
    spec.family = Family::normal;
  } else if (tag == "poisson") {
    spec.family = Family::poisson;
  } else {
    throw ArgumentError("unknown distribution family '" + std::string(tag) + "'");
  }
  std::string_view rest = text.substr(colon + 1);
  while (true) {
    const auto comma = rest.find(',');
    const std::string field(rest.substr(0, comma));
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (field.empty() || end != field.c_str() + field.size()) {
      throw ArgumentError("bad numeric parameter '" + field + "' in '" + std::string(text) + "'");
    }
    spec.params.push_back(v);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return spec;
}

std::string DistributionSpec::to_string() const {
  std::string out(family_name(family));
  out += ':';
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ',';
    out += format_number(params[i]);
  }
  return out;
}

CumulantModel CumulantModel::custom(std::string name, Evaluator eval, double xi_star, double mean,
                                    Interval slope_range) {
  if (!eval) throw ArgumentError("custom model needs an evaluator");
  if (!(xi_star > 0.0)) throw ArgumentError("custom model needs xi_star > 0");
  CumulantModel m;
  m.name_ = std::move(name);
  m.family_ = Family::custom;
  m.xi_star_ = xi_star;
  m.mean_ = mean;
  m.slope_range_ = slope_range;
  m.custom_ = std::move(eval);
  return m;
}

CumulantModel make_model(const DistributionSpec& spec) {
  CumulantModel m;
  m.family_ = spec.family;
  m.params_ = spec.params;
  m.name_ = spec.to_string();
  switch (spec.family) {
    case Family::gamma: {
      require_count(spec, 2);
      const double k = spec.params[0], theta = spec.params[1];
      require(std::isfinite(k) && k > 0.0, "gamma", "shape k", k, "> 0");
      require(std::isfinite(theta) && theta > 0.0, "gamma", "scale theta", theta, "> 0");
      m.shape_ = k;
      m.scale_ = theta;
      m.xi_star_ = 1.0 / theta;
      m.mean_ = k * theta;
      m.slope_range_ = {0.0, kInf};
      break;
    }
    case Family::exponential: {
      require_count(spec, 1);
      const double lambda = spec.params[0];
      require(std::isfinite(lambda) && lambda > 0.0, "exp", "rate lambda", lambda, "> 0");
      m.shape_ = 1.0;
      m.scale_ = 1.0 / lambda;
      m.rate_ = lambda;
      m.xi_star_ = lambda;
      m.mean_ = 1.0 / lambda;
      m.slope_range_ = {0.0, kInf};
      break;
    }
    case Family::normal: {
      require_count(spec, 2);
      const double loc = spec.params[0], sigma = spec.params[1];
      require(std::isfinite(loc), "normal", "location m", loc, "finite");
      require(std::isfinite(sigma) && sigma > 0.0, "normal", "scale sigma", sigma, "> 0");
      m.loc_ = loc;
      m.scale_ = sigma;
      m.xi_star_ = kInf;
      m.mean_ = loc;
      m.slope_range_ = {-kInf, kInf};
      break;
    }
    case Family::poisson: {
      require_count(spec, 1);
      const double lambda = spec.params[0];
      require(std::isfinite(lambda) && lambda > 0.0, "poisson", "rate lambda", lambda, "> 0");
      m.rate_ = lambda;
      m.xi_star_ = kInf;
      m.mean_ = lambda;
      m.slope_range_ = {0.0, kInf};
      break;
    }
    case Family::custom:
      throw ArgumentError("custom models are built with CumulantModel::custom");
  }
  return m;
}

CumulantValues CumulantModel::eval(double xi) const {
  if (!(xi < xi_star_)) throw DomainError(xi, xi_star_);
  switch (family_) {
    case Family::gamma:
    case Family::exponential: {
      // K = -k log(1 - theta xi)
      const double u = 1.0 - scale_ * xi;
      const double k1 = shape_ * scale_ / u;
      return {-shape_ * std::log1p(-scale_ * xi), k1, k1 * scale_ / u};
    }
    case Family::normal: {
      const double s2 = scale_ * scale_;
      return {loc_ * xi + 0.5 * s2 * xi * xi, loc_ + s2 * xi, s2};
    }
    case Family::poisson: {
      const double e = std::exp(xi);
      return {rate_ * std::expm1(xi), rate_ * e, rate_ * e};
    }
    case Family::custom:
      return custom_(xi);
  }
  return custom_(xi);
}

std::optional<DistributionSpec> CumulantModel::spec() const {
  if (family_ == Family::custom) return std::nullopt;
  return DistributionSpec{family_, params_};
}

std::optional<double> exact_tail(const CumulantModel& model, double y) {
  const auto p = model.params();
  switch (model.family()) {
    case Family::gamma: {
      if (y <= 0.0) return 1.0;
      const double k = p[0], x = y / p[1];
      if (k == std::floor(k) && k <= 64.0) {
        return special::poisson_series_q(static_cast<int>(k), x);
      }
      return special::gamma_q(k, x);
    }
    case Family::exponential:
      return y <= 0.0 ? 1.0 : std::exp(-p[0] * y);
    case Family::normal:
      return special::normal_upper_tail((y - p[0]) / p[1]);
    case Family::poisson: {
      if (y <= 0.0) return 1.0;
      return special::poisson_upper_tail(static_cast<long>(std::ceil(y)), p[0]);
    }
    case Family::custom:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace tailbound
