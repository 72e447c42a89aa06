#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tailbound/bounds.hpp"
#include "tailbound/cumulant_model.hpp"

namespace tailbound {

/// A printed field: a number, "NA" (method inapplicable here) or empty
/// (not available / not requested).
struct Cell {
  enum class Kind { empty, na, number };
  Kind kind = Kind::empty;
  double value = 0.0;

  static Cell number(double v) { return {Kind::number, v}; }
  static Cell na() { return {Kind::na, 0.0}; }
  static Cell empty() { return {}; }
  bool has_value() const { return kind == Kind::number; }
};

inline constexpr std::array<std::string_view, 15> kSweepColumns = {
    "y",        "exact",         "chernoff", "new_lower", "new_alpha",
    "new_delta", "new_alpha_hat", "stroock",  "stroock_alpha", "bo",
    "bo_alpha", "saddlepoint",   "mc_p_hat", "mc_ci_lo",  "mc_ci_hi"};

struct SweepRow {
  double y = 0.0;
  Cell exact, chernoff, new_lower, new_alpha, new_delta, new_alpha_hat;
  Cell stroock, stroock_alpha, bo, bo_alpha, saddlepoint;
  Cell mc_p_hat, mc_ci_lo, mc_ci_hi;
  /// Not printed; lets callers map solver failures to an exit code.
  std::optional<BoundStatus> new_status;
  std::string new_detail;

  std::array<const Cell*, 14> cells() const;
};

/// Which columns to compute. Parsed from "chernoff,new,..." by parse_methods.
struct MethodSet {
  bool exact = true;
  bool chernoff = true;
  bool new_lower = true;
  bool stroock = true;
  bool bo = true;
  bool saddlepoint = true;
  bool mc = false;

  /// Accepts exact, chernoff, new, stroock, bo, saddlepoint, mc, all.
  static MethodSet parse(std::string_view list);
};

struct McSettings {
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double confidence = 0.999;
};

struct SweepConfig {
  DistributionSpec dist;
  std::vector<double> ys;
  MethodSet methods;
  NewBoundOptions new_options;
  double trunc_nats = 40.0;
  McSettings mc;
};

/// Linear grid of `steps` points from lo to hi inclusive. Throws
/// ArgumentError unless lo < hi and steps >= 2.
std::vector<double> linear_grid(double lo, double hi, int steps);

/// "min:max:steps" -> (min, max, steps).
struct GridSpec {
  double lo;
  double hi;
  int steps;
  static GridSpec parse(std::string_view text);
};

/// One row. `index` selects the Monte Carlo substream for this grid point.
SweepRow compute_row(const SweepConfig& cfg, const CumulantModel& model, std::size_t index,
                     double y);

std::vector<SweepRow> sweep_serial(const SweepConfig& cfg);
/// Rows computed on up to `threads` OpenMP threads; identical to sweep_serial.
std::vector<SweepRow> sweep_parallel(const SweepConfig& cfg, int threads);

/// Text fields of a row in column order, as written to CSV.
std::vector<std::string> format_row(const SweepRow& row);

std::string to_csv(const std::vector<SweepRow>& rows);
std::string to_json(const std::vector<SweepRow>& rows);

/// RFC-4180 reader, enough for round-tripping to_csv output.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// Probability formatting used in CSV and eval reports (6 significant digits).
std::string format_probability(double p);
std::string format_real(double x);

}  // namespace tailbound
