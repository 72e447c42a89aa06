#include "tailbound/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <nlohmann/json.hpp>

#include "tailbound/errors.hpp"
#include "tailbound/montecarlo.hpp"

namespace tailbound {

std::array<const Cell*, 14> SweepRow::cells() const {
  return {&exact,    &chernoff,      &new_lower, &new_alpha,   &new_delta,
          &new_alpha_hat, &stroock,  &stroock_alpha, &bo,      &bo_alpha,
          &saddlepoint, &mc_p_hat,   &mc_ci_lo,  &mc_ci_hi};
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view s, const char* what) {
  const std::string text(trim(s));
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw ArgumentError(std::string("bad ") + what + " '" + text + "'");
  }
  return v;
}

// Probability columns; alpha/delta/y keep their own formatting.
bool is_probability_column(std::size_t col) {
  switch (col) {
    case 1: case 2: case 3: case 7: case 9: case 11: case 12: case 13: case 14:
      return true;
    default:
      return false;
  }
}

std::string format_cell(const Cell& c, bool probability) {
  switch (c.kind) {
    case Cell::Kind::empty:
      return {};
    case Cell::Kind::na:
      return "NA";
    case Cell::Kind::number:
      return probability ? format_probability(c.value) : format_real(c.value);
  }
  return {};
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

MethodSet MethodSet::parse(std::string_view list) {
  MethodSet m{false, false, false, false, false, false, false};
  bool any = false;
  while (true) {
    const auto comma = list.find(',');
    const std::string_view item = trim(list.substr(0, comma));
    if (item == "exact") m.exact = true;
    else if (item == "chernoff") m.chernoff = true;
    else if (item == "new") m.new_lower = true;
    else if (item == "stroock") m.stroock = true;
    else if (item == "bo") m.bo = true;
    else if (item == "saddlepoint") m.saddlepoint = true;
    else if (item == "mc") m.mc = true;
    else if (item == "all") {
      m = MethodSet{};
      m.mc = true;
    } else {
      throw ArgumentError("unknown bound '" + std::string(item) +
                          "' (expected exact, chernoff, new, stroock, bo, saddlepoint, mc, all)");
    }
    any = true;
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (!any) throw ArgumentError("empty --bounds list");
  return m;
}

std::vector<double> linear_grid(double lo, double hi, int steps) {
  if (!(lo < hi)) throw ArgumentError("grid needs min < max");
  if (steps < 2) throw ArgumentError("grid needs at least 2 steps");
  std::vector<double> ys(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    ys[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (steps - 1);
  }
  ys.back() = hi;
  return ys;
}

GridSpec GridSpec::parse(std::string_view text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string_view::npos || text.find(':', c2 + 1) != std::string_view::npos) {
    throw ArgumentError("grid must look like min:max:steps (got '" + std::string(text) + "')");
  }
  GridSpec g;
  g.lo = parse_double(text.substr(0, c1), "grid min");
  g.hi = parse_double(text.substr(c1 + 1, c2 - c1 - 1), "grid max");
  const double steps = parse_double(text.substr(c2 + 1), "grid steps");
  if (steps != std::floor(steps) || steps < 2 || steps > 1e7) {
    throw ArgumentError("grid steps must be an integer >= 2");
  }
  g.steps = static_cast<int>(steps);
  return g;
}

SweepRow compute_row(const SweepConfig& cfg, const CumulantModel& model, std::size_t index,
                     double y) {
  SweepRow row;
  row.y = y;
  const auto& m = cfg.methods;

  if (m.exact) {
    if (auto e = exact_tail(model, y)) row.exact = Cell::number(clamp01(*e));
  }
  if (m.chernoff) row.chernoff = Cell::number(chernoff_upper(model, y));

  if (m.new_lower) {
    const BoundResult r = lower_bound_new(model, y, cfg.new_options);
    row.new_status = r.status;
    row.new_detail = r.detail;
    if (r.ok()) {
      row.new_lower = Cell::number(clamp01(r.value));
      row.new_alpha = Cell::number(*r.alpha_opt);
      row.new_delta = Cell::number(*r.delta_opt);
      if (r.alpha_hat) row.new_alpha_hat = Cell::number(*r.alpha_hat);
    } else if (r.status == BoundStatus::inapplicable || r.status == BoundStatus::infeasible) {
      row.new_lower = Cell::na();
    }
  }
  if (m.stroock) {
    const BoundResult r = stroock_lower(model, y);
    if (r.ok()) {
      row.stroock = Cell::number(clamp01(r.value));
      row.stroock_alpha = Cell::number(*r.alpha_opt);
    } else {
      row.stroock = Cell::na();
      row.stroock_alpha = Cell::na();
    }
  }
  if (m.bo) {
    const BoundResult r = bo_lower(model, y);
    if (r.ok()) {
      row.bo = Cell::number(clamp01(r.value));
      row.bo_alpha = Cell::number(*r.alpha_opt);
    } else {
      row.bo = Cell::na();
      row.bo_alpha = Cell::na();
    }
  }
  if (m.saddlepoint) {
    row.saddlepoint = Cell::number(clamp01(saddlepoint_tail(model, y, cfg.trunc_nats).value));
  }
  if (m.mc && cfg.mc.samples > 0 && cfg.dist.family != Family::custom) {
    const auto est = mc::mc_tail(cfg.dist, mc::substream_seed(cfg.mc.seed, index),
                                 cfg.mc.samples, y, cfg.mc.confidence);
    row.mc_p_hat = Cell::number(est.p_hat);
    row.mc_ci_lo = Cell::number(est.ci_lo);
    row.mc_ci_hi = Cell::number(est.ci_hi);
  }
  return row;
}

std::vector<SweepRow> sweep_serial(const SweepConfig& cfg) {
  const CumulantModel model = make_model(cfg.dist);
  std::vector<SweepRow> rows(cfg.ys.size());
  for (std::size_t i = 0; i < cfg.ys.size(); ++i) rows[i] = compute_row(cfg, model, i, cfg.ys[i]);
  return rows;
}

std::vector<SweepRow> sweep_parallel(const SweepConfig& cfg, int threads) {
  const CumulantModel model = make_model(cfg.dist);
  const auto n = static_cast<std::int64_t>(cfg.ys.size());
  std::vector<SweepRow> rows(cfg.ys.size());
  // Exceptions cannot cross the OpenMP region; keep the first by index.
  std::vector<std::string> errors(cfg.ys.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, threads))
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      rows[k] = compute_row(cfg, model, k, cfg.ys[k]);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw Error(e);
  }
  return rows;
}

std::string format_probability(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", p);
  return buf;
}

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::vector<std::string> format_row(const SweepRow& row) {
  std::vector<std::string> out;
  out.reserve(kSweepColumns.size());
  out.push_back(format_real(row.y));
  const auto cells = row.cells();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out.push_back(format_cell(*cells[i], is_probability_column(i + 1)));
  }
  return out;
}

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::string out;
  for (std::size_t i = 0; i < kSweepColumns.size(); ++i) {
    if (i) out += ',';
    out += csv_quote(std::string(kSweepColumns[i]));
  }
  out += "\r\n";
  for (const auto& row : rows) {
    const auto fields = format_row(row);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += csv_quote(fields[i]);
    }
    out += "\r\n";
  }
  return out;
}

std::string to_json(const std::vector<SweepRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json obj;
    obj["y"] = row.y;
    const auto cells = row.cells();
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string key(kSweepColumns[i + 1]);
      switch (cells[i]->kind) {
        case Cell::Kind::empty: obj[key] = nullptr; break;
        case Cell::Kind::na: obj[key] = "NA"; break;
        case Cell::Kind::number: obj[key] = cells[i]->value; break;
      }
    }
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"' && field.empty()) {
      quoted = true;
      field_started = true;
    } else if (ch == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (ch == '\r' || ch == '\n') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
      field_started = false;
    } else {
      field += ch;
      field_started = true;
    }
  }
  if (quoted) throw ArgumentError("unterminated quoted CSV field");
  if (field_started || !field.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace tailbound
