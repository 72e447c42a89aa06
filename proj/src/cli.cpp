#include "tailbound/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tailbound/bounds.hpp"
#include "tailbound/errors.hpp"
#include "tailbound/montecarlo.hpp"
#include "tailbound/sweep.hpp"

namespace tailbound::cli {

namespace {

struct Options {
  std::string dist;
  std::string y;
  std::string bounds;
  std::string format;
  std::string out;
  double tol = 1e-10;
  double trunc_nats = 40.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double confidence = 0.999;
  int parallel = 1;
};

double parse_y(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ArgumentError("bad --y value '" + text + "'");
  return v;
}

void require_above_mean(const CumulantModel& model, double y) {
  if (!(y > model.mean())) {
    std::ostringstream s;
    s << "y must exceed the mean (" << model.mean() << ")";
    throw ArgumentError(s.str());
  }
}

void check_common(const Options& o) {
  if (!(o.tol > 0.0)) throw ArgumentError("--tol must be > 0");
  if (!(o.trunc_nats > 0.0)) throw ArgumentError("--trunc-nats must be > 0");
  if (!(o.confidence > 0.0 && o.confidence < 1.0)) {
    throw ArgumentError("--confidence must lie in (0, 1)");
  }
  if (o.parallel < 1) throw ArgumentError("--parallel must be >= 1");
}

// Writes to --out or to `out`; false when the file cannot be written.
bool emit(const Options& o, const std::string& text, std::ostream& out, std::ostream& err) {
  if (o.out.empty() || o.out == "-") {
    out << text;
    out.flush();
    return true;
  }
  std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
  if (f) f << text;
  if (f) f.flush();
  if (!f) {
    err << "error: cannot write output file '" << o.out << "'\n";
    return false;
  }
  return true;
}

std::string cell_text(const Cell& c, bool probability) {
  switch (c.kind) {
    case Cell::Kind::empty: return "";
    case Cell::Kind::na: return "NA";
    case Cell::Kind::number:
      return probability ? format_probability(c.value) : format_real(c.value);
  }
  return "";
}

nlohmann::ordered_json cell_json(const Cell& c) {
  switch (c.kind) {
    case Cell::Kind::empty: return nullptr;
    case Cell::Kind::na: return "NA";
    case Cell::Kind::number: return c.value;
  }
  return nullptr;
}

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
  check_common(o);
  const DistributionSpec spec = DistributionSpec::parse(o.dist);
  const CumulantModel model = make_model(spec);
  const double y = parse_y(o.y);
  require_above_mean(model, y);

  SweepConfig cfg;
  cfg.dist = spec;
  cfg.ys = {y};
  if (!o.bounds.empty()) cfg.methods = MethodSet::parse(o.bounds);
  cfg.methods.mc = false;
  cfg.new_options.tol_alpha = o.tol;
  cfg.trunc_nats = o.trunc_nats;
  const SweepRow row = compute_row(cfg, model, 0, y);

  // Diagnostics that do not fit a sweep row.
  std::optional<BoundResult> nb;
  if (cfg.methods.new_lower) nb = lower_bound_new(model, y, cfg.new_options);
  std::optional<SaddlepointResult> sp;
  if (cfg.methods.saddlepoint) sp = saddlepoint_tail(model, y, o.trunc_nats);

  const std::string format = o.format.empty() ? "text" : o.format;
  std::ostringstream s;
  if (format == "json") {
    nlohmann::ordered_json j;
    j["dist"] = spec.to_string();
    j["y"] = y;
    j["mean"] = model.mean();
    const auto cells = row.cells();
    for (std::size_t i = 0; i < cells.size(); ++i) {
      j[std::string(kSweepColumns[i + 1])] = cell_json(*cells[i]);
    }
    if (nb) {
      j["new_status"] = std::string(status_name(nb->status));
      j["new_alpha_check"] = opt_json(nb->alpha_check);
      j["new_alpha_cross"] = opt_json(nb->alpha_cross);
      j["new_g_at_cross"] = opt_json(nb->g_at_cross);
      j["new_evals"] = nb->evals;
      j["new_detail"] = nb->detail;
    }
    if (sp) {
      j["saddlepoint_upper_limit"] = sp->upper_limit;
      j["saddlepoint_accuracy_warning"] = sp->accuracy_warning;
    }
    s << j.dump(2) << "\n";
  } else if (format == "csv") {
    s << to_csv({row});
  } else if (format == "text") {
    auto line = [&](std::string_view key, const std::string& value) {
      s << key;
      for (std::size_t i = key.size(); i < 24; ++i) s << ' ';
      s << value << "\n";
    };
    line("dist", spec.to_string());
    line("y", format_real(y));
    line("mean", format_real(model.mean()));
    const auto cells = row.cells();
    const bool prob[] = {true, true, true, false, false, false, true,
                         false, true, false, true, true, true, true};
    for (std::size_t i = 0; i < 11; ++i) {
      line(kSweepColumns[i + 1], cell_text(*cells[i], prob[i]));
    }
    if (nb) {
      line("new_status", std::string(status_name(nb->status)));
      line("new_alpha_check", nb->alpha_check ? format_real(*nb->alpha_check) : "");
      line("new_alpha_cross", nb->alpha_cross ? format_real(*nb->alpha_cross) : "");
      line("new_g_at_cross", nb->g_at_cross ? format_real(*nb->g_at_cross) : "");
      line("new_evals", std::to_string(nb->evals));
      if (!nb->detail.empty()) line("new_detail", nb->detail);
    }
    if (sp) {
      line("saddlepoint_upper", format_real(sp->upper_limit));
      if (sp->accuracy_warning) line("saddlepoint_warning", "quadrature depth cap reached");
    }
  } else {
    throw ArgumentError("--format must be text, csv or json for eval");
  }

  if (!emit(o, s.str(), out, err)) return kExitOutput;
  if (nb && nb->status == BoundStatus::solver_failure) {
    err << "error: new lower bound solver failed: " << nb->detail << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

int cmd_sweep(const Options& o, bool samples_given, std::ostream& out, std::ostream& err) {
  check_common(o);
  const DistributionSpec spec = DistributionSpec::parse(o.dist);
  const CumulantModel model = make_model(spec);
  const GridSpec grid = GridSpec::parse(o.y);
  require_above_mean(model, grid.lo);

  SweepConfig cfg;
  cfg.dist = spec;
  cfg.ys = linear_grid(grid.lo, grid.hi, grid.steps);
  if (!o.bounds.empty()) {
    cfg.methods = MethodSet::parse(o.bounds);
  } else {
    cfg.methods.mc = samples_given;
  }
  cfg.new_options.tol_alpha = o.tol;
  cfg.trunc_nats = o.trunc_nats;
  if (cfg.methods.mc) {
    cfg.mc.samples = samples_given ? o.samples : 100000;
    if (cfg.mc.samples < 100) throw ArgumentError("--samples must be >= 100");
    cfg.mc.seed = o.seed;
    cfg.mc.confidence = o.confidence;
  }

  const std::string format = o.format.empty() ? "csv" : o.format;
  if (format != "csv" && format != "json") throw ArgumentError("--format must be csv or json");

  const auto rows = o.parallel > 1 ? sweep_parallel(cfg, o.parallel) : sweep_serial(cfg);
  const std::string text = format == "csv" ? to_csv(rows) : to_json(rows);
  if (!emit(o, text, out, err)) return kExitOutput;

  for (const auto& r : rows) {
    if (r.new_status == BoundStatus::solver_failure) {
      err << "error: new lower bound solver failed at y=" << format_real(r.y) << ": "
          << r.new_detail << "\n";
      return kExitSolver;
    }
  }
  return kExitOk;
}

int cmd_mc(const Options& o, std::ostream& out, std::ostream& err) {
  check_common(o);
  const DistributionSpec spec = DistributionSpec::parse(o.dist);
  const CumulantModel model = make_model(spec);
  const double y = parse_y(o.y);
  if (o.samples < 100) throw ArgumentError("--samples must be >= 100");

  const mc::McEstimate est = mc::mc_tail(spec, o.seed, o.samples, y, o.confidence, o.parallel);
  const auto exact = exact_tail(model, y);

  std::optional<double> upper, lower;
  std::string lower_status = "n/a";
  bool solver_failed = false;
  if (y > model.mean()) {
    upper = chernoff_upper(model, y);
    const BoundResult nb = lower_bound_new(model, y, NewBoundOptions{.tol_alpha = o.tol});
    lower_status = std::string(status_name(nb.status));
    if (nb.ok()) lower = nb.value;
    solver_failed = nb.status == BoundStatus::solver_failure;
  }
  const std::string upper_verdict = upper ? (est.ci_lo <= *upper ? "pass" : "fail") : "n/a";
  const std::string lower_verdict = lower ? (est.ci_hi >= *lower ? "pass" : "fail") : "n/a";

  const std::string format = o.format.empty() ? "text" : o.format;
  std::ostringstream s;
  if (format == "json") {
    nlohmann::ordered_json j;
    j["dist"] = spec.to_string();
    j["y"] = y;
    j["samples"] = est.n;
    j["seed"] = o.seed;
    j["confidence"] = est.confidence;
    j["hits"] = est.hits;
    j["p_hat"] = est.p_hat;
    j["ci_lo"] = est.ci_lo;
    j["ci_hi"] = est.ci_hi;
    j["exact"] = opt_json(exact);
    j["chernoff"] = opt_json(upper);
    j["new_lower"] = opt_json(lower);
    j["new_status"] = lower_status;
    j["upper_consistent"] = upper_verdict;
    j["lower_consistent"] = lower_verdict;
    s << j.dump(2) << "\n";
  } else if (format == "text") {
    auto line = [&](std::string_view key, const std::string& value) {
      s << key;
      for (std::size_t i = key.size(); i < 20; ++i) s << ' ';
      s << value << "\n";
    };
    line("dist", spec.to_string());
    line("y", format_real(y));
    line("samples", std::to_string(est.n));
    line("seed", std::to_string(o.seed));
    line("confidence", format_real(est.confidence));
    line("hits", std::to_string(est.hits));
    line("p_hat", format_probability(est.p_hat));
    line("ci_lo", format_probability(est.ci_lo));
    line("ci_hi", format_probability(est.ci_hi));
    line("exact", exact ? format_probability(*exact) : "");
    line("chernoff", upper ? format_probability(*upper) : "");
    line("new_lower", lower ? format_probability(*lower) : "");
    line("new_status", lower_status);
    line("upper_consistent", upper_verdict + " (ci_lo <= chernoff)");
    line("lower_consistent", lower_verdict + " (ci_hi >= new_lower)");
  } else {
    throw ArgumentError("--format must be text or json for mc");
  }
  if (!emit(o, s.str(), out, err)) return kExitOutput;
  return solver_failed ? kExitSolver : kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tail probability bounds from the cumulant generating function"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool grid) {
    sub->add_option("--dist", o.dist, "gamma:k,theta | exp:lambda | normal:m,sigma | poisson:lambda")
        ->required();
    sub->add_option("--y", o.y, grid ? "grid min:max:steps" : "tail abscissa")->required();
    sub->add_option("--out", o.out, "output file (default stdout)");
    sub->add_option("--tol", o.tol, "alpha tolerance of the new-bound optimizer");
    sub->add_option("--format", o.format, grid ? "csv|json" : "text|csv|json");
  };

  CLI::App* eval = app.add_subcommand("eval", "all bounds at one point");
  add_common(eval, false);
  eval->add_option("--bounds", o.bounds, "comma list: exact,chernoff,new,stroock,bo,saddlepoint");
  eval->add_option("--trunc-nats", o.trunc_nats, "saddlepoint truncation (nats)");

  CLI::App* sweep = app.add_subcommand("sweep", "bounds over a linear y grid");
  add_common(sweep, true);
  sweep->add_option("--bounds", o.bounds,
                    "comma list: exact,chernoff,new,stroock,bo,saddlepoint,mc,all");
  sweep->add_option("--trunc-nats", o.trunc_nats, "saddlepoint truncation (nats)");
  CLI::Option* sweep_samples = sweep->add_option("--samples", o.samples, "Monte Carlo samples per row");
  sweep->add_option("--seed", o.seed, "Monte Carlo seed");
  sweep->add_option("--confidence", o.confidence, "Wilson interval level");
  sweep->add_option("--parallel", o.parallel, "rows computed concurrently");

  CLI::App* mcc = app.add_subcommand("mc", "Monte Carlo tail estimate and consistency check");
  add_common(mcc, false);
  o.samples = 0;
  CLI::Option* mc_samples = mcc->add_option("--samples", o.samples, "number of samples");
  mcc->add_option("--seed", o.seed, "seed");
  mcc->add_option("--confidence", o.confidence, "Wilson interval level");
  mcc->add_option("--parallel", o.parallel, "sampling threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitArgument;
  }

  try {
    if (eval->parsed()) return cmd_eval(o, out, err);
    if (sweep->parsed()) return cmd_sweep(o, sweep_samples->count() > 0, out, err);
    if (mcc->parsed()) {
      if (mc_samples->count() == 0) o.samples = 1000000;
      return cmd_mc(o, out, err);
    }
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kExitArgument;
  } catch (const RangeError& e) {
    err << "error: " << e.what() << "\n";
    return kExitArgument;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitArgument;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("tailbound");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace tailbound::cli
