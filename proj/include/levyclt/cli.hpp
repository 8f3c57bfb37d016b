#pragma once

// Command-line front end. run_cli() is the whole program; tools/levyclt.cpp
// only forwards argv to it.
//
// Exit codes:
//   0  success
//   1  a verification check failed (identities)
//   2  malformed model document or invalid arguments
//   3  model validation failure
//   4  sampler or numerical failure

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "levyclt/errors.hpp"
#include "levyclt/io.hpp"
#include "levyclt/levy_model.hpp"
#include "levyclt/quadrature.hpp"
#include "levyclt/sampler.hpp"
#include "levyclt/verify.hpp"

namespace levyclt::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_check_failed = 1,
  exit_bad_input = 2,
  exit_model_invalid = 3,
  exit_runtime = 4,
};

class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string command;
  std::filesystem::path model;
  std::optional<double> t_min;
  std::optional<double> t_max;
  std::optional<std::size_t> points;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
  std::filesystem::path out = ".";
  std::vector<std::string> formats;  // empty selects the command's default
  unsigned threads = 0;
  double t = 1.0;                    // sample: time horizon
  double tol = 1e-6;                 // identities: Eq. I and cubic identity
  double deficit_tol = 1e-5;         // identities: sigma-deficit lhs/rhs
  double substitution_tol = 1e-3;
};

struct ResolvedRun {
  ScanGrid grid;
  SimConfig sim;
};

/// Flags override the document's run section, which overrides defaults.
inline ResolvedRun resolve(const RunConfig& cfg, const RunOverrides& doc) {
  ResolvedRun r;
  r.grid.t_min = cfg.t_min.value_or(doc.t_min.value_or(r.grid.t_min));
  r.grid.t_max = cfg.t_max.value_or(doc.t_max.value_or(r.grid.t_max));
  r.grid.points = cfg.points.value_or(doc.points.value_or(r.grid.points));
  r.sim.samples = cfg.samples.value_or(doc.samples.value_or(r.sim.samples));
  r.sim.seed = cfg.seed.value_or(doc.seed.value_or(r.sim.seed));
  r.sim.alpha = cfg.alpha.value_or(doc.alpha.value_or(r.sim.alpha));
  r.sim.threads = cfg.threads;
  r.sim.substitution.tolerance = cfg.substitution_tol;

  if (r.sim.samples < 100) throw UsageError("samples must be >= 100");
  if (!(r.sim.alpha > 0.0 && r.sim.alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
  if (!(r.grid.t_min >= 1.0)) throw UsageError("t-min must be >= 1");
  if (r.grid.points == 0) throw UsageError("points must be >= 1");
  if (r.grid.points > 1 && !(r.grid.t_max > r.grid.t_min && std::isfinite(r.grid.t_max))) {
    throw UsageError("t-max must be finite and exceed t-min");
  }
  if (!(cfg.substitution_tol > 0.0)) throw UsageError("substitution-tol must be positive");
  return r;
}

namespace detail {

inline bool wants(const RunConfig& cfg, const std::string& format,
                  std::initializer_list<const char*> defaults) {
  if (cfg.formats.empty()) {
    return std::any_of(defaults.begin(), defaults.end(), [&](const char* d) { return format == d; });
  }
  return std::find(cfg.formats.begin(), cfg.formats.end(), format) != cfg.formats.end();
}

// Files are written under a temporary name and renamed into place; anything
// already produced by this run is removed if a later step throws.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;
  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : written_) std::filesystem::remove(p, ec);
  }

  template <class Fn>
  std::filesystem::path write(const std::string& name, std::ios::openmode mode, Fn&& fill) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    const auto final_path = dir_ / name;
    const auto tmp = dir_ / (name + ".partial");
    written_.push_back(tmp);
    {
      std::ofstream f(tmp, mode | std::ios::trunc);
      if (!f) throw Error("cannot write '" + tmp.string() + "'");
      fill(f);
      f.flush();
      if (!f) throw Error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, final_path);
    written_.back() = final_path;
    return final_path;
  }

  void commit() { committed_ = true; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> written_;
  bool committed_ = false;
};

inline ModelDocument load(const RunConfig& cfg) {
  if (cfg.model.empty()) throw UsageError("--model is required");
  return read_model_document(cfg.model);
}

inline std::string fmt(double v) { return format_real(v == 0.0 ? 0.0 : v); }

}  // namespace detail

inline json inspect_json(const LevyModel& model) {
  const auto regime = classify_regime(model);
  return {{"model", model_json(model)},
          {"sigma_sq", model.total_variance()},
          {"sigma1", model.sigma1()},
          {"kappa", model.kappa()},
          {"drift", model.drift()},
          {"log_moment", verdict_json(regime.condition)},
          {"regime", prediction_name(regime.prediction)}};
}

inline int cmd_inspect(const RunConfig& cfg, std::ostream& out) {
  const auto doc = detail::load(cfg);
  const auto model = to_model(doc);
  const auto summary = inspect_json(model);
  if (detail::wants(cfg, "json", {})) {
    out << summary.dump(2) << '\n';
    return exit_ok;
  }
  const auto regime = classify_regime(model);
  out << "family      " << family_name(model.measure().family()) << '\n'
      << "sigma^2     " << detail::fmt(model.total_variance()) << '\n'
      << "sigma_1     " << detail::fmt(model.sigma1()) << '\n'
      << "kappa       " << detail::fmt(model.kappa()) << '\n'
      << "drift       " << detail::fmt(model.drift()) << '\n'
      << "x^2 log|x|  " << verdict_name(regime.condition.status);
  if (regime.condition.value) out << " (" << detail::fmt(*regime.condition.value) << ")";
  out << '\n' << "regime      " << prediction_name(regime.prediction) << '\n';
  return exit_ok;
}

inline int cmd_scan(const RunConfig& cfg, std::ostream& out) {
  const auto doc = detail::load(cfg);
  const auto model = to_model(doc);
  const auto run = resolve(cfg, doc.run);
  const auto report = scan(model, run.grid, run.sim);

  detail::OutputSet files(cfg.out);
  std::vector<std::filesystem::path> paths;
  if (detail::wants(cfg, "csv", {"csv", "json"})) {
    paths.push_back(files.write("scan.csv", std::ios::out,
                                [&](std::ostream& f) { write_report_csv(f, report); }));
  }
  if (detail::wants(cfg, "json", {"csv", "json"})) {
    paths.push_back(files.write("scan.json", std::ios::out, [&](std::ostream& f) {
      f << report_json(report, model).dump(2) << '\n';
    }));
  }
  files.commit();

  const auto a = decay_integral(report, Normalization::sigma_t);
  const auto b = decay_integral(report, Normalization::sigma);
  out << "points " << report.rows.size() << ", samples " << report.samples << ", seed "
      << report.seed << '\n'
      << "int K_sigma_t dt/t  " << detail::fmt(a.estimate) << " (slack " << detail::fmt(a.slack) << ")\n"
      << "int K_sigma dt/t    " << detail::fmt(b.estimate) << '\n';
  for (const auto& p : paths) out << "wrote " << p.string() << '\n';
  return exit_ok;
}

inline int cmd_sample(const RunConfig& cfg, std::ostream& out) {
  const auto doc = detail::load(cfg);
  const auto model = to_model(doc);
  const auto run = resolve(cfg, doc.run);
  if (!(cfg.t >= 1.0) || !std::isfinite(cfg.t)) throw UsageError("--t must be >= 1");

  SimPlan plan;
  plan.t = cfg.t;
  plan.n = run.sim.samples;
  plan.seed = run.sim.seed;
  plan.threads = run.sim.threads;
  plan.small_jump_eps =
      choose_small_jump_eps(model, cfg.t, SamplingMode::endpoint, run.sim.substitution);
  const auto draws = sample_endpoint(model, plan);

  detail::OutputSet files(cfg.out);
  std::vector<std::filesystem::path> paths;
  if (detail::wants(cfg, "bin", {"bin"})) {
    paths.push_back(files.write("samples.bin", std::ios::out | std::ios::binary,
                                [&](std::ostream& f) { write_samples_binary(f, draws); }));
  }
  if (detail::wants(cfg, "csv", {"bin"})) {
    paths.push_back(files.write("samples.csv", std::ios::out,
                                [&](std::ostream& f) { write_samples_csv(f, draws); }));
  }
  files.commit();

  double mean = 0.0;
  for (double x : draws) mean += x;
  mean /= static_cast<double>(draws.size());
  double var = 0.0;
  for (double x : draws) var += (x - mean) * (x - mean);
  var /= static_cast<double>(draws.size() > 1 ? draws.size() - 1 : 1);
  out << "t " << detail::fmt(cfg.t) << ", n " << draws.size() << ", small_jump_eps "
      << detail::fmt(plan.small_jump_eps) << '\n'
      << "mean " << detail::fmt(mean) << ", variance " << detail::fmt(var) << " (model "
      << detail::fmt(model.total_variance() * cfg.t) << ")\n";
  for (const auto& p : paths) out << "wrote " << p.string() << '\n';
  return exit_ok;
}

struct CheckLine {
  std::string name;
  bool passed = false;
  std::string detail;
};

inline std::vector<CheckLine> identity_checks(const LevyModel& model, double tol, double deficit_tol) {
  std::vector<CheckLine> lines;
  {
    const auto rep = check_I_identities(model, tol);
    std::ostringstream d;
    d << "values " << detail::fmt(rep.values[0]) << ' ' << detail::fmt(rep.values[1]) << ' '
      << detail::fmt(rep.values[2]) << ", rel dev " << detail::fmt(rep.max_rel_dev);
    lines.push_back({"second_moment_representations", rep.passed, d.str()});
  }
  const double kappa = model.kappa();
  for (double w : {0.5 * kappa, kappa, 10.0 * kappa, 1000.0 * kappa}) {
    const auto c = truncated_cubic_identity(model.measure(), w);
    std::ostringstream d;
    d << "direct " << detail::fmt(c.direct) << ", via tail " << detail::fmt(c.via_tail)
      << ", rel dev " << detail::fmt(c.rel_dev);
    lines.push_back({"cubic_identity[w=" + detail::fmt(w) + "]", c.rel_dev <= tol, d.str()});
  }
  for (double horizon : {10.0, 1e3, 1e6}) {
    const auto s = sigma_deficit_integral(model, horizon);
    const double scale = std::max(std::fabs(s.lhs), std::fabs(s.rhs));
    const double dev = scale == 0.0 ? 0.0 : std::fabs(s.lhs - s.rhs) / scale;
    std::ostringstream d;
    d << "lhs " << detail::fmt(s.lhs) << ", rhs " << detail::fmt(s.rhs) << ", rel dev "
      << detail::fmt(dev);
    lines.push_back({"sigma_deficit[T=" + detail::fmt(horizon) + "]", dev <= deficit_tol, d.str()});
  }
  return lines;
}

inline int cmd_identities(const RunConfig& cfg, std::ostream& out) {
  if (!(cfg.tol > 0.0) || !(cfg.deficit_tol > 0.0)) throw UsageError("tolerances must be positive");
  const auto doc = detail::load(cfg);
  const auto model = to_model(doc);
  bool all = true;
  for (const auto& line : identity_checks(model, cfg.tol, cfg.deficit_tol)) {
    all = all && line.passed;
    out << (line.passed ? "PASS " : "FAIL ") << line.name << "  " << line.detail << '\n';
  }
  return all ? exit_ok : exit_check_failed;
}

inline int dispatch(const RunConfig& cfg, std::ostream& out) {
  if (cfg.command == "inspect") return cmd_inspect(cfg, out);
  if (cfg.command == "scan") return cmd_scan(cfg, out);
  if (cfg.command == "identities") return cmd_identities(cfg, out);
  if (cfg.command == "sample") return cmd_sample(cfg, out);
  throw UsageError("unknown command '" + cfg.command + "'");
}

/// Maps library exceptions onto the documented exit codes.
inline int run_guarded(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(cfg, out);
  } catch (const DocumentError& e) {
    err << "error: " << e.what() << '\n';
    return exit_bad_input;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return exit_bad_input;
  } catch (const ModelError& e) {
    err << "invalid model: " << e.what() << '\n';
    return exit_model_invalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_runtime;
  }
}

inline void add_run_flags(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--model", cfg.model, "Model document (JSON)")->required();
  sub.add_option("--t-min", cfg.t_min, "Smallest grid time");
  sub.add_option("--t-max", cfg.t_max, "Largest grid time");
  sub.add_option("--points", cfg.points, "Number of log-spaced grid points");
  sub.add_option("--samples", cfg.samples, "Monte Carlo draws per grid point");
  sub.add_option("--seed", cfg.seed, "Master seed");
  sub.add_option("--alpha", cfg.alpha, "DKW confidence level");
  sub.add_option("--out", cfg.out, "Output directory");
  sub.add_option("--format", cfg.formats, "Output formats: csv, json, bin")
      ->check(CLI::IsMember({"csv", "json", "bin"}))
      ->delimiter(',');
  sub.add_option("--threads", cfg.threads, "Worker threads (0: all cores)");
  sub.add_option("--substitution-tol", cfg.substitution_tol,
                 "Kolmogorov budget for small-jump Gaussian substitution");
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kolmogorov-distance CLT diagnostics for Levy processes", "levyclt"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* inspect = app.add_subcommand("inspect", "Summarise a model");
  inspect->add_option("--model", cfg.model, "Model document (JSON)")->required();
  inspect->add_option("--format", cfg.formats, "json for a JSON summary")
      ->check(CLI::IsMember({"text", "json"}));

  auto* scan_cmd = app.add_subcommand("scan", "Scan the Kolmogorov distance over a time grid");
  add_run_flags(*scan_cmd, cfg);

  auto* ident = app.add_subcommand("identities", "Check the quadrature and Fubini identities");
  ident->add_option("--model", cfg.model, "Model document (JSON)")->required();
  ident->add_option("--tol", cfg.tol, "Relative tolerance, second-moment and cubic identities");
  ident->add_option("--deficit-tol", cfg.deficit_tol, "Relative tolerance, sigma-deficit identity");

  auto* sample = app.add_subcommand("sample", "Dump raw endpoint draws X_t");
  add_run_flags(*sample, cfg);
  sample->add_option("--t", cfg.t, "Time horizon");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_bad_input;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  return run_guarded(cfg, out, err);
}

}  // namespace levyclt::cli
