#include "epochsa/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "epochsa/assumptions.hpp"
#include "epochsa/config.hpp"
#include "epochsa/report.hpp"

namespace epochsa {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << content;
}

ConfigFile load_config(const std::string& path) {
  ParseResult parsed = parse_config(read_file(path));
  if (!parsed.ok()) {
    std::string msg = path + ": invalid configuration";
    for (const auto& e : parsed.errors) msg += "\n  " + e;
    throw UsageError(msg);
  }
  return *parsed.config;
}

struct Options {
  std::string config;
  std::string out;
  std::string csv;
  std::string epochs;
  std::string epochs_out;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::size_t checks = 10000;
};

int cmd_run(const Options& opt, std::ostream& out, std::ostream& err) {
  ConfigFile cfg = load_config(opt.config);
  if (opt.trials) {
    if (*opt.trials == 0) throw UsageError("--trials must be >= 1");
    cfg.experiment.trials = *opt.trials;
  }
  if (opt.seed) cfg.experiment.base_seed = *opt.seed;

  ExperimentPlan plan;
  plan.problem = std::make_shared<const ProblemSpec>(build_problem(cfg.problem));
  plan.solver = cfg.solver;
  plan.budget_grid = cfg.experiment.budget_grid;
  plan.trials = cfg.experiment.trials;
  plan.base_seed = cfg.experiment.base_seed;
  try {
    validate(plan);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const ExperimentResult result = run_trials(plan);
  const BoundKind kind = default_bound(plan.solver);
  std::vector<BoundReport> reports;
  const auto rows = make_rows(result, *plan.problem, plan.solver, kind, &reports);

  const std::string csv = emit_csv(rows);
  const std::string csv_path = !opt.out.empty() ? opt.out : cfg.output.csv;
  if (csv_path.empty()) out << csv;
  else write_file(csv_path, csv);

  if (!cfg.output.epoch_csv.empty() || !cfg.output.epoch_svg.empty()) {
    const auto epoch_rows = make_epoch_rows(result, plan.solver);
    if (!cfg.output.epoch_csv.empty()) write_file(cfg.output.epoch_csv, emit_epoch_csv(epoch_rows));
    if (!cfg.output.epoch_svg.empty()) write_file(cfg.output.epoch_svg, render_epoch_svg(epoch_rows));
  }
  if (!cfg.output.svg.empty()) write_file(cfg.output.svg, render_rate_svg(rows));

  bool all_ok = true;
  for (const auto& r : reports) {
    all_ok = all_ok && r.satisfied;
    if (cfg.output.verbosity >= 1) {
      err << fmt::format("{} T={} mean={:.6g} se={:.3g} rhs={:.6g} {}{}\n", to_string(r.theorem),
                         r.budget, r.empirical_mean, r.std_error, r.theoretical_rhs,
                         r.satisfied ? "ok" : "VIOLATED",
                         r.out_of_regime ? " (out of regime)" : "");
    }
  }
  if (cfg.output.verbosity >= 1 && !monotone_within_noise(result)) {
    err << "note: mean excess is not monotone in T within 3 SE\n";
  }
  return all_ok ? kExitOk : kExitBoundFailed;
}

int cmd_check_assumptions(const Options& opt, std::ostream& out, std::ostream& err) {
  const ConfigFile cfg = load_config(opt.config);
  const ProblemSpec spec = build_problem(cfg.problem);
  AssumptionCheckOptions options;
  options.trials = opt.checks;
  options.strong_convexity_points = opt.checks;
  if (opt.seed) options.seed = *opt.seed;

  AssumptionReport report = check_assumptions(spec, options);
  const AssumptionReport geometry = check_projection(spec.domain(), opt.checks, options.seed);
  report.checks.insert(report.checks.end(), geometry.checks.begin(), geometry.checks.end());

  out << "check,trials,failures,worst_ratio,passed\n";
  for (const auto& c : report.checks) {
    out << fmt::format("{},{},{},{},{}\n", c.name, c.trials, c.failures,
                       format_real(c.worst_ratio), c.passed() ? "true" : "false");
    if (!c.passed() && cfg.output.verbosity >= 1) {
      err << "assumption check failed: " << c.name << " (" << c.failures << " of "
          << c.trials << ")\n";
    }
  }
  return report.all_passed() ? kExitOk : kExitBoundFailed;
}

std::string resolve_csv(const Options& opt, std::optional<ConfigFile>& cfg) {
  if (!opt.csv.empty()) return opt.csv;
  if (!opt.config.empty()) {
    cfg = load_config(opt.config);
    if (!cfg->output.csv.empty()) return cfg->output.csv;
  }
  throw UsageError("no input CSV: pass --csv or a config with output.csv");
}

int cmd_fit_rate(const Options& opt, std::ostream& out, std::ostream& err) {
  std::optional<ConfigFile> cfg;
  const auto rows = parse_csv(read_file(resolve_csv(opt, cfg)));
  std::vector<std::string> order;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& r : rows) {
    auto [it, inserted] = groups.try_emplace(r.algorithm);
    if (inserted) order.push_back(r.algorithm);
    it->second.first.push_back(static_cast<double>(r.T));
    it->second.second.push_back(r.mean_excess);
  }
  std::string text = "algorithm,slope,intercept,r_squared,points,dropped\n";
  int code = kExitOk;
  for (const auto& name : order) {
    const auto& [budgets, means] = groups[name];
    try {
      const RateFit fit = fit_rate(budgets, means);
      text += fmt::format("{},{},{},{},{},{}\n", name, format_real(fit.slope),
                          format_real(fit.intercept), format_real(fit.r_squared),
                          fit.log_budgets.size(), fit.dropped);
    } catch (const std::invalid_argument& e) {
      err << name << ": " << e.what() << "\n";
      code = kExitUsage;
    }
  }
  if (opt.out.empty()) out << text;
  else write_file(opt.out, text);
  return code;
}

int cmd_plot(const Options& opt, std::ostream&, std::ostream&) {
  std::optional<ConfigFile> cfg;
  const auto rows = parse_csv(read_file(resolve_csv(opt, cfg)));
  std::string svg_path = opt.out;
  if (svg_path.empty() && cfg) svg_path = cfg->output.svg;
  if (svg_path.empty()) throw UsageError("no output path: pass --out or set output.svg");
  write_file(svg_path, render_rate_svg(rows));

  std::string epochs = opt.epochs;
  if (epochs.empty() && cfg) epochs = cfg->output.epoch_csv;
  if (!epochs.empty()) {
    std::string epochs_out = opt.epochs_out;
    if (epochs_out.empty() && cfg) epochs_out = cfg->output.epoch_svg;
    if (epochs_out.empty()) epochs_out = svg_path + ".epochs.svg";
    write_file(epochs_out, render_epoch_svg(parse_epoch_csv(read_file(epochs))));
  }
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Epoch-based stochastic approximation experiments", "epochsa"};
  app.require_subcommand(1);
  Options opt;

  auto* run = app.add_subcommand("run", "run the configured experiment and write the CSV");
  run->add_option("--config", opt.config, "experiment config file")->required();
  run->add_option("--out", opt.out, "CSV output path (default: output.csv or stdout)");
  run->add_option("--trials", opt.trials, "override experiment.trials");
  run->add_option("--seed", opt.seed, "override experiment.base_seed");

  auto* check = app.add_subcommand("check-assumptions", "randomized certificate checks");
  check->add_option("--config", opt.config, "experiment config file")->required();
  check->add_option("--checks", opt.checks, "random trials per property")->check(CLI::PositiveNumber);
  check->add_option("--seed", opt.seed, "check seed");

  auto* fit = app.add_subcommand("fit-rate", "log-log slope per algorithm from a result CSV");
  fit->add_option("--csv", opt.csv, "result CSV");
  fit->add_option("--config", opt.config, "config whose output.csv is read");
  fit->add_option("--out", opt.out, "fit table path (default: stdout)");

  auto* plot = app.add_subcommand("plot", "render SVG convergence plots");
  plot->add_option("--csv", opt.csv, "result CSV");
  plot->add_option("--config", opt.config, "config whose output paths are used");
  plot->add_option("--out", opt.out, "SVG path for the excess-vs-T plot");
  plot->add_option("--epochs", opt.epochs, "epoch CSV for the excess-vs-epoch plot");
  plot->add_option("--epochs-out", opt.epochs_out, "SVG path for the epoch plot");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(opt, out, err);
    if (check->parsed()) return cmd_check_assumptions(opt, out, err);
    if (fit->parsed()) return cmd_fit_rate(opt, out, err);
    if (plot->parsed()) return cmd_plot(opt, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace epochsa
