#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epochsa/harness.hpp"
#include "epochsa/problems.hpp"

namespace epochsa {

struct ProblemConfig {
  ProblemKind kind = ProblemKind::LeastSquares;
  std::size_t d = 0;
  Vector D;                   // LeastSquares; defaults to all ones
  double mu = 0.0;            // Logistic
  double B = 0.0;
  double a = 0.0;             // LeastSquares
  std::uint64_t seed = 0;
  std::size_t pool_size = 100000;         // Logistic
  std::size_t f_star_draws = 1000000;     // Logistic
  // Certificate overrides, e.g. for exercising check-assumptions.
  std::optional<double> L;
  std::optional<double> lambda;
  std::optional<double> G;
};

struct ExperimentConfig {
  std::vector<std::size_t> budget_grid;
  std::size_t trials = 0;
  std::uint64_t base_seed = 0;
};

struct OutputConfig {
  std::string csv;
  std::string svg;
  std::string epoch_csv;
  std::string epoch_svg;
  int verbosity = 1;
};

struct ConfigFile {
  ProblemConfig problem;
  SolverConfig solver;
  ExperimentConfig experiment;
  OutputConfig output;
};

struct ParseResult {
  std::optional<ConfigFile> config;
  std::vector<std::string> errors;  // every problem found, with line numbers
  bool ok() const { return config.has_value(); }
};

/// Parses the sectioned `key = value` format:
///
///   [problem]      kind, d, D, mu, B, a, seed, pool_size, f_star_draws, L, lambda, G
///   [solver]       algorithm, eta1, T1, alpha, beta, gamma, constrained, w0
///   [experiment]   budget_grid, trials, base_seed
///   [output]       csv, svg, epoch_csv, epoch_svg, verbosity
///
/// `#` starts a comment. Unknown, duplicate and missing keys are errors.
ParseResult parse_config(std::string_view text);

ProblemSpec build_problem(const ProblemConfig& config);

}  // namespace epochsa
