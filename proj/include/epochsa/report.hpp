#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "epochsa/harness.hpp"

namespace epochsa {

/// One result-table row per (algorithm, budget).
struct ResultRow {
  std::string algorithm;
  std::size_t T = 0;
  std::size_t trials = 0;
  double mean_excess = 0.0;
  double std_error = 0.0;
  double theoretical_rhs = 0.0;
  bool satisfied = false;
  std::size_t k_dagger = 0;
  std::size_t gradients_consumed = 0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

inline constexpr std::string_view kResultHeader =
    "algorithm,T,trials,mean_excess,std_error,theoretical_rhs,satisfied,k_dagger,"
    "gradients_consumed";

/// Mean excess after each epoch, for the semi-log decay plot.
struct EpochRow {
  std::string algorithm;
  std::size_t T = 0;
  std::size_t epoch = 0;
  double mean_excess = 0.0;
  double std_error = 0.0;

  friend bool operator==(const EpochRow&, const EpochRow&) = default;
};

inline constexpr std::string_view kEpochHeader = "algorithm,T,epoch,mean_excess,std_error";

/// Shortest-round-trip-safe rendering (17 significant digits).
std::string format_real(double v);

std::string emit_csv(const std::vector<ResultRow>& rows);
/// Throws std::invalid_argument on a bad header or malformed row.
std::vector<ResultRow> parse_csv(std::string_view text);

std::string emit_epoch_csv(const std::vector<EpochRow>& rows);
std::vector<EpochRow> parse_epoch_csv(std::string_view text);

/// Rows for one experiment: one per budget, using `kind` as the bound.
std::vector<ResultRow> make_rows(const ExperimentResult& result, const ProblemSpec& spec,
                                 const SolverConfig& config, BoundKind kind,
                                 std::vector<BoundReport>* reports = nullptr);

std::vector<EpochRow> make_epoch_rows(const ExperimentResult& result,
                                      const SolverConfig& config);

/// Log-log excess-vs-T plot, one polyline per algorithm.
std::string render_rate_svg(const std::vector<ResultRow>& rows);

/// Semi-log excess-vs-epoch plot, one polyline per algorithm (largest T).
std::string render_epoch_svg(const std::vector<EpochRow>& rows);

}  // namespace epochsa
