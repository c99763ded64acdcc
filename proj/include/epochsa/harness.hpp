#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "epochsa/problems.hpp"
#include "epochsa/solvers.hpp"

namespace epochsa {

enum class Algorithm { EpochGD, FASA, EpochGDF, FixedSGD };

enum class StartPolicy {
  Center,    // domain center
  Boundary,  // boundary point farthest from w*
  Optimum,   // w* itself
  Explicit,
};

std::string to_string(Algorithm a);
std::string to_string(StartPolicy p);

struct SolverConfig {
  Algorithm algorithm = Algorithm::FASA;
  double eta1 = 0.0;        // EpochGD; 0 selects 1/lambda
  std::size_t T1 = 4;       // EpochGD
  double alpha = 2.0;       // FASA
  double beta = 2.0;        // EpochGDF
  double gamma = 0.0;       // FixedSGD; 0 selects 1/(2L)
  bool constrained = true;  // FixedSGD
  StartPolicy start = StartPolicy::Center;
  Vector explicit_start;
};

/// Throws std::invalid_argument when a parameter violates its algorithm's
/// precondition for this problem.
void validate(const SolverConfig& config, const ProblemSpec& spec);

Vector resolve_start(const SolverConfig& config, const ProblemSpec& spec);

/// Effective step sizes after defaults are applied.
double effective_eta1(const SolverConfig& config, const ProblemSpec& spec);
double effective_gamma(const SolverConfig& config, const ProblemSpec& spec);

SolveTrace solve(const ProblemSpec& spec, const SolverConfig& config,
                 std::size_t budget, Rng& rng);

struct ExperimentPlan {
  std::shared_ptr<const ProblemSpec> problem;
  SolverConfig solver;
  std::vector<std::size_t> budget_grid;
  std::size_t trials = 1;
  std::uint64_t base_seed = 0;
};

void validate(const ExperimentPlan& plan);

/// Seed of trial j at budget T.
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t budget, std::size_t trial);

struct TrialResult {
  double excess = 0.0;
  double excess_std_error = 0.0;  // Monte-Carlo error of the risk evaluation
  double dist_sq = 0.0;           // ||w_final - w*||^2
  std::vector<double> epoch_excess;  // excess at each epoch boundary
  std::size_t gradients_consumed = 0;
  std::size_t epochs = 0;
  bool degenerate = false;
};

struct BudgetResult {
  std::size_t budget = 0;
  std::vector<TrialResult> trials;

  std::vector<double> excesses() const;
  std::vector<double> distances_sq() const;
};

struct ExperimentResult {
  std::vector<BudgetResult> budgets;
};

/// Caps from EPOCHSA_THREADS, else hardware concurrency.
unsigned default_thread_count();

/// Runs every (budget, trial) pair; results are indexed, so the output does
/// not depend on the thread count.
ExperimentResult run_trials(const ExperimentPlan& plan, unsigned threads = 0);

struct SampleStats {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

SampleStats summarize(std::span<const double> samples);

enum class BoundKind {
  Thm1,
  Cor1,
  Thm2,
  EpochGDBase,
  AppendixDist,
  AppendixRiskUnconstrained,
  AppendixRiskConstrained,
};

std::string to_string(BoundKind kind);

struct BoundReport {
  BoundKind theorem = BoundKind::Thm1;
  std::size_t budget = 0;
  double empirical_mean = 0.0;
  double std_error = 0.0;
  double theoretical_rhs = 0.0;
  bool satisfied = false;
  bool out_of_regime = false;
};

/// satisfied = mean - 3 SE <= rhs; an out-of-regime report has rhs = +inf.
BoundReport make_report(BoundKind kind, std::size_t budget,
                        std::span<const double> samples, double rhs,
                        bool in_regime = true);

struct BoundOptions {
  /// EpochGDBase: evaluate with floor(T/2) in place of T.
  bool half_budget = false;
};

/// The bound naturally attached to an algorithm.
BoundKind default_bound(const SolverConfig& config);

/// Evaluates `kind` at one budget. An inexact F* (Logistic) adds
/// 3 F*-standard-errors to the right-hand side.
BoundReport check_bound(BoundKind kind, const BudgetResult& result,
                        const ProblemSpec& spec, const SolverConfig& config,
                        const BoundOptions& options = {});

/// One Thm2 report per epoch boundary k = 0..k_max, comparing the mean excess
/// after k epochs with (F(w0) - F*) / 2^k + 2 F* / beta.
std::vector<BoundReport> theorem2_epoch_reports(const BudgetResult& result,
                                                const ProblemSpec& spec,
                                                const SolverConfig& config);

/// Mean excess at each epoch boundary across trials.
std::vector<SampleStats> epoch_profile(const BudgetResult& result);

/// True when the mean excess never rises by more than 3 combined SE from one
/// budget to the next.
bool monotone_within_noise(const ExperimentResult& result);

struct RateFit {
  std::vector<double> log_budgets;
  std::vector<double> log_excess;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t dropped = 0;  // points with nonpositive excess
};

/// OLS of ln(mean excess) on ln(T). Nonpositive excesses are dropped;
/// fewer than three remaining points throws std::invalid_argument.
RateFit fit_rate(std::span<const double> budgets, std::span<const double> mean_excesses);

struct EpochDecayFit {
  double slope = 0.0;  // log2 excess per epoch
  double intercept = 0.0;
  std::size_t points_used = 0;
};

/// OLS of log2(excess) on the epoch index over the leading run of points
/// with excess > floor_threshold. Needs at least three such points.
EpochDecayFit epoch_decay_fit(std::span<const double> epoch_excesses,
                              double floor_threshold = 0.0);

/// 10 * (2 F* / beta), the plateau threshold used for Thm2 decay fits.
double plateau_threshold(double F_star, double beta);

}  // namespace epochsa
