#pragma once

#include <cstddef>
#include <vector>

#include "epochsa/problems.hpp"

namespace epochsa {

/// Step size and length of one executed epoch.
struct EpochRecord {
  int phase = 1;  // FASA runs two Epoch-GD phases; everything else is phase 1
  double step_size = 0.0;
  std::size_t length = 0;
};

struct SolveTrace {
  /// [0] is the start point, [k] the averaged iterate handed on after epoch k.
  std::vector<Vector> epoch_boundary_iterates;
  std::vector<EpochRecord> epochs;
  std::size_t gradients_consumed = 0;
  Vector final;
  /// Set when the budget admits no epoch (of phase 2, for FASA); `final`
  /// is then the warm start.
  bool degenerate = false;

  std::size_t epoch_count() const { return epochs.size(); }
};

/// T projected SGD steps from w1 with constant step eta; returns the mean of
/// the pre-update iterates w_1..w_T. Consumes exactly `steps` draws.
Vector sgd_epoch(const GradientOracle& oracle, Rng& rng, const Vector& w1,
                 double eta, std::size_t steps);

/// Largest k with T1 (2^k - 1) <= T.
std::size_t epoch_gd_epoch_count(std::size_t T1, std::size_t T);

/// floor(log2(T / (2 T1) + 1)): epochs of one FASA phase with budget T/2.
std::size_t fasa_phase_epoch_count(std::size_t T1, std::size_t T);

/// Epoch-GD: epoch k runs T_k = 2^{k-1} T1 steps at eta_k = eta1 / 2^{k-1}
/// while the cumulative count fits in T.
SolveTrace epoch_gd(const GradientOracle& oracle, Rng& rng, double eta1,
                    std::size_t T1, std::size_t T, const Vector& w0);

struct FasaParameters {
  std::size_t phase_budget = 0;  // floor(T / 2)
  double warm_eta = 0.0;         // 1 / lambda
  std::size_t warm_T1 = 4;
  double eta = 0.0;              // 1 / (4 L)
  std::size_t T1 = 0;            // ceil(2^{alpha+3} kappa)
  /// T1 / (2^{alpha+3} kappa) >= 1, the ceiling perturbation.
  double rounding_factor = 1.0;
};

FasaParameters fasa_parameters(double L, double lambda, std::size_t T, double alpha);

/// Warm-start Epoch-GD(1/lambda, 4, T/2, w_bar) followed by
/// Epoch-GD(1/(4L), 2^{alpha+3} kappa, T/2, w_hat).
SolveTrace fasa(const GradientOracle& oracle, Rng& rng, double L, double lambda,
                std::size_t T, double alpha, const Vector& w_bar);
SolveTrace fasa(const ProblemSpec& spec, Rng& rng, std::size_t T, double alpha,
                const Vector& w_bar);

struct FixedEpochParameters {
  double eta = 0.0;               // 1 / (4 beta L)
  std::size_t epoch_length = 0;   // ceil(16 beta kappa)
  double rounding_factor = 1.0;   // epoch_length / (16 beta kappa)
};

FixedEpochParameters epoch_gd_f_parameters(double L, double lambda, double beta);

/// Epoch-GD with fixed step and fixed epoch length: floor(T / epoch_length)
/// epochs.
SolveTrace fixed_epoch_gd(const GradientOracle& oracle, Rng& rng, double eta,
                          std::size_t epoch_length, std::size_t T, const Vector& w0);

SolveTrace epoch_gd_f(const GradientOracle& oracle, Rng& rng, double L,
                      double lambda, double beta, std::size_t T, const Vector& w0);
SolveTrace epoch_gd_f(const ProblemSpec& spec, Rng& rng, double beta, std::size_t T,
                      const Vector& w0);

/// T plain SGD steps with constant gamma < 1/lambda, projected iff
/// `constrained`. Returns the last iterate.
SolveTrace fixed_step_sgd(const GradientOracle& oracle, Rng& rng, double gamma,
                          double lambda, std::size_t T, const Vector& w0,
                          bool constrained);
SolveTrace fixed_step_sgd(const ProblemSpec& spec, Rng& rng, double gamma,
                          std::size_t T, const Vector& w0, bool constrained);

/// Budget 16 beta kappa ceil(log2(F0 / epsilon)) with
/// beta = max(1, 4 F* / epsilon); at least one epoch.
double iteration_complexity_ours(double kappa, double F_star, double epsilon,
                                 double F0);

}  // namespace epochsa
