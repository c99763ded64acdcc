#include "epochsa/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace epochsa {
namespace {

void require_start_in_domain(const GradientOracle& oracle, const Vector& w0) {
  require_same_dimension(oracle.domain().center(), w0);
  require_finite(w0, "start point");
  if (!oracle.domain().contains(w0)) {
    throw std::invalid_argument("start point must lie in the domain");
  }
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be positive");
  }
}

SolveTrace start_trace(const Vector& w0) {
  SolveTrace trace;
  trace.epoch_boundary_iterates.push_back(w0);
  trace.final = w0;
  return trace;
}

void run_epoch(const GradientOracle& oracle, Rng& rng, SolveTrace& trace,
               int phase, double eta, std::size_t length) {
  trace.final = sgd_epoch(oracle, rng, trace.final, eta, length);
  trace.epoch_boundary_iterates.push_back(trace.final);
  trace.epochs.push_back({phase, eta, length});
  trace.gradients_consumed += length;
}

// Epoch-GD appended onto an existing trace.
void run_epoch_gd(const GradientOracle& oracle, Rng& rng, SolveTrace& trace,
                  int phase, double eta1, std::size_t T1, std::size_t T) {
  double eta = eta1;
  std::size_t length = T1;
  std::size_t used = 0;
  while (used + length <= T) {
    run_epoch(oracle, rng, trace, phase, eta, length);
    used += length;
    length *= 2;
    eta /= 2.0;
  }
}

}  // namespace

Vector sgd_epoch(const GradientOracle& oracle, Rng& rng, const Vector& w1,
                 double eta, std::size_t steps) {
  require_positive(eta, "step size");
  if (steps == 0) throw std::invalid_argument("epoch length must be >= 1");
  require_start_in_domain(oracle, w1);

  const BallDomain& domain = oracle.domain();
  Vector w = w1;
  Vector g(w.size());
  RunningAverage avg(w.size());
  for (std::size_t t = 1; t <= steps; ++t) {
    avg.add(w);
    oracle.sample_gradient(w, rng, g);
    w.axpy(-eta, g);
    project_in_place(domain, w);
  }
  return avg.mean();
}

std::size_t epoch_gd_epoch_count(std::size_t T1, std::size_t T) {
  if (T1 == 0) throw std::invalid_argument("first epoch length must be >= 1");
  std::size_t k = 0;
  std::size_t total = 0;
  std::size_t length = T1;
  while (total + length <= T) {
    total += length;
    length *= 2;
    ++k;
  }
  return k;
}

std::size_t fasa_phase_epoch_count(std::size_t T1, std::size_t T) {
  if (T1 == 0) throw std::invalid_argument("first epoch length must be >= 1");
  const double v = static_cast<double>(T) / (2.0 * static_cast<double>(T1)) + 1.0;
  return static_cast<std::size_t>(std::floor(std::log2(v)));
}

SolveTrace epoch_gd(const GradientOracle& oracle, Rng& rng, double eta1,
                    std::size_t T1, std::size_t T, const Vector& w0) {
  require_positive(eta1, "initial step size");
  if (T1 == 0) throw std::invalid_argument("first epoch length must be >= 1");
  require_start_in_domain(oracle, w0);
  SolveTrace trace = start_trace(w0);
  run_epoch_gd(oracle, rng, trace, 1, eta1, T1, T);
  trace.degenerate = trace.epochs.empty();
  return trace;
}

FasaParameters fasa_parameters(double L, double lambda, std::size_t T, double alpha) {
  require_positive(L, "L");
  require_positive(lambda, "lambda");
  if (!(alpha > 1.0)) throw std::invalid_argument("alpha > 1 is required");
  FasaParameters p;
  p.phase_budget = T / 2;
  p.warm_eta = 1.0 / lambda;
  p.warm_T1 = 4;
  p.eta = 1.0 / (4.0 * L);
  const double exact_T1 = std::pow(2.0, alpha + 3.0) * (L / lambda);
  p.T1 = static_cast<std::size_t>(std::ceil(exact_T1));
  p.rounding_factor = static_cast<double>(p.T1) / exact_T1;
  return p;
}

SolveTrace fasa(const GradientOracle& oracle, Rng& rng, double L, double lambda,
                std::size_t T, double alpha, const Vector& w_bar) {
  const FasaParameters p = fasa_parameters(L, lambda, T, alpha);
  require_start_in_domain(oracle, w_bar);
  SolveTrace trace = start_trace(w_bar);
  run_epoch_gd(oracle, rng, trace, 1, p.warm_eta, p.warm_T1, p.phase_budget);
  const std::size_t warm_epochs = trace.epochs.size();
  run_epoch_gd(oracle, rng, trace, 2, p.eta, p.T1, p.phase_budget);
  trace.degenerate = trace.epochs.size() == warm_epochs;
  return trace;
}

SolveTrace fasa(const ProblemSpec& spec, Rng& rng, std::size_t T, double alpha,
                const Vector& w_bar) {
  const auto& c = spec.certificate();
  return fasa(spec, rng, c.L, c.lambda, T, alpha, w_bar);
}

FixedEpochParameters epoch_gd_f_parameters(double L, double lambda, double beta) {
  require_positive(L, "L");
  require_positive(lambda, "lambda");
  if (!(beta > 1.0)) throw std::invalid_argument("beta > 1 is required");
  FixedEpochParameters p;
  p.eta = 1.0 / (4.0 * beta * L);
  const double exact = 16.0 * beta * (L / lambda);
  p.epoch_length = static_cast<std::size_t>(std::ceil(exact));
  p.rounding_factor = static_cast<double>(p.epoch_length) / exact;
  return p;
}

SolveTrace fixed_epoch_gd(const GradientOracle& oracle, Rng& rng, double eta,
                          std::size_t epoch_length, std::size_t T, const Vector& w0) {
  require_positive(eta, "step size");
  if (epoch_length == 0) throw std::invalid_argument("epoch length must be >= 1");
  require_start_in_domain(oracle, w0);
  SolveTrace trace = start_trace(w0);
  const std::size_t epochs = T / epoch_length;
  for (std::size_t k = 0; k < epochs; ++k) {
    run_epoch(oracle, rng, trace, 1, eta, epoch_length);
  }
  trace.degenerate = epochs == 0;
  return trace;
}

SolveTrace epoch_gd_f(const GradientOracle& oracle, Rng& rng, double L,
                      double lambda, double beta, std::size_t T, const Vector& w0) {
  const FixedEpochParameters p = epoch_gd_f_parameters(L, lambda, beta);
  return fixed_epoch_gd(oracle, rng, p.eta, p.epoch_length, T, w0);
}

SolveTrace epoch_gd_f(const ProblemSpec& spec, Rng& rng, double beta, std::size_t T,
                      const Vector& w0) {
  const auto& c = spec.certificate();
  return epoch_gd_f(spec, rng, c.L, c.lambda, beta, T, w0);
}

SolveTrace fixed_step_sgd(const GradientOracle& oracle, Rng& rng, double gamma,
                          double lambda, std::size_t T, const Vector& w0,
                          bool constrained) {
  require_positive(gamma, "step size");
  require_positive(lambda, "lambda");
  if (!(gamma < 1.0 / lambda)) {
    throw std::invalid_argument("fixed-step SGD requires gamma < 1/lambda");
  }
  require_start_in_domain(oracle, w0);
  SolveTrace trace = start_trace(w0);
  Vector w = w0;
  Vector g(w.size());
  for (std::size_t t = 0; t < T; ++t) {
    oracle.sample_gradient(w, rng, g);
    w.axpy(-gamma, g);
    if (constrained) {
      project_in_place(oracle.domain(), w);
    } else {
      require_finite(w, "SGD iterate");
    }
  }
  trace.gradients_consumed = T;
  trace.final = w;
  trace.epoch_boundary_iterates.push_back(w);
  trace.epochs.push_back({1, gamma, T});
  trace.degenerate = T == 0;
  return trace;
}

SolveTrace fixed_step_sgd(const ProblemSpec& spec, Rng& rng, double gamma,
                          std::size_t T, const Vector& w0, bool constrained) {
  return fixed_step_sgd(spec, rng, gamma, spec.certificate().lambda, T, w0, constrained);
}

double iteration_complexity_ours(double kappa, double F_star, double epsilon,
                                 double F0) {
  require_positive(epsilon, "epsilon");
  require_positive(kappa, "kappa");
  require_positive(F0, "initial gap");
  const double beta = std::max(1.0, 4.0 * F_star / epsilon);
  const double epochs = std::max(1.0, std::ceil(std::log2(F0 / epsilon)));
  return 16.0 * beta * kappa * epochs;
}

}  // namespace epochsa
