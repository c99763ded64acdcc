#include "epochsa/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "epochsa/bounds.hpp"

namespace epochsa {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::EpochGD: return "epoch_gd";
    case Algorithm::FASA: return "fasa";
    case Algorithm::EpochGDF: return "epoch_gd_f";
    case Algorithm::FixedSGD: return "fixed_sgd";
  }
  return "unknown";
}

std::string to_string(StartPolicy p) {
  switch (p) {
    case StartPolicy::Center: return "center";
    case StartPolicy::Boundary: return "boundary";
    case StartPolicy::Optimum: return "optimum";
    case StartPolicy::Explicit: return "explicit";
  }
  return "unknown";
}

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::Thm1: return "thm1";
    case BoundKind::Cor1: return "cor1";
    case BoundKind::Thm2: return "thm2";
    case BoundKind::EpochGDBase: return "epoch_gd_base";
    case BoundKind::AppendixDist: return "appendix_dist";
    case BoundKind::AppendixRiskUnconstrained: return "appendix_risk_unconstrained";
    case BoundKind::AppendixRiskConstrained: return "appendix_risk_constrained";
  }
  return "unknown";
}

double effective_eta1(const SolverConfig& config, const ProblemSpec& spec) {
  return config.eta1 > 0.0 ? config.eta1 : 1.0 / spec.certificate().lambda;
}

double effective_gamma(const SolverConfig& config, const ProblemSpec& spec) {
  return config.gamma > 0.0 ? config.gamma : 1.0 / (2.0 * spec.certificate().L);
}

void validate(const SolverConfig& config, const ProblemSpec& spec) {
  const auto& c = spec.certificate();
  switch (config.algorithm) {
    case Algorithm::EpochGD:
      if (config.eta1 < 0.0) throw std::invalid_argument("eta1 must be positive");
      if (config.T1 == 0) throw std::invalid_argument("T1 must be >= 1");
      break;
    case Algorithm::FASA:
      if (!(config.alpha > 1.0)) {
        throw std::invalid_argument("alpha must satisfy alpha > 1");
      }
      break;
    case Algorithm::EpochGDF:
      if (!(config.beta > 1.0)) {
        throw std::invalid_argument("beta must satisfy beta > 1");
      }
      break;
    case Algorithm::FixedSGD:
      if (config.gamma < 0.0) throw std::invalid_argument("gamma must be positive");
      if (!(effective_gamma(config, spec) < 1.0 / c.lambda)) {
        throw std::invalid_argument("gamma must satisfy gamma < 1/lambda");
      }
      break;
  }
  (void)resolve_start(config, spec);
}

Vector resolve_start(const SolverConfig& config, const ProblemSpec& spec) {
  const BallDomain& domain = spec.domain();
  switch (config.start) {
    case StartPolicy::Center:
      return domain.center();
    case StartPolicy::Optimum:
      return spec.w_star();
    case StartPolicy::Boundary: {
      Vector dir = spec.w_star() - domain.center();
      if (dir.norm() == 0.0) dir = Vector::unit(spec.dimension(), 0);
      else dir *= 1.0 / dir.norm();
      Vector w = domain.center();
      w.axpy(-domain.radius(), dir);
      return w;
    }
    case StartPolicy::Explicit:
      require_same_dimension(config.explicit_start, domain.center());
      if (!domain.contains(config.explicit_start)) {
        throw std::invalid_argument("explicit start point lies outside the domain");
      }
      return config.explicit_start;
  }
  throw std::logic_error("unhandled start policy");
}

SolveTrace solve(const ProblemSpec& spec, const SolverConfig& config,
                 std::size_t budget, Rng& rng) {
  const Vector w0 = resolve_start(config, spec);
  switch (config.algorithm) {
    case Algorithm::EpochGD:
      return epoch_gd(spec, rng, effective_eta1(config, spec), config.T1, budget, w0);
    case Algorithm::FASA:
      return fasa(spec, rng, budget, config.alpha, w0);
    case Algorithm::EpochGDF:
      return epoch_gd_f(spec, rng, config.beta, budget, w0);
    case Algorithm::FixedSGD:
      return fixed_step_sgd(spec, rng, effective_gamma(config, spec), budget, w0,
                            config.constrained);
  }
  throw std::logic_error("unhandled algorithm");
}

void validate(const ExperimentPlan& plan) {
  if (!plan.problem) throw std::invalid_argument("plan has no problem");
  if (plan.trials == 0) throw std::invalid_argument("trials must be >= 1");
  if (plan.budget_grid.empty()) throw std::invalid_argument("budget grid is empty");
  for (std::size_t i = 0; i < plan.budget_grid.size(); ++i) {
    if (plan.budget_grid[i] == 0) throw std::invalid_argument("budgets must be positive");
    if (i > 0 && plan.budget_grid[i] <= plan.budget_grid[i - 1]) {
      throw std::invalid_argument("budget grid must be strictly increasing");
    }
  }
  validate(plan.solver, *plan.problem);
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t budget, std::size_t trial) {
  return derive_seed(base_seed, budget, trial);
}

std::vector<double> BudgetResult::excesses() const {
  std::vector<double> out;
  out.reserve(trials.size());
  for (const auto& t : trials) out.push_back(t.excess);
  return out;
}

std::vector<double> BudgetResult::distances_sq() const {
  std::vector<double> out;
  out.reserve(trials.size());
  for (const auto& t : trials) out.push_back(t.dist_sq);
  return out;
}

unsigned default_thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("EPOCHSA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) {
      return std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
  }
  return hw;
}

namespace {

TrialResult run_one(const ProblemSpec& spec, const SolverConfig& config,
                    std::size_t budget, std::uint64_t seed) {
  Rng rng(seed);
  const SolveTrace trace = solve(spec, config, budget, rng);
  const bool checked = config.algorithm != Algorithm::FixedSGD || config.constrained;
  TrialResult r;
  const RiskEstimate excess = spec.excess_risk(trace.final, checked);
  r.excess = excess.value;
  r.excess_std_error = excess.std_error;
  r.dist_sq = squared_distance(trace.final, spec.w_star());
  r.gradients_consumed = trace.gradients_consumed;
  r.epochs = trace.epoch_count();
  r.degenerate = trace.degenerate;
  r.epoch_excess.reserve(trace.epoch_boundary_iterates.size());
  for (const Vector& w : trace.epoch_boundary_iterates) {
    r.epoch_excess.push_back(spec.excess_risk(w, checked).value);
  }
  return r;
}

}  // namespace

ExperimentResult run_trials(const ExperimentPlan& plan, unsigned threads) {
  validate(plan);
  const ProblemSpec& spec = *plan.problem;
  ExperimentResult result;
  for (std::size_t T : plan.budget_grid) {
    result.budgets.push_back({T, std::vector<TrialResult>(plan.trials)});
  }

  const std::size_t jobs = plan.budget_grid.size() * plan.trials;
  if (threads == 0) threads = default_thread_count();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= jobs || failed.load()) return;
      const std::size_t b = job / plan.trials;
      const std::size_t j = job % plan.trials;
      const std::size_t T = plan.budget_grid[b];
      try {
        result.budgets[b].trials[j] =
            run_one(spec, plan.solver, T, trial_seed(plan.base_seed, T, j));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return result;
}

SampleStats summarize(std::span<const double> samples) {
  SampleStats s;
  s.n = samples.size();
  if (s.n == 0) return s;
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(s.n);
  s.mean = mean;
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    s.std_error = std::sqrt(ss / static_cast<double>(s.n - 1) / static_cast<double>(s.n));
  }
  return s;
}

BoundReport make_report(BoundKind kind, std::size_t budget,
                        std::span<const double> samples, double rhs, bool in_regime) {
  const SampleStats s = summarize(samples);
  BoundReport r;
  r.theorem = kind;
  r.budget = budget;
  r.empirical_mean = s.mean;
  r.std_error = s.std_error;
  r.out_of_regime = !in_regime;
  r.theoretical_rhs = in_regime ? rhs : std::numeric_limits<double>::infinity();
  r.satisfied = r.empirical_mean - 3.0 * r.std_error <= r.theoretical_rhs;
  return r;
}

BoundKind default_bound(const SolverConfig& config) {
  switch (config.algorithm) {
    case Algorithm::EpochGD: return BoundKind::EpochGDBase;
    case Algorithm::FASA: return config.alpha == 2.0 ? BoundKind::Cor1 : BoundKind::Thm1;
    case Algorithm::EpochGDF: return BoundKind::Thm2;
    case Algorithm::FixedSGD:
      return config.constrained ? BoundKind::AppendixRiskConstrained
                                : BoundKind::AppendixRiskUnconstrained;
  }
  return BoundKind::Thm1;
}

double plateau_threshold(double F_star, double beta) { return 10.0 * (2.0 * F_star / beta); }

BoundReport check_bound(BoundKind kind, const BudgetResult& result,
                        const ProblemSpec& spec, const SolverConfig& config,
                        const BoundOptions& options) {
  const auto& c = spec.certificate();
  const double T = static_cast<double>(result.budget);
  const double fstar_slack = c.F_star_is_exact ? 0.0 : 3.0 * c.F_star_std_error;
  const std::vector<double> excess = result.excesses();
  const Vector w0 = resolve_start(config, spec);
  const double dist0_sq = squared_distance(w0, spec.w_star());
  const double gamma = effective_gamma(config, spec);
  const bool step_ok = gamma < 1.0 / c.lambda && gamma < 1.0 / c.L;

  switch (kind) {
    case BoundKind::Thm1:
    case BoundKind::Cor1: {
      const double alpha = kind == BoundKind::Cor1 ? 2.0 : config.alpha;
      const double rhs = theorem1_rhs(c.G, c.lambda, c.kappa, c.F_star, T, alpha);
      return make_report(kind, result.budget, excess, rhs + fstar_slack,
                         theorem1_in_regime(c.kappa, T, alpha));
    }
    case BoundKind::Thm2: {
      const auto p = epoch_gd_f_parameters(c.L, c.lambda, config.beta);
      const std::size_t k_dagger = result.budget / p.epoch_length;
      const double F0 = spec.expected_risk(w0);
      const double rhs = theorem2_rhs(F0, c.F_star, config.beta, k_dagger);
      return make_report(kind, result.budget, excess, rhs + fstar_slack);
    }
    case BoundKind::EpochGDBase: {
      const double n = options.half_budget ? std::floor(T / 2.0) : T;
      if (n <= 0.0) return make_report(kind, result.budget, excess, 0.0, false);
      return make_report(kind, result.budget, excess,
                         epoch_gd_rhs(c.G, c.lambda, n) + fstar_slack);
    }
    case BoundKind::AppendixDist: {
      const std::vector<double> dist = result.distances_sq();
      if (!step_ok) return make_report(kind, result.budget, dist, 0.0, false);
      return make_report(kind, result.budget, dist,
                         appendix_distance_rhs(gamma, c.lambda, c.L, c.F_star, T, dist0_sq) +
                             fstar_slack);
    }
    case BoundKind::AppendixRiskUnconstrained: {
      if (!step_ok) return make_report(kind, result.budget, excess, 0.0, false);
      return make_report(kind, result.budget, excess,
                         appendix_risk_unconstrained_rhs(gamma, c.lambda, c.L, c.F_star, T,
                                                         dist0_sq) +
                             fstar_slack);
    }
    case BoundKind::AppendixRiskConstrained: {
      if (!step_ok) return make_report(kind, result.budget, excess, 0.0, false);
      const double grad_norm = spec.risk_gradient(spec.w_star()).norm();
      return make_report(kind, result.budget, excess,
                         appendix_risk_constrained_rhs(gamma, c.lambda, c.L, c.F_star, T,
                                                       dist0_sq, grad_norm) +
                             fstar_slack);
    }
  }
  throw std::logic_error("unhandled bound kind");
}

std::vector<SampleStats> epoch_profile(const BudgetResult& result) {
  std::size_t depth = 0;
  for (const auto& t : result.trials) depth = std::max(depth, t.epoch_excess.size());
  std::vector<SampleStats> profile;
  for (std::size_t k = 0; k < depth; ++k) {
    std::vector<double> column;
    for (const auto& t : result.trials) {
      if (k < t.epoch_excess.size()) column.push_back(t.epoch_excess[k]);
    }
    profile.push_back(summarize(column));
  }
  return profile;
}

std::vector<BoundReport> theorem2_epoch_reports(const BudgetResult& result,
                                                const ProblemSpec& spec,
                                                const SolverConfig& config) {
  const auto& c = spec.certificate();
  const double fstar_slack = c.F_star_is_exact ? 0.0 : 3.0 * c.F_star_std_error;
  const double F0 = spec.expected_risk(resolve_start(config, spec));
  std::size_t depth = 0;
  for (const auto& t : result.trials) depth = std::max(depth, t.epoch_excess.size());
  std::vector<BoundReport> reports;
  for (std::size_t k = 0; k < depth; ++k) {
    std::vector<double> column;
    for (const auto& t : result.trials) {
      if (k < t.epoch_excess.size()) column.push_back(t.epoch_excess[k]);
    }
    reports.push_back(make_report(BoundKind::Thm2, result.budget, column,
                                  theorem2_rhs(F0, c.F_star, config.beta, k) + fstar_slack));
  }
  return reports;
}

bool monotone_within_noise(const ExperimentResult& result) {
  for (std::size_t i = 1; i < result.budgets.size(); ++i) {
    const SampleStats prev = summarize(result.budgets[i - 1].excesses());
    const SampleStats cur = summarize(result.budgets[i].excesses());
    if (cur.mean > prev.mean + 3.0 * std::hypot(prev.std_error, cur.std_error)) return false;
  }
  return true;
}

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit ordinary_least_squares(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("regression needs distinct abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

}  // namespace

RateFit fit_rate(std::span<const double> budgets, std::span<const double> mean_excesses) {
  if (budgets.size() != mean_excesses.size()) {
    throw std::invalid_argument("fit_rate: budgets and excesses differ in length");
  }
  RateFit fit;
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    if (!(mean_excesses[i] > 0.0) || !(budgets[i] > 0.0)) {
      ++fit.dropped;
      continue;
    }
    fit.log_budgets.push_back(std::log(budgets[i]));
    fit.log_excess.push_back(std::log(mean_excesses[i]));
  }
  if (fit.log_budgets.size() < 3) {
    throw std::invalid_argument("fit_rate needs at least 3 points with positive excess");
  }
  const LineFit line = ordinary_least_squares(fit.log_budgets, fit.log_excess);
  fit.slope = line.slope;
  fit.intercept = line.intercept;
  fit.r_squared = line.r_squared;
  return fit;
}

EpochDecayFit epoch_decay_fit(std::span<const double> epoch_excesses,
                              double floor_threshold) {
  std::vector<double> k, y;
  for (std::size_t i = 0; i < epoch_excesses.size(); ++i) {
    const double e = epoch_excesses[i];
    if (!(e > floor_threshold) || !(e > 0.0)) break;
    k.push_back(static_cast<double>(i));
    y.push_back(std::log2(e));
  }
  if (k.size() < 3) {
    throw std::invalid_argument("epoch_decay_fit needs at least 3 pre-plateau epochs");
  }
  const LineFit line = ordinary_least_squares(k, y);
  return {line.slope, line.intercept, k.size()};
}

}  // namespace epochsa
