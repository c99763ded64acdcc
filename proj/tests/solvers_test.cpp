#include <atomic>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "epochsa/problems.hpp"
#include "epochsa/solvers.hpp"

namespace epochsa {
namespace {

// Squared loss on a single fixed instance x = e1 with label `target`:
// the gradient is 2 (w1 - target) e1, independent of the rng.
class AxisOracle : public GradientOracle {
 public:
  AxisOracle(std::size_t dim, double radius, double target)
      : domain_(Vector(dim), radius), target_(target) {}
  const BallDomain& domain() const override { return domain_; }
  void sample_gradient(const Vector& w, Rng&, Vector& out) const override {
    ++calls;
    out = Vector(w.size());
    out[0] = 2.0 * (w[0] - target_);
  }
  mutable std::size_t calls = 0;

 private:
  BallDomain domain_;
  double target_;
};

class ZeroOracle : public GradientOracle {
 public:
  explicit ZeroOracle(std::size_t dim) : domain_(Vector(dim), 1.0) {}
  const BallDomain& domain() const override { return domain_; }
  void sample_gradient(const Vector& w, Rng&, Vector& out) const override {
    ++calls;
    out = Vector(w.size());
  }
  mutable std::size_t calls = 0;

 private:
  BallDomain domain_;
};

// Forwards to a spec and records how far from the center any queried
// iterate was.
class SpyOracle : public GradientOracle {
 public:
  explicit SpyOracle(const ProblemSpec& spec) : spec_(spec) {}
  const BallDomain& domain() const override { return spec_.domain(); }
  void sample_gradient(const Vector& w, Rng& rng, Vector& out) const override {
    max_radius = std::max(max_radius, distance(w, spec_.domain().center()));
    ++calls;
    spec_.sample_gradient(w, rng, out);
  }
  mutable double max_radius = 0.0;
  mutable std::size_t calls = 0;

 private:
  const ProblemSpec& spec_;
};

ProblemSpec unit_least_squares(double a) {
  return make_least_squares(4, Vector(4, 1.0), 2.0, a, 1);
}

Vector boundary_start(const ProblemSpec& spec) {
  return (-2.0 / spec.w_star().norm()) * spec.w_star();
}

TEST(SgdEpoch, SingleStepReturnsStart) {
  const AxisOracle oracle(2, 2.0, 0.5);
  Rng rng(1);
  const Vector w1{1.0, 0.3};
  EXPECT_EQ(sgd_epoch(oracle, rng, w1, 0.1, 1), w1);
  EXPECT_EQ(oracle.calls, 1u);
}

TEST(SgdEpoch, HandTrace) {
  // w: 1 -> 0.9 -> 0.82 (-> 0.756 discarded)
  const AxisOracle oracle(2, 2.0, 0.5);
  Rng rng(1);
  const Vector avg = sgd_epoch(oracle, rng, Vector{1.0, 0.3}, 0.1, 3);
  EXPECT_NEAR(avg[0], (1.0 + 0.9 + 0.82) / 3.0, 1e-15);
  EXPECT_EQ(avg[1], 0.3);
  EXPECT_EQ(oracle.calls, 3u);
}

TEST(SgdEpoch, HandTraceWithProjection) {
  // target 5 lies outside the radius-2 ball: 1.5 -> 3.25 -> 2, 2 -> 3.5 -> 2
  const AxisOracle oracle(2, 2.0, 5.0);
  Rng rng(1);
  const Vector avg = sgd_epoch(oracle, rng, Vector{1.5, 0.0}, 0.25, 3);
  EXPECT_NEAR(avg[0], 5.5 / 3.0, 1e-15);
  EXPECT_EQ(avg[1], 0.0);
}

TEST(SgdEpoch, ZeroGradientIsFixedPoint) {
  const ZeroOracle oracle(3);
  Rng rng(1);
  const Vector w1{0.1, -0.2, 0.3};
  EXPECT_EQ(sgd_epoch(oracle, rng, w1, 0.5, 50), w1);
  EXPECT_EQ(oracle.calls, 50u);
}

TEST(SgdEpoch, RejectsBadArguments) {
  const ZeroOracle oracle(2);
  Rng rng(1);
  EXPECT_THROW(sgd_epoch(oracle, rng, Vector(2), 0.0, 5), std::invalid_argument);
  EXPECT_THROW(sgd_epoch(oracle, rng, Vector(2), -1.0, 5), std::invalid_argument);
  EXPECT_THROW(sgd_epoch(oracle, rng, Vector(2), 0.1, 0), std::invalid_argument);
  EXPECT_THROW(sgd_epoch(oracle, rng, Vector{2.0, 0.0}, 0.1, 5), std::invalid_argument);
  EXPECT_THROW(sgd_epoch(oracle, rng, Vector(3), 0.1, 5), std::invalid_argument);
}

TEST(EpochGd, EpochCounts) {
  EXPECT_EQ(epoch_gd_epoch_count(4, 56), 3u);
  EXPECT_EQ(epoch_gd_epoch_count(4, 28), 3u);
  EXPECT_EQ(epoch_gd_epoch_count(4, 27), 2u);
  EXPECT_EQ(epoch_gd_epoch_count(4, 60), 4u);
  EXPECT_EQ(epoch_gd_epoch_count(4, 3), 0u);
  EXPECT_EQ(fasa_phase_epoch_count(4, 56), 3u);
  EXPECT_THROW(epoch_gd_epoch_count(0, 10), std::invalid_argument);
}

TEST(EpochGd, PhaseFormulaMatchesLoopGuardOnHalfBudget) {
  for (std::size_t T1 : {1u, 3u, 4u, 7u, 128u, 107u}) {
    for (std::size_t T = 0; T < 5000; T += 1 + T / 50) {
      EXPECT_EQ(fasa_phase_epoch_count(T1, T), epoch_gd_epoch_count(T1, T / 2))
          << "T1=" << T1 << " T=" << T;
    }
  }
}

TEST(EpochGd, RunsScheduleAndCountsGradients) {
  const ZeroOracle oracle(2);
  Rng rng(1);
  const SolveTrace t = epoch_gd(oracle, rng, 1.0, 4, 56, Vector(2));
  ASSERT_EQ(t.epoch_count(), 3u);
  EXPECT_EQ(t.epochs[0].length, 4u);
  EXPECT_EQ(t.epochs[1].length, 8u);
  EXPECT_EQ(t.epochs[2].length, 16u);
  EXPECT_EQ(t.gradients_consumed, 28u);
  EXPECT_EQ(oracle.calls, 28u);
  EXPECT_EQ(t.epoch_boundary_iterates.size(), 4u);
  EXPECT_FALSE(t.degenerate);
  for (std::size_t k = 1; k < t.epochs.size(); ++k) {
    EXPECT_EQ(t.epochs[k].step_size, t.epochs[k - 1].step_size / 2.0);
    EXPECT_EQ(t.epochs[k].length, 2 * t.epochs[k - 1].length);
  }
}

TEST(EpochGd, BudgetBelowFirstEpochIsDegenerate) {
  const ZeroOracle oracle(2);
  Rng rng(1);
  const Vector w0{0.2, 0.1};
  const SolveTrace t = epoch_gd(oracle, rng, 1.0, 4, 3, w0);
  EXPECT_TRUE(t.degenerate);
  EXPECT_EQ(t.final, w0);
  EXPECT_EQ(t.gradients_consumed, 0u);
  EXPECT_EQ(oracle.calls, 0u);
}

TEST(Fasa, Parameters) {
  const FasaParameters p = fasa_parameters(2.0, 0.5, 1000, 2.0);
  EXPECT_EQ(p.eta, 0.125);
  EXPECT_EQ(p.T1, 128u);
  EXPECT_EQ(p.rounding_factor, 1.0);
  EXPECT_EQ(p.warm_eta, 2.0);
  EXPECT_EQ(p.warm_T1, 4u);
  EXPECT_EQ(p.phase_budget, 500u);
  EXPECT_EQ(fasa_parameters(2.0, 0.5, 1001, 2.0).phase_budget, 500u);

  const FasaParameters q = fasa_parameters(2.0, 0.6, 1000, 2.0);
  EXPECT_EQ(q.T1, 107u);  // ceil(32 * 10/3)
  EXPECT_NEAR(q.rounding_factor, 107.0 / (320.0 / 3.0), 1e-15);
  EXPECT_THROW(fasa_parameters(2.0, 0.5, 100, 1.0), std::invalid_argument);
  EXPECT_THROW(fasa_parameters(2.0, 0.5, 100, 0.5), std::invalid_argument);
}

TEST(Fasa, SmallBudgetSkipsPhaseTwo) {
  const ProblemSpec spec = unit_least_squares(0.3);
  Rng rng(2);
  const SolveTrace t = fasa(spec, rng, 32, 2.0, Vector(4));
  EXPECT_TRUE(t.degenerate);
  ASSERT_EQ(t.epoch_count(), 2u);  // 4 + 8 <= 16 < 28
  for (const auto& e : t.epochs) EXPECT_EQ(e.phase, 1);
  EXPECT_EQ(t.final, t.epoch_boundary_iterates.back());
  EXPECT_EQ(t.gradients_consumed, 12u);
}

TEST(Fasa, PhaseTwoScheduleIdentities) {
  for (double lambda : {0.5, 0.6, 0.37}) {
    const double L = 2.0;
    const double alpha = 2.0;
    const ZeroOracle oracle(2);
    Rng rng(3);
    const SolveTrace t = fasa(oracle, rng, L, lambda, 20000, alpha, Vector(2));
    const FasaParameters p = fasa_parameters(L, lambda, 20000, alpha);
    std::size_t phase2 = 0;
    for (const auto& e : t.epochs) {
      if (e.phase != 2) continue;
      ++phase2;
      EXPECT_LE(e.step_size * L, 0.25);
      const double identity = lambda * e.step_size * static_cast<double>(e.length);
      EXPECT_NEAR(identity, std::pow(2.0, alpha + 1.0) * p.rounding_factor, 1e-12);
    }
    EXPECT_GE(phase2, 2u);
  }
}

TEST(Fasa, BudgetAccounting) {
  Rng rng(4);
  for (std::size_t T = 1; T < 6000; T += 37) {
    const ZeroOracle oracle(2);
    const SolveTrace t = fasa(oracle, rng, 2.0, 0.5, T, 2.0, Vector(2));
    const std::size_t k1 = epoch_gd_epoch_count(4, T / 2);
    const std::size_t k2 = epoch_gd_epoch_count(128, T / 2);
    const std::size_t expected = 4 * ((std::size_t{1} << k1) - 1) +
                                 128 * ((std::size_t{1} << k2) - 1);
    EXPECT_EQ(t.gradients_consumed, expected) << T;
    EXPECT_EQ(oracle.calls, expected);
    EXPECT_LE(t.gradients_consumed, T);
    EXPECT_EQ(t.epoch_count(), k1 + k2);
  }
}

TEST(EpochGdF, Parameters) {
  const FixedEpochParameters p = epoch_gd_f_parameters(2.0, 0.5, 2.0);
  EXPECT_EQ(p.eta, 1.0 / 16.0);
  EXPECT_EQ(p.epoch_length, 128u);
  EXPECT_EQ(p.eta * 2.0, 1.0 / (4.0 * 2.0));
  EXPECT_NEAR(0.5 * p.eta * static_cast<double>(p.epoch_length), 4.0 * p.rounding_factor, 1e-15);
  for (double beta : {1.5, 3.7, 10.0}) {
    const FixedEpochParameters q = epoch_gd_f_parameters(2.0, 0.45, beta);
    EXPECT_LE(q.eta * 2.0, 0.25);
    EXPECT_NEAR(0.45 * q.eta * static_cast<double>(q.epoch_length), 4.0 * q.rounding_factor,
                1e-12);
    EXPECT_GE(q.rounding_factor, 1.0);
  }
  EXPECT_THROW(epoch_gd_f_parameters(2.0, 0.5, 1.0), std::invalid_argument);
}

TEST(EpochGdF, RunsFloorOfBudgetOverEpochLength) {
  const ZeroOracle oracle(2);
  Rng rng(5);
  const SolveTrace t = epoch_gd_f(oracle, rng, 2.0, 0.5, 2.0, 1000, Vector(2));
  EXPECT_EQ(t.epoch_count(), 7u);
  EXPECT_EQ(t.gradients_consumed, 896u);
  EXPECT_EQ(oracle.calls, 896u);
  for (const auto& e : t.epochs) {
    EXPECT_EQ(e.step_size, 1.0 / 16.0);
    EXPECT_EQ(e.length, 128u);
  }
  const SolveTrace exact = epoch_gd_f(oracle, rng, 2.0, 0.5, 2.0, 1024, Vector(2));
  EXPECT_EQ(exact.epoch_count(), 8u);

  const Vector w0{0.1, 0.0};
  const SolveTrace none = epoch_gd_f(oracle, rng, 2.0, 0.5, 2.0, 127, w0);
  EXPECT_TRUE(none.degenerate);
  EXPECT_EQ(none.final, w0);
}

TEST(Solvers, IteratesStayFeasible) {
  const ProblemSpec spec = unit_least_squares(0.3);
  const Vector w0 = boundary_start(spec);
  Rng rng(6);
  std::vector<SolveTrace> traces;
  traces.push_back(epoch_gd(spec, rng, 2.0, 4, 3000, w0));
  traces.push_back(fasa(spec, rng, 3000, 2.0, w0));
  traces.push_back(epoch_gd_f(spec, rng, 2.0, 3000, w0));
  traces.push_back(fixed_step_sgd(spec, rng, 0.25, 3000, w0, true));
  for (const auto& t : traces) {
    for (const auto& w : t.epoch_boundary_iterates) EXPECT_TRUE(spec.domain().contains(w));
    EXPECT_TRUE(spec.domain().contains(t.final));
    EXPECT_LE(t.gradients_consumed, 3000u);
  }
}

TEST(Solvers, DeterministicForFixedSeed) {
  const ProblemSpec spec = unit_least_squares(0.3);
  auto run = [&](std::uint64_t seed) {
    Rng rng(seed);
    std::vector<SolveTrace> out;
    out.push_back(epoch_gd(spec, rng, 2.0, 4, 500, Vector(4)));
    out.push_back(fasa(spec, rng, 500, 2.0, Vector(4)));
    out.push_back(epoch_gd_f(spec, rng, 2.0, 500, Vector(4)));
    out.push_back(fixed_step_sgd(spec, rng, 0.25, 500, Vector(4), false));
    return out;
  };
  const auto a = run(77);
  const auto b = run(77);
  const auto c = run(78);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].epoch_boundary_iterates, b[i].epoch_boundary_iterates);
    EXPECT_EQ(a[i].final, b[i].final);
    EXPECT_NE(a[i].final, c[i].final);
  }
}

TEST(Solvers, ZeroNoiseFixedPoint) {
  const ProblemSpec spec = unit_least_squares(0.0);
  const Vector& w = spec.w_star();
  Rng rng(7);
  EXPECT_EQ(epoch_gd(spec, rng, 2.0, 4, 1000, w).final, w);
  EXPECT_EQ(fasa(spec, rng, 1000, 2.0, w).final, w);
  EXPECT_EQ(epoch_gd_f(spec, rng, 2.0, 1000, w).final, w);
  EXPECT_EQ(fixed_step_sgd(spec, rng, 0.25, 1000, w, true).final, w);
  EXPECT_EQ(fixed_step_sgd(spec, rng, 0.25, 1000, w, false).final, w);
}

TEST(FixedStepSgd, VanishingStep) {
  const ProblemSpec spec = unit_least_squares(0.3);
  Rng rng(8);
  const Vector w0{0.5, -0.5, 0.2, 0.0};
  const SolveTrace t = fixed_step_sgd(spec, rng, 1e-12, 10, w0, false);
  EXPECT_LT(distance(t.final, w0), 1e-9);
  EXPECT_EQ(t.gradients_consumed, 10u);
}

TEST(FixedStepSgd, ConstrainedKeepsEveryIterateInDomain) {
  const ProblemSpec spec = unit_least_squares(0.3);
  const SpyOracle spy(spec);
  Rng rng(9);
  const SolveTrace t = fixed_step_sgd(spy, rng, 0.45, spec.certificate().lambda, 10000,
                                      boundary_start(spec), true);
  EXPECT_EQ(spy.calls, 10000u);
  EXPECT_LE(spy.max_radius, 2.0 * (1.0 + 1e-12));
  EXPECT_NEAR(spy.max_radius, 2.0, 1e-12);  // the start is on the sphere
  EXPECT_TRUE(spec.domain().contains(t.final));
}

TEST(FixedStepSgd, StepSizePrecondition) {
  const ProblemSpec spec = unit_least_squares(0.3);
  Rng rng(10);
  EXPECT_THROW(fixed_step_sgd(spec, rng, 2.0, 10, Vector(4), true), std::invalid_argument);
  EXPECT_THROW(fixed_step_sgd(spec, rng, 3.0, 10, Vector(4), true), std::invalid_argument);
  EXPECT_NO_THROW(fixed_step_sgd(spec, rng, 1.99, 10, Vector(4), true));
  EXPECT_THROW(fixed_step_sgd(spec, rng, 0.1, 10, Vector{3.0, 0.0, 0.0, 0.0}, false),
               std::invalid_argument);
}

TEST(FixedStepSgd, RealizableDistanceContracts) {
  const ProblemSpec spec = unit_least_squares(0.0);
  const auto& c = spec.certificate();
  const double gamma = 1.0 / (2.0 * c.L);
  const Vector w0 = boundary_start(spec);
  const double d0 = squared_distance(w0, spec.w_star());
  const std::size_t T = 40;
  std::vector<double> dist;
  for (std::uint64_t j = 0; j < 100; ++j) {
    Rng rng(1000 + j);
    dist.push_back(squared_distance(fixed_step_sgd(spec, rng, gamma, T, w0, false).final,
                                    spec.w_star()));
  }
  double mean = 0.0;
  for (double v : dist) mean += v;
  mean /= 100.0;
  double var = 0.0;
  for (double v : dist) var += (v - mean) * (v - mean);
  const double se = std::sqrt(var / 99.0 / 100.0);
  const double contraction = 1.0 - 2.0 * gamma * c.lambda * (1.0 - gamma * c.L);
  EXPECT_DOUBLE_EQ(contraction, 0.875);
  EXPECT_LE(mean - 3.0 * se, std::pow(contraction, T) * d0);
  EXPECT_LT(mean, d0 * 1e-2);
}

std::size_t ceil_log2_ratio(double num, double den) {
  std::size_t k = 0;
  double v = den;
  while (v < num) {
    v *= 2.0;
    ++k;
  }
  return k;
}

TEST(IterationComplexity, Examples) {
  EXPECT_EQ(iteration_complexity_ours(4.0, 0.03, 0.01, 1.0), 5376.0);
  EXPECT_EQ(16 * 12 * 4 * ceil_log2_ratio(1.0, 0.01), 5376u);

  for (double eps : {0.5, 0.01, 1e-6}) {
    const double expected = 16.0 * 4.0 * static_cast<double>(ceil_log2_ratio(1.0, eps));
    EXPECT_EQ(iteration_complexity_ours(4.0, 0.0, eps, 1.0), expected);
    EXPECT_EQ(iteration_complexity_ours(4.0, eps / 4.0, eps, 1.0), expected);
  }
  EXPECT_THROW(iteration_complexity_ours(4.0, 0.0, 0.0, 1.0), std::invalid_argument);
}

}  // namespace
}  // namespace epochsa
