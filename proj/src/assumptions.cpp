#include "epochsa/assumptions.hpp"

#include <algorithm>
#include <cmath>

namespace epochsa {
namespace {

constexpr double kRelativeSlack = 1e-9;
constexpr double kAbsoluteSlack = 1e-9;

// Every fourth point sits on the boundary, where the bounds are tightest.
Vector sample_point(const BallDomain& domain, Rng& rng, std::size_t i) {
  if (i % 4 == 3) {
    Vector w = uniform_on_sphere(domain.dimension(), rng);
    w *= domain.radius();
    w += domain.center();
    project_in_place(domain, w);
    return w;
  }
  return random_point_in(domain, rng);
}

class Tally {
 public:
  explicit Tally(std::string name) { check_.name = std::move(name); }
  // Records lhs <= rhs; ratio is lhs / rhs when rhs > 0.
  void record(double lhs, double rhs, double slack) {
    ++check_.trials;
    if (!(lhs <= rhs + slack)) ++check_.failures;
    if (rhs > 0.0) check_.worst_ratio = std::max(check_.worst_ratio, lhs / rhs);
  }
  PropertyCheck take() { return std::move(check_); }

 private:
  PropertyCheck check_;
};

}  // namespace

bool AssumptionReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const PropertyCheck& c) { return c.passed(); });
}

const PropertyCheck* AssumptionReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

AssumptionReport check_assumptions(const ProblemSpec& spec,
                                   const AssumptionCheckOptions& options) {
  const auto& cert = spec.certificate();
  const BallDomain& domain = spec.domain();
  Rng rng(derive_seed(options.seed, spec.seed(), 0xa55));

  Tally nonneg("nonnegativity");
  Tally smooth("smoothness");
  Tally bounded("gradient_bound");
  Tally self_bounding("self_bounding");
  for (std::size_t i = 0; i < options.trials; ++i) {
    const SampledLoss f = spec.sample_loss(rng);
    const Vector w = sample_point(domain, rng, i);
    const Vector w2 = sample_point(domain, rng, i + 1);
    const double value = f.value(w);
    const Vector g = f.grad(w);
    const Vector g2 = f.grad(w2);

    nonneg.record(-value, 0.0, 0.0);
    smooth.record(distance(g, g2), cert.L * distance(w, w2) * (1.0 + kRelativeSlack), 0.0);
    bounded.record(g.norm(), cert.G * (1.0 + kRelativeSlack), 0.0);
    self_bounding.record(g.squared_norm(), 4.0 * cert.L * value, kAbsoluteSlack);
  }

  Tally strong("strong_convexity");
  double slack = kAbsoluteSlack;
  if (!cert.F_star_is_exact) {
    const double se_opt = spec.risk_estimate(spec.w_star()).std_error;
    slack += 3.0 * std::hypot(se_opt, cert.F_star_std_error);
  }
  for (std::size_t i = 0; i < options.strong_convexity_points; ++i) {
    const Vector w = sample_point(domain, rng, i);
    const double excess = spec.expected_risk(w) - cert.F_star;
    strong.record(0.5 * cert.lambda * squared_distance(w, spec.w_star()), excess, slack);
  }

  AssumptionReport report;
  report.checks.push_back(nonneg.take());
  report.checks.push_back(smooth.take());
  report.checks.push_back(bounded.take());
  report.checks.push_back(self_bounding.take());
  report.checks.push_back(strong.take());
  return report;
}

AssumptionReport check_projection(const BallDomain& domain, std::size_t trials,
                                  std::uint64_t seed) {
  Rng rng(seed);
  const BallDomain wide(domain.center(), 3.0 * domain.radius());
  Tally idempotent("projection_idempotence");
  Tally nonexpansive("projection_nonexpansive");
  Tally membership("projection_membership");
  for (std::size_t i = 0; i < trials; ++i) {
    const Vector a = random_point_in(wide, rng);
    const Vector b = random_point_in(wide, rng);
    const Vector pa = project(domain, a);
    const Vector pb = project(domain, b);
    idempotent.record(distance(project(domain, pa), pa), 0.0, kGeometryTolerance);
    nonexpansive.record(distance(pa, pb), distance(a, b), kGeometryTolerance);
    membership.record(distance(pa, domain.center()), domain.radius(), kGeometryTolerance);
  }
  AssumptionReport report;
  report.checks.push_back(idempotent.take());
  report.checks.push_back(nonexpansive.take());
  report.checks.push_back(membership.take());
  return report;
}

}  // namespace epochsa
