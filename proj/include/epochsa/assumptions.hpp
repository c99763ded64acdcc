#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "epochsa/problems.hpp"

namespace epochsa {

/// Outcome of one randomized property check.
struct PropertyCheck {
  std::string name;
  std::size_t trials = 0;
  std::size_t failures = 0;
  /// Largest observed lhs/rhs-style ratio (<= 1 means every trial held).
  double worst_ratio = 0.0;
  bool passed() const { return failures == 0; }
};

struct AssumptionReport {
  std::vector<PropertyCheck> checks;
  bool all_passed() const;
  const PropertyCheck* find(const std::string& name) const;
};

struct AssumptionCheckOptions {
  std::size_t trials = 10000;
  /// Points at which the strong-convexity inequality is checked.
  std::size_t strong_convexity_points = 10000;
  std::uint64_t seed = 0x5eed;
};

/// Randomized checks of the certificate: nonnegativity, smoothness (L),
/// gradient bound (G), self-bounding ||grad f||^2 <= 4 L f, and the
/// strong-convexity distance inequality F(w) - F* >= lambda/2 ||w - w*||^2.
AssumptionReport check_assumptions(const ProblemSpec& spec,
                                   const AssumptionCheckOptions& options = {});

/// Idempotence, nonexpansiveness and membership of the ball projection.
AssumptionReport check_projection(const BallDomain& domain, std::size_t trials,
                                  std::uint64_t seed);

}  // namespace epochsa
