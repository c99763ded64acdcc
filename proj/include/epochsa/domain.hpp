#pragma once

#include "epochsa/vector.hpp"

namespace epochsa {

inline constexpr double kGeometryTolerance = 1e-12;

/// Closed Euclidean ball {w : ||w - center|| <= radius}.
class BallDomain {
 public:
  BallDomain(Vector center, double radius);

  const Vector& center() const { return center_; }
  double radius() const { return radius_; }
  std::size_t dimension() const { return center_.size(); }

  bool contains(const Vector& w, double tol = kGeometryTolerance) const;

 private:
  Vector center_;
  double radius_;
};

/// Nearest point of the ball to w. Throws on dimension mismatch or
/// non-finite input.
Vector project(const BallDomain& domain, const Vector& w);

/// In-place variant used by the solver inner loops.
void project_in_place(const BallDomain& domain, Vector& w);

}  // namespace epochsa
