#include "epochsa/domain.hpp"

#include <cmath>
#include <stdexcept>

namespace epochsa {

BallDomain::BallDomain(Vector center, double radius)
    : center_(std::move(center)), radius_(radius) {
  if (!(radius_ > 0.0) || !std::isfinite(radius_)) {
    throw std::invalid_argument("ball radius must be positive and finite");
  }
  require_finite(center_, "ball center");
}

bool BallDomain::contains(const Vector& w, double tol) const {
  return distance(w, center_) <= radius_ + tol;
}

void project_in_place(const BallDomain& domain, Vector& w) {
  require_same_dimension(domain.center(), w);
  require_finite(w, "projection input");
  const double dist = distance(w, domain.center());
  if (dist <= domain.radius()) return;
  const double scale = domain.radius() / dist;
  const Vector& c = domain.center();
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = c[i] + scale * (w[i] - c[i]);
  }
}

Vector project(const BallDomain& domain, const Vector& w) {
  Vector out = w;
  project_in_place(domain, out);
  return out;
}

}  // namespace epochsa
