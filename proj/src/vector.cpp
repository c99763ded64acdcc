#include "epochsa/vector.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace epochsa {

Vector Vector::unit(std::size_t dim, std::size_t axis) {
  if (axis >= dim) {
    throw std::invalid_argument("unit vector axis out of range");
  }
  Vector e(dim);
  e[axis] = 1.0;
  return e;
}

bool Vector::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double Vector::squared_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return s;
}

double Vector::norm() const { return std::sqrt(squared_norm()); }

Vector& Vector::operator+=(const Vector& other) {
  require_same_dimension(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Vector& Vector::operator-=(const Vector& other) {
  require_same_dimension(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Vector& Vector::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Vector& Vector::axpy(double s, const Vector& x) {
  require_same_dimension(*this, x);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * x.data_[i];
  return *this;
}

Vector operator+(Vector a, const Vector& b) { return a += b; }
Vector operator-(Vector a, const Vector& b) { return a -= b; }
Vector operator*(double s, Vector a) { return a *= s; }

double dot(const Vector& a, const Vector& b) {
  require_same_dimension(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_distance(const Vector& a, const Vector& b) {
  require_same_dimension(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double distance(const Vector& a, const Vector& b) {
  return std::sqrt(squared_distance(a, b));
}

void require_same_dimension(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("dimension mismatch: " +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
  }
}

void require_finite(const Vector& v, const char* what) {
  if (!v.all_finite()) {
    throw std::invalid_argument(std::string(what) + " has non-finite entries");
  }
}

void RunningAverage::add(const Vector& w) {
  require_same_dimension(mean_, w);
  ++count_;
  const double inv = 1.0 / static_cast<double>(count_);
  for (std::size_t i = 0; i < w.size(); ++i) {
    mean_[i] += (w[i] - mean_[i]) * inv;
  }
}

const Vector& RunningAverage::mean() const {
  if (count_ == 0) throw std::logic_error("running average of zero vectors");
  return mean_;
}

Vector running_average(std::span<const Vector> stream, std::size_t count) {
  if (count == 0) throw std::invalid_argument("running_average: zero count");
  if (count > stream.size()) {
    throw std::invalid_argument("running_average: count exceeds stream length");
  }
  RunningAverage avg(stream.front().size());
  for (std::size_t i = 0; i < count; ++i) avg.add(stream[i]);
  return avg.mean();
}

}  // namespace epochsa
