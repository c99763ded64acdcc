#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace epochsa {

/// Dense real vector of fixed dimension. Binary operations require equal
/// dimensions and throw std::invalid_argument otherwise.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim, double fill = 0.0) : data_(dim, fill) {}
  Vector(std::initializer_list<double> values) : data_(values) {}
  explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

  static Vector unit(std::size_t dim, std::size_t axis);

  std::size_t size() const { return data_.size(); }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  bool all_finite() const;
  double norm() const;
  double squared_norm() const;

  Vector& operator+=(const Vector& other);
  Vector& operator-=(const Vector& other);
  Vector& operator*=(double s);
  /// this += s * x
  Vector& axpy(double s, const Vector& x);

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> data_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator*(double s, Vector a);

double dot(const Vector& a, const Vector& b);
double squared_distance(const Vector& a, const Vector& b);
double distance(const Vector& a, const Vector& b);

void require_same_dimension(const Vector& a, const Vector& b);
void require_finite(const Vector& v, const char* what);

/// Incremental arithmetic mean, m <- m + (w - m) / t. Holds O(d) state.
class RunningAverage {
 public:
  explicit RunningAverage(std::size_t dim) : mean_(dim) {}

  void add(const Vector& w);
  std::size_t count() const { return count_; }
  /// Throws std::logic_error when nothing has been added.
  const Vector& mean() const;

 private:
  Vector mean_;
  std::size_t count_ = 0;
};

/// Mean of the first `count` vectors of `stream`.
Vector running_average(std::span<const Vector> stream, std::size_t count);

}  // namespace epochsa
