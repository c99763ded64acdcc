#include "epochsa/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace epochsa {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(mix64(base) ^ a) ^ (b * 0xd1342543de82ef95ULL + 1));
}

Vector uniform_on_sphere(std::size_t dim, Rng& rng) {
  if (dim == 0) throw std::invalid_argument("sphere dimension must be >= 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(dim);
  double n2 = 0.0;
  // rejection of the (measure-zero) near-origin draw keeps normalization safe
  do {
    n2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      z[i] = normal(rng);
      n2 += z[i] * z[i];
    }
  } while (n2 < 1e-300);
  z *= 1.0 / std::sqrt(n2);
  return z;
}

double uniform(double lo, double hi, Rng& rng) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace epochsa
