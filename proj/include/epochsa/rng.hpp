#pragma once

#include <cstdint>
#include <random>

#include "epochsa/vector.hpp"

namespace epochsa {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic stream seed for (base, a, b); distinct inputs give
/// distinct outputs with overwhelming probability.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

/// Uniform point on the unit sphere in `dim` dimensions.
Vector uniform_on_sphere(std::size_t dim, Rng& rng);

double uniform(double lo, double hi, Rng& rng);

}  // namespace epochsa
