#pragma once

#include <cstdint>
#include <initializer_list>

namespace sevo::rng {

/// splitmix64 finalizer; the mixing primitive behind the counter-based
/// streams used for Wiener path generation.
std::uint64_t mix64(std::uint64_t x);

/// Folds a key tuple into a single 64-bit state. Order-sensitive.
std::uint64_t fold(std::initializer_list<std::uint64_t> key);

/// Uniform draw in (0, 1) from a mixed 64-bit state.
double to_unit(std::uint64_t h);

/// Inverse standard-normal CDF (Wichura's AS 241, double precision).
double inv_normal_cdf(double p);

/// Standard normal deviate keyed by a counter tuple. The same tuple
/// always yields the same value, independent of evaluation order.
double normal(std::initializer_list<std::uint64_t> key);

}  // namespace sevo::rng
