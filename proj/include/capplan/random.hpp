#pragma once

// Reproducible random streams. std::mt19937_64 is bit-exact across standard
// libraries; the distribution transforms below are written out so sampled
// values do not depend on the library's distribution implementations.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace capplan {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed derived from a master seed and a path of stream coordinates, e.g.
/// (domain, scenario, instance). Distinct paths give independent streams.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

Rng make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(Rng& rng);

double uniform_real(Rng& rng, double low, double high);

/// Uniform integer in [low, high], unbiased.
std::int64_t uniform_int(Rng& rng, std::int64_t low, std::int64_t high);

/// Standard normal via the Box-Muller transform (one variate per call).
double standard_normal(Rng& rng);

}  // namespace capplan
