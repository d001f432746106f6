#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>

#include "bvq/errors.hpp"

namespace bvq::quantum {

/// nullopt means exact expectation values (infinite shots).
using ShotCount = std::optional<std::uint64_t>;

template <typename Rng>
double sample_expectation(double exact, ShotCount shots, Rng& rng) {
  if (!shots) return exact;
  if (*shots == 0) throw InvalidArgument("shot count must be >= 1");
  if (std::abs(exact) > 1.0 + 1e-9) throw InvalidArgument("expectation outside [-1, 1]");
  const double p = std::clamp((1.0 + exact) / 2.0, 0.0, 1.0);
  std::binomial_distribution<std::uint64_t> dist(*shots, p);
  const double successes = static_cast<double>(dist(rng));
  return 2.0 * successes / static_cast<double>(*shots) - 1.0;
}

inline double sample_expectation(double exact, ShotCount shots, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_expectation(exact, shots, rng);
}

}  // namespace bvq::quantum
