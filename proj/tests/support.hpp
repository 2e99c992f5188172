#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "gmc/common.hpp"

namespace gmc::test {

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

/// |a - b| relative to the larger magnitude (or 1 when both are tiny).
inline double rel_diff(double a, double b, double floor = 1.0) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline std::mt19937_64 rng(std::uint64_t seed = 20240607) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

}  // namespace gmc::test
