#pragma once

#include <cstddef>
#include <vector>

#include "gwlife/distributions.hpp"

namespace gwlife {

struct ExtinctionReport {
    double q = 1.0;         ///< extinction probability
    bool certain = true;    ///< q == 1
    double residual = 0.0;  ///< |g(f(q)) - q|
    std::size_t iterations = 0;
};

/// m l <= 1 (with the critical tolerance).
bool is_certain_extinction(const OffspringModel& off, const LifetimeModel& life);

/// Smallest root of g(f(s)) = s on [0, 1]: monotone fixed-point iteration
/// from 0, then bisection polish on g(f(s)) - s.
ExtinctionReport extinction_probability(const OffspringModel& off, const LifetimeModel& life,
                                        double tol = 1e-12);

/// Extinction probabilities s_1..s_n started from a single individual of
/// each type, from 1 - q_i + q_i s_{i+1} f(s_1) = s_i closed with s_N = 1
/// far out (N = n + padding) and s_1 pinned to q in the offspring factor.
std::vector<double> typewise_extinction(const OffspringModel& off, const LifetimeModel& life,
                                        double q, std::size_t n);

} // namespace gwlife
