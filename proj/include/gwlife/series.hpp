#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

#include "gwlife/errors.hpp"
#include "gwlife/extended_real.hpp"

namespace gwlife {

/// Result of summing a nonnegative series.
struct SeriesValue {
    ExtendedReal value;
    double tail_bound = 0.0;  ///< certified bound on the omitted tail
    std::size_t terms = 0;

    bool diverged() const { return value.is_infinite(); }
};

/// Convergence policy shared by every series in the library.
struct SeriesPolicy {
    double tail_tolerance = 1e-14;     ///< stop once the geometric majorant of the tail is below this fraction of the sum
    double divergence_sum = 1e12;      ///< partial sums above this are declared divergent
    int divergence_run = 64;           ///< consecutive term ratios >= 1 declaring divergence
    std::size_t max_terms = 100'000'000;
};

/// Sums t(start) + t(start+1) + ... for a nonnegative series.
///
/// `term(k)` returns the k-th term. `ratio_bound(k)` returns a bound on
/// t(j+1)/t(j) valid for every j >= k; the tail after index k is then
/// majorised by t(k) * r / (1 - r). A finite bound >= 1 means the terms may
/// still grow and the summation keeps going; an infinite bound means nothing
/// is known, and then a run of nondecreasing terms is taken as divergence.
/// Terms that are exactly zero with a zero ratio bound terminate the sum
/// (finite support).
template <class Term, class RatioBound>
SeriesValue sum_nonnegative_series(Term&& term, RatioBound&& ratio_bound, std::size_t start,
                                   const SeriesPolicy& policy = {}) {
    // Neumaier compensated summation
    double sum = 0.0;
    double comp = 0.0;
    double prev = -1.0;
    int ratio_run = 0;
    for (std::size_t k = start, n = 0; n < policy.max_terms; ++k, ++n) {
        const double t = term(k);
        const double s = sum + t;
        comp += std::abs(sum) >= std::abs(t) ? (sum - s) + t : (t - s) + sum;
        sum = s;

        if (!std::isfinite(sum) || sum + comp > policy.divergence_sum) {
            return {ExtendedReal::infinity(), std::numeric_limits<double>::infinity(), n + 1};
        }
        const double r = ratio_bound(k);
        if (std::isinf(r) && prev > 0.0 && t >= prev) {
            if (++ratio_run >= policy.divergence_run) {
                return {ExtendedReal::infinity(), std::numeric_limits<double>::infinity(), n + 1};
            }
        } else {
            ratio_run = 0;
        }
        prev = t;

        if (r < 1.0) {
            const double tail = t * r / (1.0 - r);
            if (tail <= policy.tail_tolerance * std::abs(sum + comp)) {
                return {ExtendedReal::finite(sum + comp), tail, n + 1};
            }
        }
    }
    throw ConvergenceError("series did not converge within the term budget");
}

} // namespace gwlife
