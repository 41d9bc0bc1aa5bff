#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "gwlife/extended_real.hpp"
#include "gwlife/rng.hpp"
#include "gwlife/series.hpp"

namespace gwlife {

// ---------------------------------------------------------------------------
// Specifications
// ---------------------------------------------------------------------------

namespace offspring {
struct Pmf { std::vector<double> p; };
/// Geometric on {0, 1, ...}: p_k = (1 - t) t^k with t = mean / (1 + mean).
struct Geometric { double mean; };
struct Poisson { double mean; };
/// Point mass at an integer j >= 1.
struct Point { std::int64_t j; };
} // namespace offspring

using OffspringSpec =
    std::variant<offspring::Pmf, offspring::Geometric, offspring::Poisson, offspring::Point>;

namespace lifetime {
struct Pmf { std::vector<double> h; };
/// h_k = (1 - r) r^k, k >= 0, with r = mean / (1 + mean).
struct Geometric { double mean; };
/// h_k = C a^k k^{-b} for k >= 1, h_0 = 0, with 0 < a <= 1 and b >= 0.
struct PowerTilt { double a; double b; };
} // namespace lifetime

using LifetimeSpec = std::variant<lifetime::Pmf, lifetime::Geometric, lifetime::PowerTilt>;

/// Sum over i >= j of x^(i-j) * i^(-c).
///
/// For x < 1 this is summed directly; for x == 1 (which needs c > 1) the tail
/// is closed with an Euler-Maclaurin remainder.
double tilted_tail(double x, double c, std::size_t j);

// ---------------------------------------------------------------------------
// Offspring law
// ---------------------------------------------------------------------------

class OffspringModel {
public:
    explicit OffspringModel(OffspringSpec spec);

    const OffspringSpec& spec() const { return spec_; }

    double pmf(std::size_t k) const;
    double mean() const { return mean_; }
    /// f''(1), the second factorial moment.
    ExtendedReal second_factorial_moment() const;
    /// Radius of convergence of f.
    ExtendedReal radius() const;

    /// f (order 0), f' or f'' at s >= 0. Infinite beyond the radius.
    ExtendedReal pgf(double s, int order = 0) const;

    /// One offspring count.
    std::uint64_t sample(CounterRng& rng) const;
    /// Total offspring of n independent parents, drawn exactly.
    std::uint64_t sample_sum(std::uint64_t n, CounterRng& rng) const;

private:
    OffspringSpec spec_;
    double mean_ = 0.0;
    double ratio_ = 0.0;         // geometric t
    std::vector<double> cdf_;    // explicit pmf
};

// ---------------------------------------------------------------------------
// Lifetime law
// ---------------------------------------------------------------------------

/// Lifetime distribution with its hazard/survival representation.
///
/// Survival is Q_k = q_1 ... q_k = sum_{j >= k} h_j with Q_0 = 1, and the
/// hazard q_k = Q_k / Q_{k-1} (zero once the tail is exhausted).
class LifetimeModel {
public:
    explicit LifetimeModel(LifetimeSpec spec);

    const LifetimeSpec& spec() const { return spec_; }

    double pmf(std::size_t k) const;
    /// q_k for k >= 1.
    double hazard(std::size_t k) const;
    /// Q_k, evaluated from the tail of the pmf (not as a hazard product).
    double survival(std::size_t k) const;
    double mean() const { return mean_; }
    /// Absolute numerical uncertainty of mean().
    double mean_error() const { return mean_error_; }
    /// g''(1); infinite for heavy tails.
    ExtendedReal second_factorial_moment() const;
    /// R = 1 / limsup Q_k^{1/k}.
    ExtendedReal tail_radius() const;
    /// Largest k with h_k > 0, when the support is finite.
    std::optional<std::size_t> support_max() const;

    /// sup_{j > k} q_j.
    double hazard_bound(std::size_t k) const;

    /// g (order 0), g' or g'' at s >= 0. Infinite where the series diverges.
    SeriesValue pgf(double s, int order = 0) const;

    /// sum_{j >= from} j^power Q_j s^j for power in {0, 1}.
    ///
    /// Summed directly below the tail radius, from closed forms at the
    /// radius, infinite beyond it.
    SeriesValue survival_series(double s, std::size_t from, int power) const;

private:
    SeriesValue survival_series_at_radius(std::size_t from, int power) const;
    double log_survival(std::size_t k) const;

    LifetimeSpec spec_;
    double mean_ = 0.0;
    double mean_error_ = 0.0;
    double ratio_ = 0.0;             // geometric r
    double norm_ = 0.0;              // power-tilt C
    std::vector<double> h_;          // explicit pmf (normalised)
    std::vector<double> tail_;       // explicit tail sums, tail_[k] = Q_k
    std::vector<double> hazard_sup_; // explicit: hazard_sup_[k] = sup_{j > k} q_j
};

/// Evaluates either model's pgf uniformly.
ExtendedReal pgf_eval(const OffspringModel& model, double s, int order);
ExtendedReal pgf_eval(const LifetimeModel& model, double s, int order);

ExtendedReal tail_radius(const LifetimeModel& model);

OffspringModel make_offspring(const OffspringSpec& spec);
LifetimeModel make_lifetime(const LifetimeSpec& spec);

} // namespace gwlife
