#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gwlife/distributions.hpp"

namespace gwlife {

/// k x k northwest corner of the mean progeny matrix.
///
/// Row i (type i, age i-1) has m q_i in column 1 and q_i on the
/// superdiagonal; everything else is zero.
class TruncatedMatrix {
public:
    TruncatedMatrix(double m, std::vector<double> hazards);

    std::size_t size() const { return hazards_.size(); }
    double offspring_mean() const { return m_; }
    /// q_i for row i (1-based).
    double hazard(std::size_t i) const { return hazards_[i - 1]; }

    /// Entry (i, j), 1-based.
    double entry(std::size_t i, std::size_t j) const;

    /// y = M x (column action).
    void apply(std::span<const double> x, std::span<double> y) const;
    /// y = x M (row action).
    void apply_left(std::span<const double> x, std::span<double> y) const;

private:
    double m_;
    std::vector<double> hazards_;
};

enum class RadiusMethod { ScalarRoot, PowerIteration };

std::string_view to_string(RadiusMethod method);

struct RadiusSequence {
    std::vector<std::size_t> k_values;
    std::vector<double> rho;
    RadiusMethod method = RadiusMethod::ScalarRoot;
};

TruncatedMatrix truncated_matrix(const OffspringModel& off, const LifetimeModel& life, std::size_t k);

/// Spectral radius of the k x k truncation.
///
/// ScalarRoot solves m sum_{j<=k} Q_j s^j = 1 and returns 1/s;
/// PowerIteration iterates the sparse matrix until the Collatz-Wielandt
/// bounds close to 1e-12 (relative).
double truncated_radius(const OffspringModel& off, const LifetimeModel& life, std::size_t k,
                        RadiusMethod method = RadiusMethod::ScalarRoot);

double truncated_radius(const TruncatedMatrix& matrix, RadiusMethod method);

RadiusSequence radius_sequence(const OffspringModel& off, const LifetimeModel& life, std::size_t k_max,
                               RadiusMethod method = RadiusMethod::ScalarRoot);

/// Row 1 of M^n restricted to types 1..n+1, i.e. E(Z_n | Z_0 = e_1).
/// Types beyond n+1 cannot be reached in n seasons, so this is exact.
std::vector<double> mean_vector(const OffspringModel& off, const LifetimeModel& life, std::size_t n);

/// E(w . Z_n | Z_0 = e_1); all-ones weights by default. Weights beyond the
/// supplied length count as zero.
double mean_total(const OffspringModel& off, const LifetimeModel& life, std::size_t n,
                  std::optional<std::span<const double>> weights = std::nullopt);

} // namespace gwlife
