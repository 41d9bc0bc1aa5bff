#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gwlife/distributions.hpp"
#include "gwlife/extended_real.hpp"
#include "gwlife/series.hpp"

namespace gwlife {

/// |ml - 1| at or below this is treated as exactly critical.
inline constexpr double kCriticalTolerance = 1e-12;

/// Which characterisation of the convergence radius applies.
enum class RadiusCase {
    SubcriticalRoot,      ///< ml < 1, F(R) >= 1: gamma solves F(s) = 1 in (1, R]
    SubcriticalBoundary,  ///< ml < 1, F(R) < 1: gamma = R
    Critical,             ///< ml = 1: rho = 1
    Supercritical,        ///< ml > 1: gamma is the smallest fixed point of B
};

enum class Criticality { Subcritical, Critical, Supercritical };

enum class Recurrence { Transient, PositiveRecurrent, NullRecurrent };

std::string_view to_string(RadiusCase c);
std::string_view to_string(Criticality c);
std::string_view to_string(Recurrence r);

struct SpectralReport {
    double gamma = 0.0;  ///< convergence radius of the mean matrix
    double rho = 0.0;    ///< convergence norm, 1 / gamma
    RadiusCase radius_case = RadiusCase::Critical;
    Criticality criticality = Criticality::Critical;
    double ml = 0.0;
    ExtendedReal R;       ///< radius of convergence of F
    ExtendedReal F_at_R;  ///< boundary value of F (limit from below)
    double root_residual = 0.0;  ///< |F(gamma) - 1|, |B(gamma) - gamma| or |ml - 1|
    int iterations = 0;
    /// m g'(gamma), reported in the subcritical root case (never exceeds 1).
    std::optional<ExtendedReal> m_gprime_at_gamma;
};

/// Boundary value F(R) with the evidence used to compare it against 1.
struct BoundaryValue {
    ExtendedReal value;
    double error_bound = 0.0;
    bool at_least_one = false;         ///< some evaluation from below already reached 1
    bool certified_below_one = false;  ///< value + error_bound < 1
};

struct RecurrenceClass {
    Recurrence kind = Recurrence::PositiveRecurrent;
    Criticality criticality = Criticality::Critical;
    std::string clause;  ///< the inequality set that fired
    double ml = 0.0;
    std::optional<ExtendedReal> F_at_R;  ///< used when ml < 1
    std::optional<ExtendedReal> g2;      ///< g''(1), used when ml = 1
};

struct InvariantSystem {
    std::size_t K = 0;
    double gamma = 0.0;
    std::vector<double> u;  ///< gamma-invariant vector, u[0] = 1 (type 1)
    std::vector<double> v;  ///< gamma-invariant measure, v[0] = 1 (type 1)
    ExtendedReal S;         ///< m sum_{j>=2} (j-1) Q_j gamma^j
    double S_error = 0.0;
    ExtendedReal vu;        ///< sum_i u_i v_i over the full series
    std::optional<double> growth_constant;  ///< (1 + 1/m) / (1 + S)
    std::optional<double> printed_constant; ///< (1 + 1/m) / S, kept for comparison
    std::string growth_note;
    double u_residual = 0.0;            ///< max relative residual of gamma M u = u, rows 2..K-1
    double v_residual = 0.0;            ///< max relative residual of gamma v M = v, columns 2..K
    double measure_head_residual = 0.0; ///< first column of gamma v M = v including the tail
};

/// F(s) = m sum_{j>=1} Q_j s^j.
SeriesValue F_eval(const LifetimeModel& life, double m, double s);

/// F at its radius of convergence, approached from below and summed on the boundary.
BoundaryValue F_at_radius(const LifetimeModel& life, double m);

/// Compares ml with 1; throws IndeterminateError when the numerical
/// uncertainty of ml straddles the critical band.
Criticality criticality(const OffspringModel& off, const LifetimeModel& life);

/// B(s) = (1 + m s g(s)) / (1 + m) on [0, 1].
double b_pgf(const OffspringModel& off, const LifetimeModel& life, double s);

SpectralReport convergence_radius(const OffspringModel& off, const LifetimeModel& life,
                                  double tol = 1e-12);

RecurrenceClass classify(const OffspringModel& off, const LifetimeModel& life);

/// Truncated invariant vector/measure with the sum S and the growth constant.
/// Throws DomainError in the boundary case, where no invariant pair exists.
InvariantSystem invariant_system(const OffspringModel& off, const LifetimeModel& life,
                                 std::size_t K);

/// lim rho^-n E(1 . Z_n) = (1 + 1/m) / (1 + S). Throws DomainError when the
/// process is not positive recurrent or f''(1) is infinite.
double growth_constant(const OffspringModel& off, const LifetimeModel& life);

} // namespace gwlife
