#include "gwlife/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gwlife/errors.hpp"

namespace gwlife {

namespace {

constexpr int kMaxBisection = 200;
constexpr double kArtifactGap = 1e-9;  // keeps the B fixed-point search off s = 1

// Bisection on [lo, hi] where `above(s)` flips from false to true once.
// Returns the bracket midpoint.
template <class Fn>
double bisect(Fn&& above, double lo, double hi, double tol, int& iterations) {
    iterations = 0;
    while (iterations < kMaxBisection) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi || hi - lo <= tol) break;
        ++iterations;
        if (above(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

bool F_at_least_one(const LifetimeModel& life, double m, double s) {
    return F_eval(life, m, s).value >= 1.0;
}

ExtendedReal series_difference(const SeriesValue& a, const SeriesValue& b) {
    if (a.diverged()) return ExtendedReal::infinity();
    return ExtendedReal::finite(a.value.value() - b.value.value());
}

// S = m sum_{j>=2} (j-1) Q_j gamma^j
ExtendedReal invariant_sum(const LifetimeModel& life, double m, double gamma, double* error) {
    const SeriesValue first = life.survival_series(gamma, 2, 1);
    const SeriesValue zeroth = life.survival_series(gamma, 2, 0);
    const ExtendedReal diff = series_difference(first, zeroth);
    if (diff.is_infinite()) {
        if (error) *error = std::numeric_limits<double>::infinity();
        return diff;
    }
    if (error) {
        *error = m * (first.tail_bound + zeroth.tail_bound) +
                 8.0 * std::numeric_limits<double>::epsilon() * m * first.value.value();
    }
    return ExtendedReal::finite(m * diff.value());
}

} // namespace

std::string_view to_string(RadiusCase c) {
    switch (c) {
        case RadiusCase::SubcriticalRoot: return "SubcriticalRoot";
        case RadiusCase::SubcriticalBoundary: return "SubcriticalBoundary";
        case RadiusCase::Critical: return "Critical";
        case RadiusCase::Supercritical: return "Supercritical";
    }
    return "?";
}

std::string_view to_string(Criticality c) {
    switch (c) {
        case Criticality::Subcritical: return "Subcritical";
        case Criticality::Critical: return "Critical";
        case Criticality::Supercritical: return "Supercritical";
    }
    return "?";
}

std::string_view to_string(Recurrence r) {
    switch (r) {
        case Recurrence::Transient: return "Transient";
        case Recurrence::PositiveRecurrent: return "PositiveRecurrent";
        case Recurrence::NullRecurrent: return "NullRecurrent";
    }
    return "?";
}

SeriesValue F_eval(const LifetimeModel& life, double m, double s) {
    SeriesValue out = life.survival_series(s, 1, 0);
    if (out.value.is_finite()) {
        out.value = ExtendedReal::finite(m * out.value.value());
        out.tail_bound *= m;
    }
    return out;
}

BoundaryValue F_at_radius(const LifetimeModel& life, double m) {
    BoundaryValue out;
    const ExtendedReal R = life.tail_radius();
    if (R.is_infinite()) {
        // Only finite-support lifetimes have R = inf; F is then a nonconstant polynomial.
        out.value = ExtendedReal::infinity();
        out.at_least_one = true;
        out.error_bound = 0.0;
        return out;
    }
    const double r = R.value();
    // Monotone approach from below; partial values are lower bounds.
    constexpr std::size_t kTermBudget = 20'000;
    for (int i = 1; i <= 60; ++i) {
        const double s = r * (1.0 - std::ldexp(1.0, -i));
        if (s <= 0.0 || s >= r) break;
        const SeriesValue v = F_eval(life, m, s);
        if (v.value >= 1.0) {
            out.at_least_one = true;
            break;
        }
        if (v.terms > kTermBudget) break;
    }
    const SeriesValue boundary = F_eval(life, m, r);
    out.value = boundary.value;
    out.error_bound = boundary.tail_bound;
    if (boundary.value >= 1.0) out.at_least_one = true;
    out.certified_below_one =
        !out.at_least_one && boundary.value.is_finite() && boundary.value.value() + out.error_bound < 1.0;
    return out;
}

Criticality criticality(const OffspringModel& off, const LifetimeModel& life) {
    const double m = off.mean();
    const double ml = m * life.mean();
    if (!std::isfinite(ml)) throw IndeterminateError("ml is not finite");
    const double gap = std::abs(ml - 1.0);
    if (gap <= kCriticalTolerance) return Criticality::Critical;
    const double uncertainty = m * life.mean_error() + 4.0 * std::numeric_limits<double>::epsilon() * ml;
    if (gap <= kCriticalTolerance + uncertainty) {
        throw IndeterminateError("ml = " + std::to_string(ml) +
                                 " cannot be separated from 1 within its numerical uncertainty");
    }
    return ml < 1.0 ? Criticality::Subcritical : Criticality::Supercritical;
}

double b_pgf(const OffspringModel& off, const LifetimeModel& life, double s) {
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("b_pgf: s must lie in [0, 1]");
    const double m = off.mean();
    return (1.0 + m * s * life.pgf(s, 0).value.value()) / (1.0 + m);
}

SpectralReport convergence_radius(const OffspringModel& off, const LifetimeModel& life, double tol) {
    if (!(tol > 0.0 && tol <= 1e-6)) throw std::invalid_argument("tol must lie in (0, 1e-6]");
    SpectralReport rep;
    const double m = off.mean();
    rep.ml = m * life.mean();
    rep.criticality = criticality(off, life);
    rep.R = life.tail_radius();

    switch (rep.criticality) {
        case Criticality::Critical: {
            rep.radius_case = RadiusCase::Critical;
            rep.gamma = 1.0;
            rep.rho = 1.0;
            rep.root_residual = std::abs(rep.ml - 1.0);
            rep.F_at_R = F_at_radius(life, m).value;
            return rep;
        }
        case Criticality::Supercritical: {
            rep.radius_case = RadiusCase::Supercritical;
            rep.F_at_R = F_at_radius(life, m).value;
            auto above = [&](double s) { return b_pgf(off, life, s) - s < 0.0; };
            const double hi = 1.0 - kArtifactGap;
            double gamma;
            if (above(hi)) {
                gamma = bisect(above, 0.0, hi, tol, rep.iterations);
                rep.root_residual = std::abs(b_pgf(off, life, gamma) - gamma);
            } else {
                // the fixed point sits within kArtifactGap of 1; F(1) = ml > 1 still brackets it
                auto f_above = [&](double s) { return F_at_least_one(life, m, s); };
                gamma = bisect(f_above, 0.0, 1.0, tol, rep.iterations);
                rep.root_residual = std::abs(F_eval(life, m, gamma).value.value() - 1.0);
            }
            rep.gamma = gamma;
            rep.rho = 1.0 / gamma;
            return rep;
        }
        case Criticality::Subcritical:
            break;
    }

    const BoundaryValue boundary = F_at_radius(life, m);
    rep.F_at_R = boundary.value;
    if (!boundary.at_least_one) {
        if (!boundary.certified_below_one) {
            throw IndeterminateError("F(R) cannot be certified on either side of 1");
        }
        rep.radius_case = RadiusCase::SubcriticalBoundary;
        rep.gamma = rep.R.value();
        rep.rho = 1.0 / rep.gamma;
        rep.root_residual = 1.0 - boundary.value.value();
        return rep;
    }

    rep.radius_case = RadiusCase::SubcriticalRoot;
    double hi;
    if (rep.R.is_finite()) {
        hi = rep.R.value();
    } else {
        hi = 2.0;
        while (!F_at_least_one(life, m, hi)) hi *= 2.0;
    }
    auto f_above = [&](double s) { return F_at_least_one(life, m, s); };
    rep.gamma = bisect(f_above, 1.0, hi, tol, rep.iterations);
    rep.rho = 1.0 / rep.gamma;
    const SeriesValue at_root = F_eval(life, m, rep.gamma);
    rep.root_residual = at_root.value.is_finite() ? std::abs(at_root.value.value() - 1.0)
                                                  : std::numeric_limits<double>::infinity();
    const ExtendedReal gp = life.pgf(rep.gamma, 1).value;
    rep.m_gprime_at_gamma = gp.is_finite() ? ExtendedReal::finite(m * gp.value()) : gp;
    return rep;
}

RecurrenceClass classify(const OffspringModel& off, const LifetimeModel& life) {
    RecurrenceClass out;
    const double m = off.mean();
    out.ml = m * life.mean();
    out.criticality = criticality(off, life);
    switch (out.criticality) {
        case Criticality::Supercritical:
            out.kind = Recurrence::PositiveRecurrent;
            out.clause = "ml > 1";
            return out;
        case Criticality::Critical: {
            const ExtendedReal g2 = life.second_factorial_moment();
            out.g2 = g2;
            if (g2.is_finite()) {
                out.kind = Recurrence::PositiveRecurrent;
                out.clause = "ml = 1 and g''(1) < inf";
            } else {
                out.kind = Recurrence::NullRecurrent;
                out.clause = "ml = 1 and g''(1) = inf";
            }
            return out;
        }
        case Criticality::Subcritical: {
            const BoundaryValue boundary = F_at_radius(life, m);
            out.F_at_R = boundary.value;
            if (boundary.at_least_one) {
                out.kind = Recurrence::PositiveRecurrent;
                out.clause = "ml < 1 and F(R) >= 1";
            } else if (boundary.certified_below_one) {
                out.kind = Recurrence::Transient;
                out.clause = "ml < 1 and F(R) < 1";
            } else {
                throw IndeterminateError("F(R) cannot be certified on either side of 1");
            }
            return out;
        }
    }
    return out;
}

InvariantSystem invariant_system(const OffspringModel& off, const LifetimeModel& life, std::size_t K) {
    if (K < 2) throw std::invalid_argument("invariant_system: K must be at least 2");
    const SpectralReport rep = convergence_radius(off, life);
    if (rep.radius_case == RadiusCase::SubcriticalBoundary) {
        throw DomainError("no gamma-invariant vector or measure exists when F(R) < 1 and ml < 1");
    }
    if (life.survival(K - 1) <= 0.0) {
        throw DomainError("invariant_system: Q(K-1) = 0; reduce K to the lifetime support");
    }
    const double m = off.mean();
    const double gamma = rep.gamma;

    InvariantSystem sys;
    sys.K = K;
    sys.gamma = gamma;
    sys.u.assign(K, 0.0);
    sys.v.assign(K, 0.0);
    std::vector<double> q(K + 1, 0.0);  // q[k] = hazard k, k = 1..K
    for (std::size_t k = 1; k <= K; ++k) q[k] = life.hazard(k);

    // v^(k) = Q_{k-1} gamma^{k-1}, u^(k) = m sum_{j >= k} Q_j gamma^j / v^(k)
    sys.v[0] = 1.0;
    for (std::size_t k = 2; k <= K; ++k) sys.v[k - 1] = sys.v[k - 2] * q[k - 1] * gamma;
    sys.u[0] = 1.0;
    for (std::size_t k = 2; k <= K; ++k) {
        const SeriesValue tail = life.survival_series(gamma, k, 0);
        if (tail.diverged()) throw DomainError("invariant vector diverges at gamma");
        sys.u[k - 1] = m * tail.value.value() / sys.v[k - 1];
    }

    for (std::size_t k = 2; k + 1 <= K; ++k) {
        const double lhs = gamma * (m * q[k] * sys.u[0] + q[k] * sys.u[k]);
        if (sys.u[k - 1] > 0.0) {
            sys.u_residual = std::max(sys.u_residual, std::abs(lhs - sys.u[k - 1]) / sys.u[k - 1]);
        }
    }
    for (std::size_t k = 2; k <= K; ++k) {
        const double lhs = gamma * sys.v[k - 2] * q[k - 1];
        sys.v_residual = std::max(sys.v_residual, std::abs(lhs - sys.v[k - 1]) / sys.v[k - 1]);
    }
    {
        double head = 0.0;
        for (std::size_t i = 1; i <= K; ++i) head += sys.v[i - 1] * q[i];
        head *= gamma * m;
        const SeriesValue rest = life.survival_series(gamma, K + 1, 0);
        sys.measure_head_residual = rest.diverged()
                                        ? std::numeric_limits<double>::infinity()
                                        : std::abs(head + m * rest.value.value() - 1.0);
    }

    sys.S = invariant_sum(life, m, gamma, &sys.S_error);

    // v.u from the componentwise products plus the closed tail
    // sum_{k > K} m sum_{j >= k} Q_j gamma^j = m sum_{j > K} (j - K) Q_j gamma^j.
    {
        double head = 0.0;
        for (std::size_t k = 0; k < K; ++k) head += sys.u[k] * sys.v[k];
        const SeriesValue p1 = life.survival_series(gamma, K + 1, 1);
        const SeriesValue p0 = life.survival_series(gamma, K + 1, 0);
        if (p1.diverged() || p0.diverged()) {
            sys.vu = ExtendedReal::infinity();
        } else {
            const double tail = m * (p1.value.value() - static_cast<double>(K) * p0.value.value());
            sys.vu = ExtendedReal::finite(head + std::max(0.0, tail));
        }
    }

    if (sys.S.is_infinite()) {
        sys.growth_note = "S is infinite: null recurrent, no finite growth constant";
    } else if (off.second_factorial_moment().is_infinite()) {
        sys.growth_note = "f''(1) is infinite";
    } else {
        const double S = sys.S.value();
        sys.growth_constant = (1.0 + 1.0 / m) / (1.0 + S);
        if (S > 0.0) sys.printed_constant = (1.0 + 1.0 / m) / S;
        sys.growth_note = "(1 + 1/m) / (1 + S)";
    }
    return sys;
}

double growth_constant(const OffspringModel& off, const LifetimeModel& life) {
    const RecurrenceClass cls = classify(off, life);
    if (cls.kind != Recurrence::PositiveRecurrent) {
        throw DomainError("growth constant needs a positive recurrent process");
    }
    if (off.second_factorial_moment().is_infinite()) {
        throw DomainError("growth constant needs f''(1) < inf");
    }
    const SpectralReport rep = convergence_radius(off, life);
    const double m = off.mean();
    const ExtendedReal S = invariant_sum(life, m, rep.gamma, nullptr);
    if (S.is_infinite()) throw DomainError("S is infinite");
    return (1.0 + 1.0 / m) / (1.0 + S.value());
}

} // namespace gwlife
