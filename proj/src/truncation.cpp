#include "gwlife/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gwlife/errors.hpp"

namespace gwlife {

namespace {

constexpr std::size_t kMaxPowerIterations = 100'000;
constexpr double kPowerTolerance = 1e-12;

std::vector<double> hazards_up_to(const LifetimeModel& life, std::size_t k) {
    std::vector<double> q(k);
    for (std::size_t i = 1; i <= k; ++i) q[i - 1] = life.hazard(i);
    return q;
}

// Types 1..k_eff form the class that contains type 1; rows past the first
// zero hazard are identically zero and carry only zero eigenvalues.
std::size_t effective_size(const TruncatedMatrix& a) {
    std::size_t k = 0;
    while (k < a.size() && a.hazard(k + 1) > 0.0) ++k;
    return k;
}

// F_k(s) = m sum_{j<=k} Q_j s^j and its derivative.
struct PolyValue {
    double value;
    double slope;
};

PolyValue truncated_F(const TruncatedMatrix& a, std::size_t k, double s) {
    long double term = a.offspring_mean();
    long double value = 0.0L, slope = 0.0L;
    for (std::size_t j = 1; j <= k; ++j) {
        term *= static_cast<long double>(a.hazard(j)) * s;
        if (term == 0.0L) break;
        value += term;
        slope += static_cast<long double>(j) * term;
    }
    return {static_cast<double>(value), static_cast<double>(slope / s)};
}

// Newton from the right on the convex increasing F_k; s_start must satisfy F_k(s_start) >= 1.
double scalar_root_from(const TruncatedMatrix& a, std::size_t k, double s_start) {
    double s = s_start;
    for (int it = 0; it < 200; ++it) {
        const PolyValue f = truncated_F(a, k, s);
        if (f.value <= 1.0 || f.slope <= 0.0) return s;
        const double next = s - (f.value - 1.0) / f.slope;
        if (!(next < s) || next <= 0.0) return s;
        s = next;
    }
    return s;
}

double upper_start(const TruncatedMatrix& a, std::size_t k) {
    double hi = 1.0;
    while (truncated_F(a, k, hi).value < 1.0) hi *= 2.0;
    return hi;
}

double scalar_root_radius(const TruncatedMatrix& a) {
    const std::size_t k = effective_size(a);
    if (k == 0) return 0.0;
    return 1.0 / scalar_root_from(a, k, upper_start(a, k));
}

// Returns the radius of (M + shift I) / scale, or a negative value on non-convergence.
double power_iterate(const TruncatedMatrix& a, std::size_t k, double shift, double scale) {
    std::vector<double> x(k, 1.0), y(k);
    for (std::size_t it = 0; it < kMaxPowerIterations; ++it) {
        // y = M x over the leading k x k block
        const double m = a.offspring_mean();
        for (std::size_t i = 0; i < k; ++i) {
            const double q = a.hazard(i + 1);
            y[i] = m * q * x[0] + (i + 1 < k ? q * x[i + 1] : 0.0);
            y[i] = (y[i] + shift * x[i]) / scale;
        }
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        double top = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double r = y[i] / x[i];
            lo = std::min(lo, r);
            hi = std::max(hi, r);
            top = std::max(top, y[i]);
        }
        if (hi - lo <= kPowerTolerance * hi) return 0.5 * (lo + hi);
        for (std::size_t i = 0; i < k; ++i) x[i] = y[i] / top;
    }
    return -1.0;
}

double power_iteration_radius(const TruncatedMatrix& a) {
    const std::size_t k = effective_size(a);
    if (k == 0) return 0.0;
    const double direct = power_iterate(a, k, 0.0, 1.0);
    if (direct >= 0.0) return direct;
    // periodicity workaround: (M + I) / 2 has the same Perron vector
    const double damped = power_iterate(a, k, 1.0, 2.0);
    if (damped >= 0.0) return 2.0 * damped - 1.0;
    throw ConvergenceError("power iteration did not converge for k = " + std::to_string(a.size()));
}

} // namespace

TruncatedMatrix::TruncatedMatrix(double m, std::vector<double> hazards)
    : m_(m), hazards_(std::move(hazards)) {
    if (hazards_.empty()) throw std::invalid_argument("truncation size must be at least 1");
}

double TruncatedMatrix::entry(std::size_t i, std::size_t j) const {
    if (i == 0 || j == 0 || i > size() || j > size()) throw std::out_of_range("TruncatedMatrix::entry");
    double v = 0.0;
    if (j == 1) v += m_ * hazard(i);
    if (j == i + 1) v += hazard(i);
    return v;
}

void TruncatedMatrix::apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t k = size();
    for (std::size_t i = 0; i < k; ++i) {
        const double q = hazards_[i];
        y[i] = m_ * q * x[0] + (i + 1 < k ? q * x[i + 1] : 0.0);
    }
}

void TruncatedMatrix::apply_left(std::span<const double> x, std::span<double> y) const {
    const std::size_t k = size();
    long double first = 0.0L;
    for (std::size_t i = 0; i < k; ++i) first += static_cast<long double>(x[i]) * m_ * hazards_[i];
    for (std::size_t i = k; i-- > 1;) y[i] = x[i - 1] * hazards_[i - 1];
    y[0] = static_cast<double>(first);
}

std::string_view to_string(RadiusMethod method) {
    return method == RadiusMethod::ScalarRoot ? "ScalarRoot" : "PowerIteration";
}

TruncatedMatrix truncated_matrix(const OffspringModel& off, const LifetimeModel& life, std::size_t k) {
    if (k == 0) throw std::invalid_argument("truncation size must be at least 1");
    return TruncatedMatrix(off.mean(), hazards_up_to(life, k));
}

double truncated_radius(const TruncatedMatrix& matrix, RadiusMethod method) {
    return method == RadiusMethod::ScalarRoot ? scalar_root_radius(matrix)
                                              : power_iteration_radius(matrix);
}

double truncated_radius(const OffspringModel& off, const LifetimeModel& life, std::size_t k,
                        RadiusMethod method) {
    return truncated_radius(truncated_matrix(off, life, k), method);
}

RadiusSequence radius_sequence(const OffspringModel& off, const LifetimeModel& life, std::size_t k_max,
                               RadiusMethod method) {
    if (k_max == 0) throw std::invalid_argument("k_max must be at least 1");
    const TruncatedMatrix full = truncated_matrix(off, life, k_max);
    const std::size_t k_eff = effective_size(full);

    RadiusSequence seq;
    seq.method = method;
    seq.k_values.reserve(k_max);
    seq.rho.reserve(k_max);
    double s_prev = 0.0;
    for (std::size_t k = 1; k <= k_max; ++k) {
        const std::size_t kk = std::min(k, k_eff);
        double rho;
        if (method == RadiusMethod::ScalarRoot) {
            // s_k is nonincreasing in k, so the previous root starts Newton from the right
            const double start = (k == 1) ? upper_start(full, kk) : s_prev;
            const double s = scalar_root_from(full, kk, start);
            s_prev = s;
            rho = 1.0 / s;
        } else {
            std::vector<double> q(kk);
            for (std::size_t i = 0; i < kk; ++i) q[i] = full.hazard(i + 1);
            rho = power_iteration_radius(TruncatedMatrix(full.offspring_mean(), std::move(q)));
        }
        seq.k_values.push_back(k);
        seq.rho.push_back(rho);
    }
    return seq;
}

std::vector<double> mean_vector(const OffspringModel& off, const LifetimeModel& life, std::size_t n) {
    const TruncatedMatrix a = truncated_matrix(off, life, n + 1);
    std::vector<double> x(n + 1, 0.0), y(n + 1, 0.0);
    x[0] = 1.0;
    for (std::size_t step = 0; step < n; ++step) {
        a.apply_left(x, y);
        std::swap(x, y);
    }
    return x;
}

double mean_total(const OffspringModel& off, const LifetimeModel& life, std::size_t n,
                  std::optional<std::span<const double>> weights) {
    const std::vector<double> x = mean_vector(off, life, n);
    long double total = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double w = 1.0;
        if (weights) w = i < weights->size() ? (*weights)[i] : 0.0;
        total += static_cast<long double>(w) * x[i];
    }
    return static_cast<double>(total);
}

} // namespace gwlife
