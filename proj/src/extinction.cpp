#include "gwlife/extinction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gwlife/spectral.hpp"

namespace gwlife {

namespace {

constexpr std::size_t kMaxFixedPoint = 1'000'000;

double composed(const OffspringModel& off, const LifetimeModel& life, double s) {
    const double fs = off.pgf(s, 0).value();
    return life.pgf(std::min(fs, 1.0), 0).value.value();
}

} // namespace

bool is_certain_extinction(const OffspringModel& off, const LifetimeModel& life) {
    return off.mean() * life.mean() <= 1.0 + kCriticalTolerance;
}

ExtinctionReport extinction_probability(const OffspringModel& off, const LifetimeModel& life, double tol) {
    if (!(tol > 0.0 && tol <= 1e-8)) throw std::invalid_argument("tol must lie in (0, 1e-8]");
    ExtinctionReport rep;
    if (is_certain_extinction(off, life)) {
        rep.q = 1.0;
        rep.certain = true;
        rep.residual = std::abs(composed(off, life, 1.0) - 1.0);
        return rep;
    }
    rep.certain = false;

    // g(f(.)) is a pgf, so iterating from 0 increases to the smallest root.
    double s = 0.0;
    double step = 1.0;
    std::size_t it = 0;
    while (it < kMaxFixedPoint) {
        const double next = composed(off, life, s);
        ++it;
        step = next - s;
        s = next;
        if (std::abs(step) < tol) break;
    }

    // Bracket [lo, hi] with phi(lo) >= 0 > phi(hi), phi(s) = g(f(s)) - s.
    auto phi = [&](double x) { return composed(off, life, x) - x; };
    double lo = s;
    while (lo > 0.0 && phi(lo) < 0.0) lo = std::max(0.0, lo - std::max(std::abs(step), tol));
    double width = std::max(std::abs(step), 1e-15);
    double hi = std::min(1.0, s + width);
    while (hi < 1.0 && phi(hi) >= 0.0) {
        width *= 2.0;
        hi = std::min(1.0, s + width);
    }
    if (hi < 1.0) {
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (phi(mid) >= 0.0 ? lo : hi) = mid;
            ++it;
        }
        s = std::abs(phi(lo)) <= std::abs(phi(hi)) ? lo : hi;
    }
    rep.q = s;
    rep.residual = std::abs(phi(s));
    rep.iterations = it;
    return rep;
}

std::vector<double> typewise_extinction(const OffspringModel& off, const LifetimeModel& life, double q,
                                        std::size_t n) {
    if (n == 0) return {};
    const double fq = off.pgf(q, 0).value();
    // backward recursion contracts by q_i f(q) <= f(q) < 1 in the supercritical case
    std::size_t padding = 200;
    if (fq < 1.0) padding = std::max<std::size_t>(padding, static_cast<std::size_t>(60.0 / -std::log(fq)));
    const std::size_t N = n + padding;
    std::vector<double> s(N + 1, 1.0);
    for (std::size_t i = N - 1; i >= 1; --i) {
        const double qi = life.hazard(i);
        s[i] = 1.0 - qi + qi * s[i + 1] * fq;
    }
    return {s.begin() + 1, s.begin() + 1 + static_cast<std::ptrdiff_t>(n)};
}

} // namespace gwlife
