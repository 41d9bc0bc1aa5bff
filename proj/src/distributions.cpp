#include "gwlife/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "gwlife/errors.hpp"

namespace gwlife {

namespace {

constexpr double kNormTolerance = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Tighter policy for the special sums that feed normalising constants.
const SeriesPolicy kInnerPolicy{1e-17, 1e300, 64, 200'000'000};

double compensated_sum(std::span<const double> xs) {
    double sum = 0.0, comp = 0.0;
    for (double x : xs) {
        const double s = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - s) + x : (x - s) + sum;
        sum = s;
    }
    return sum + comp;
}

std::vector<double> validated_pmf(const std::vector<double>& p, const char* what) {
    if (p.empty()) throw ModelError(std::string(what) + ": empty pmf");
    for (double x : p) {
        if (!std::isfinite(x) || x < 0.0) {
            throw ModelError(std::string(what) + ": pmf entries must be finite and nonnegative");
        }
    }
    const double total = compensated_sum(p);
    if (std::abs(total - 1.0) > kNormTolerance) {
        throw ModelError(std::string(what) + ": pmf sums to " + std::to_string(total) +
                         ", not 1");
    }
    std::vector<double> out(p);
    for (double& x : out) x /= total;
    while (out.size() > 1 && out.back() == 0.0) out.pop_back();
    return out;
}

double falling(double k, int d) {
    double r = 1.0;
    for (int i = 0; i < d; ++i) r *= k - i;
    return r;
}

// Polynomial pgf sum_k p_k s^k and its derivatives.
ExtendedReal polynomial_pgf(std::span<const double> p, double s, int order) {
    double sum = 0.0;
    for (std::size_t k = static_cast<std::size_t>(order); k < p.size(); ++k) {
        sum += p[k] * falling(static_cast<double>(k), order) *
               std::pow(s, static_cast<double>(k) - order);
    }
    return from_double(sum);
}

// Euler-Maclaurin closure of sum_{i >= n} i^-c for c > 1.
double zeta_tail_em(double c, double n) {
    const double p1 = c;
    const double p3 = c * (c + 1) * (c + 2);
    const double p5 = p3 * (c + 3) * (c + 4);
    const double p7 = p5 * (c + 5) * (c + 6);
    const double base = std::pow(n, -c);
    return std::pow(n, 1.0 - c) / (c - 1.0) + 0.5 * base + p1 * base / (12.0 * n) -
           p3 * base / (720.0 * n * n * n) + p5 * base / (30240.0 * std::pow(n, 5)) -
           p7 * base / (1209600.0 * std::pow(n, 7));
}

void check_order(int order) {
    if (order < 0 || order > 2) throw std::invalid_argument("pgf order must be 0, 1 or 2");
}

} // namespace

double tilted_tail(double x, double c, std::size_t j) {
    if (j == 0) throw std::invalid_argument("tilted_tail: j must be >= 1");
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("tilted_tail: x must lie in [0, 1]");
    const double jd = static_cast<double>(j);
    if (x == 1.0) {
        if (c <= 1.0) return kInf;
        constexpr std::size_t kDirect = 16;
        const std::size_t n = std::max<std::size_t>(j, kDirect);
        double head = 0.0, comp = 0.0;
        for (std::size_t i = j; i < n; ++i) {
            const double t = std::pow(static_cast<double>(i), -c);
            const double s = head + t;
            comp += std::abs(head) >= t ? (head - s) + t : (t - s) + head;
            head = s;
        }
        return head + comp + zeta_tail_em(c, static_cast<double>(n));
    }
    if (x == 0.0) return std::pow(jd, -c);

    double term = std::pow(jd, -c);
    std::size_t last = j;
    auto next = [&](std::size_t i) {
        if (i != last) {
            const double id = static_cast<double>(i);
            term *= x * std::pow((id - 1.0) / id, c);
            last = i;
        }
        return term;
    };
    auto bound = [&](std::size_t i) {
        const double id = static_cast<double>(i);
        return c >= 0.0 ? x : x * std::pow((id + 1.0) / id, -c);
    };
    return sum_nonnegative_series(next, bound, j, kInnerPolicy).value.value();
}

// ---------------------------------------------------------------------------
// OffspringModel
// ---------------------------------------------------------------------------

OffspringModel::OffspringModel(OffspringSpec spec) : spec_(std::move(spec)) {
    std::visit(
        [this](auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, offspring::Pmf>) {
                s.p = validated_pmf(s.p, "offspring");
                cdf_.resize(s.p.size());
                std::partial_sum(s.p.begin(), s.p.end(), cdf_.begin());
                cdf_.back() = 1.0;
                double m = 0.0;
                for (std::size_t k = 0; k < s.p.size(); ++k) m += static_cast<double>(k) * s.p[k];
                mean_ = m;
            } else if constexpr (std::is_same_v<T, offspring::Point>) {
                if (s.j < 1) throw ModelError("offspring point mass must sit at j >= 1");
                mean_ = static_cast<double>(s.j);
            } else {
                if (!std::isfinite(s.mean) || s.mean <= 0.0) {
                    throw ModelError("offspring mean must be finite and positive");
                }
                mean_ = s.mean;
                if constexpr (std::is_same_v<T, offspring::Geometric>) ratio_ = s.mean / (1.0 + s.mean);
            }
        },
        spec_);
    if (!(mean_ > 0.0) || !std::isfinite(mean_)) {
        throw ModelError("offspring mean must satisfy 0 < m < inf");
    }
}

double OffspringModel::pmf(std::size_t k) const {
    const double kd = static_cast<double>(k);
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, offspring::Pmf>) {
                return k < s.p.size() ? s.p[k] : 0.0;
            } else if constexpr (std::is_same_v<T, offspring::Geometric>) {
                return (1.0 - ratio_) * std::pow(ratio_, kd);
            } else if constexpr (std::is_same_v<T, offspring::Poisson>) {
                return std::exp(kd * std::log(s.mean) - s.mean - std::lgamma(kd + 1.0));
            } else {
                return static_cast<std::int64_t>(k) == s.j ? 1.0 : 0.0;
            }
        },
        spec_);
}

ExtendedReal OffspringModel::second_factorial_moment() const { return pgf(1.0, 2); }

ExtendedReal OffspringModel::radius() const {
    if (std::holds_alternative<offspring::Geometric>(spec_)) return ExtendedReal::finite(1.0 / ratio_);
    return ExtendedReal::infinity();
}

ExtendedReal OffspringModel::pgf(double s, int order) const {
    check_order(order);
    if (s < 0.0) throw std::invalid_argument("pgf argument must be nonnegative");
    return std::visit(
        [&](const auto& spec) -> ExtendedReal {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, offspring::Pmf>) {
                return polynomial_pgf(spec.p, s, order);
            } else if constexpr (std::is_same_v<T, offspring::Geometric>) {
                const double t = ratio_;
                const double den = 1.0 - t * s;
                if (den <= 0.0) return ExtendedReal::infinity();
                const double base = (1.0 - t) / den;
                if (order == 0) return ExtendedReal::finite(base);
                if (order == 1) return ExtendedReal::finite(base * t / den);
                return ExtendedReal::finite(2.0 * base * t * t / (den * den));
            } else if constexpr (std::is_same_v<T, offspring::Poisson>) {
                const double f = std::exp(spec.mean * (s - 1.0));
                return from_double(f * std::pow(spec.mean, order));
            } else {
                const double j = static_cast<double>(spec.j);
                if (order > j) return ExtendedReal::finite(0.0);
                return from_double(falling(j, order) * std::pow(s, j - order));
            }
        },
        spec_);
}

std::uint64_t OffspringModel::sample(CounterRng& rng) const {
    return std::visit(
        [&](const auto& spec) -> std::uint64_t {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, offspring::Pmf>) {
                const double u = std::generate_canonical<double, 53>(rng);
                const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
                return static_cast<std::uint64_t>(
                    std::min<std::ptrdiff_t>(it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
            } else if constexpr (std::is_same_v<T, offspring::Geometric>) {
                std::geometric_distribution<std::uint64_t> d(1.0 - ratio_);
                return d(rng);
            } else if constexpr (std::is_same_v<T, offspring::Poisson>) {
                std::poisson_distribution<std::uint64_t> d(spec.mean);
                return d(rng);
            } else {
                return static_cast<std::uint64_t>(spec.j);
            }
        },
        spec_);
}

std::uint64_t OffspringModel::sample_sum(std::uint64_t n, CounterRng& rng) const {
    constexpr std::uint64_t kPerParentLimit = 1024;
    if (n == 0) return 0;
    if (const auto* point = std::get_if<offspring::Point>(&spec_)) {
        return n * static_cast<std::uint64_t>(point->j);
    }
    if (n <= kPerParentLimit) {
        std::uint64_t total = 0;
        for (std::uint64_t i = 0; i < n; ++i) total += sample(rng);
        return total;
    }
    return std::visit(
        [&](const auto& spec) -> std::uint64_t {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, offspring::Pmf>) {
                // multinomial counts through conditional binomials
                std::uint64_t remaining = n;
                double mass = 1.0;
                std::uint64_t total = 0;
                for (std::size_t k = 0; k < spec.p.size() && remaining > 0; ++k) {
                    std::uint64_t count = remaining;
                    if (k + 1 < spec.p.size() && mass > 0.0) {
                        const double prob = std::clamp(spec.p[k] / mass, 0.0, 1.0);
                        std::binomial_distribution<std::uint64_t> d(remaining, prob);
                        count = d(rng);
                    }
                    total += count * k;
                    remaining -= count;
                    mass -= spec.p[k];
                }
                return total;
            } else if constexpr (std::is_same_v<T, offspring::Geometric>) {
                std::negative_binomial_distribution<std::uint64_t> d(n, 1.0 - ratio_);
                return d(rng);
            } else if constexpr (std::is_same_v<T, offspring::Poisson>) {
                std::poisson_distribution<std::uint64_t> d(static_cast<double>(n) * spec.mean);
                return d(rng);
            } else {
                return 0;  // handled above
            }
        },
        spec_);
}

// ---------------------------------------------------------------------------
// LifetimeModel
// ---------------------------------------------------------------------------

LifetimeModel::LifetimeModel(LifetimeSpec spec) : spec_(std::move(spec)) {
    std::visit(
        [this](auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, lifetime::Pmf>) {
                s.h = validated_pmf(s.h, "lifetime");
                h_ = s.h;
                const std::size_t n = h_.size();
                tail_.assign(n + 1, 0.0);
                for (std::size_t k = n; k-- > 0;) tail_[k] = tail_[k + 1] + h_[k];
                tail_[0] = 1.0;
                hazard_sup_.assign(n + 1, 0.0);
                // hazard_sup_[k] = max_{k < j <= n} q_j
                double running = 0.0;
                for (std::size_t j = n; j >= 1; --j) {
                    hazard_sup_[j] = running;
                    running = std::max(running, hazard(j));
                }
                hazard_sup_[0] = running;
                double l = 0.0;
                for (std::size_t k = 0; k < n; ++k) l += static_cast<double>(k) * h_[k];
                mean_ = l;
                mean_error_ = 4.0 * std::numeric_limits<double>::epsilon() * l * static_cast<double>(n);
            } else if constexpr (std::is_same_v<T, lifetime::Geometric>) {
                if (!std::isfinite(s.mean) || s.mean <= 0.0) {
                    throw ModelError("geometric lifetime mean must be finite and positive");
                }
                ratio_ = s.mean / (1.0 + s.mean);
                mean_ = s.mean;
                mean_error_ = 0.0;
            } else {
                if (!(s.a > 0.0 && s.a <= 1.0)) throw ModelError("power-tilt requires 0 < a <= 1");
                if (!(s.b >= 0.0) || !std::isfinite(s.b)) throw ModelError("power-tilt requires b >= 0");
                if (s.a == 1.0 && s.b <= 2.0) {
                    throw ModelError("power-tilt with a = 1 needs b > 2 for a finite mean");
                }
                norm_ = 1.0 / (s.a * tilted_tail(s.a, s.b, 1));
                mean_ = norm_ * s.a * tilted_tail(s.a, s.b - 1.0, 1);
                mean_error_ = 1e-14 * mean_;
            }
        },
        spec_);
    if (!(mean_ > 0.0) || !std::isfinite(mean_)) {
        throw ModelError("lifetime mean must satisfy 0 < l < inf");
    }
}

double LifetimeModel::pmf(std::size_t k) const {
    const double kd = static_cast<double>(k);
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, lifetime::Pmf>) {
                return k < h_.size() ? h_[k] : 0.0;
            } else if constexpr (std::is_same_v<T, lifetime::Geometric>) {
                return (1.0 - ratio_) * std::pow(ratio_, kd);
            } else {
                if (k == 0) return 0.0;
                return norm_ * std::exp(kd * std::log(s.a) - s.b * std::log(kd));
            }
        },
        spec_);
}

double LifetimeModel::survival(std::size_t k) const {
    if (k == 0) return 1.0;
    const double kd = static_cast<double>(k);
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, lifetime::Pmf>) {
                return k < tail_.size() ? tail_[k] : 0.0;
            } else if constexpr (std::is_same_v<T, lifetime::Geometric>) {
                return std::pow(ratio_, kd);
            } else {
                return norm_ * std::exp(kd * std::log(s.a)) * tilted_tail(s.a, s.b, k);
            }
        },
        spec_);
}

double LifetimeModel::log_survival(std::size_t k) const {
    if (k == 0) return 0.0;
    const double kd = static_cast<double>(k);
    if (std::holds_alternative<lifetime::Geometric>(spec_)) return kd * std::log(ratio_);
    if (const auto* pt = std::get_if<lifetime::PowerTilt>(&spec_)) {
        return std::log(norm_) + kd * std::log(pt->a) + std::log(tilted_tail(pt->a, pt->b, k));
    }
    return std::log(survival(k));
}

double LifetimeModel::hazard(std::size_t k) const {
    if (k == 0) throw std::invalid_argument("hazard index starts at 1");
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, lifetime::Pmf>) {
                if (k >= tail_.size() || tail_[k - 1] <= 0.0) return 0.0;
                return tail_[k] / tail_[k - 1];
            } else if constexpr (std::is_same_v<T, lifetime::Geometric>) {
                return ratio_;
            } else {
                if (k == 1) return 1.0;
                return s.a * tilted_tail(s.a, s.b, k) / tilted_tail(s.a, s.b, k - 1);
            }
        },
        spec_);
}

double LifetimeModel::hazard_bound(std::size_t k) const {
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, lifetime::Pmf>) {
                return k < hazard_sup_.size() ? hazard_sup_[k] : 0.0;
            } else if constexpr (std::is_same_v<T, lifetime::Geometric>) {
                return ratio_;
            } else {
                // q_1 = 1 and q_j <= a for j >= 2
                return k == 0 ? 1.0 : s.a;
            }
        },
        spec_);
}

ExtendedReal LifetimeModel::second_factorial_moment() const { return pgf(1.0, 2).value; }

ExtendedReal LifetimeModel::tail_radius() const {
    return std::visit(
        [&](const auto& s) -> ExtendedReal {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, lifetime::Pmf>) {
                return ExtendedReal::infinity();
            } else if constexpr (std::is_same_v<T, lifetime::Geometric>) {
                return ExtendedReal::finite(1.0 / ratio_);
            } else {
                return ExtendedReal::finite(1.0 / s.a);
            }
        },
        spec_);
}

std::optional<std::size_t> LifetimeModel::support_max() const {
    if (std::holds_alternative<lifetime::Pmf>(spec_)) return h_.size() - 1;
    return std::nullopt;
}

SeriesValue LifetimeModel::pgf(double s, int order) const {
    check_order(order);
    if (s < 0.0) throw std::invalid_argument("pgf argument must be nonnegative");
    return std::visit(
        [&](const auto& spec) -> SeriesValue {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, lifetime::Pmf>) {
                return {polynomial_pgf(h_, s, order), 0.0, h_.size()};
            } else if constexpr (std::is_same_v<T, lifetime::Geometric>) {
                const double r = ratio_;
                const double den = 1.0 - r * s;
                if (den <= 0.0) return {ExtendedReal::infinity(), kInf, 0};
                const double base = (1.0 - r) / den;
                double v = base;
                if (order == 1) v = base * r / den;
                if (order == 2) v = 2.0 * base * r * r / (den * den);
                return {ExtendedReal::finite(v), 0.0, 0};
            } else {
                const double a = spec.a, b = spec.b;
                const double x = a * s;
                if (x > 1.0) return {ExtendedReal::infinity(), kInf, 0};
                if (x == 1.0) {
                    // sum_k k^(order) k^-b, closed through zeta tails
                    const double ad = std::pow(a, order);
                    double v = 0.0;
                    if (order == 0) v = tilted_tail(1.0, b, 1);
                    if (order == 1) v = tilted_tail(1.0, b - 1.0, 1);
                    if (order == 2) {
                        if (b <= 3.0) return {ExtendedReal::infinity(), kInf, 0};
                        v = tilted_tail(1.0, b - 2.0, 1) - tilted_tail(1.0, b - 1.0, 1);
                    }
                    if (std::isinf(v)) return {ExtendedReal::infinity(), kInf, 0};
                    const double value = norm_ * ad * v;
                    return {ExtendedReal::finite(value), 1e-14 * value, 0};
                }
                const std::size_t k0 = std::max<std::size_t>(static_cast<std::size_t>(order), 1);
                const double k0d = static_cast<double>(k0);
                double term = norm_ * std::pow(a, order) * falling(k0d, order) * std::pow(k0d, -b) *
                              std::pow(x, k0d - order);
                std::size_t last = k0;
                auto t = [&](std::size_t k) {
                    if (k != last) {
                        const double kd = static_cast<double>(k);
                        term *= x * (kd / (kd - order)) * std::pow((kd - 1.0) / kd, b);
                        last = k;
                    }
                    return term;
                };
                auto bound = [&](std::size_t k) {
                    const double kd = static_cast<double>(k);
                    return x * (kd + 1.0) / (kd + 1.0 - order);
                };
                return sum_nonnegative_series(t, bound, k0);
            }
        },
        spec_);
}

SeriesValue LifetimeModel::survival_series(double s, std::size_t from, int power) const {
    if (power != 0 && power != 1) throw std::invalid_argument("survival_series power must be 0 or 1");
    if (s < 0.0) throw std::invalid_argument("survival_series argument must be nonnegative");

    if (const auto* spec = std::get_if<lifetime::Pmf>(&spec_)) {
        (void)spec;
        double sum = 0.0;
        for (std::size_t j = from; j < tail_.size(); ++j) {
            if (tail_[j] == 0.0) break;
            const double jd = static_cast<double>(j);
            sum += (power == 1 ? jd : 1.0) * tail_[j] * std::pow(s, jd);
        }
        return {from_double(sum), 0.0, tail_.size()};
    }

    const ExtendedReal radius = tail_radius();
    if (radius.is_finite()) {
        if (s > radius.value()) return {ExtendedReal::infinity(), kInf, 0};
        if (s == radius.value()) return survival_series_at_radius(from, power);
    }

    std::size_t start = from;
    if (power == 1 && start == 0) start = 1;
    double head = 0.0;
    if (power == 0 && from == 0) {
        head = 1.0;  // Q_0 s^0
        start = 1;
    }
    if (s == 0.0) return {ExtendedReal::finite(head), 0.0, 1};

    const double sd = static_cast<double>(start);
    const double log_q0 = log_survival(start);
    if (std::isinf(log_q0)) return {ExtendedReal::finite(head), 0.0, 1};
    double term = std::exp(log_q0 + sd * std::log(s)) * (power == 1 ? sd : 1.0);
    std::size_t last = start;
    auto t = [&](std::size_t j) {
        if (j != last) {
            const double jd = static_cast<double>(j);
            term *= hazard(j) * s * (power == 1 ? jd / (jd - 1.0) : 1.0);
            last = j;
        }
        return term;
    };
    auto bound = [&](std::size_t j) {
        const double jd = static_cast<double>(j);
        return hazard_bound(j) * s * (power == 1 ? (jd + 1.0) / jd : 1.0);
    };
    SeriesValue out = sum_nonnegative_series(t, bound, start);
    if (head != 0.0 && out.value.is_finite()) out.value = ExtendedReal::finite(head + out.value.value());
    return out;
}

SeriesValue LifetimeModel::survival_series_at_radius(std::size_t from, int power) const {
    if (std::holds_alternative<lifetime::Geometric>(spec_)) {
        return {ExtendedReal::infinity(), kInf, 0};  // Q_j R^j = 1 for every j
    }
    const auto& pt = std::get<lifetime::PowerTilt>(spec_);
    const double a = pt.a, b = pt.b;
    const std::size_t k = std::max<std::size_t>(from, 1);
    const double kd = static_cast<double>(k);
    const double head = (from == 0 && power == 0) ? 1.0 : 0.0;

    // Q_j R^j = C T_j with T_j = tilted_tail(a, b, j); sums swapped onto the pmf index.
    double v = 0.0;
    if (a == 1.0) {
        if (power == 0) {
            if (b <= 2.0) return {ExtendedReal::infinity(), kInf, 0};
            v = tilted_tail(1.0, b - 1.0, k) - (kd - 1.0) * tilted_tail(1.0, b, k);
        } else {
            if (b <= 3.0) return {ExtendedReal::infinity(), kInf, 0};
            v = 0.5 * (tilted_tail(1.0, b - 2.0, k) + tilted_tail(1.0, b - 1.0, k) -
                       kd * (kd - 1.0) * tilted_tail(1.0, b, k));
        }
    } else {
        const double om = 1.0 - a;
        if (power == 0) {
            if (b <= 1.0) return {ExtendedReal::infinity(), kInf, 0};
            v = (tilted_tail(1.0, b, k) - a * tilted_tail(a, b, k)) / om;
        } else {
            if (b <= 2.0) return {ExtendedReal::infinity(), kInf, 0};
            const double z0 = tilted_tail(1.0, b, k);
            const double z1 = tilted_tail(1.0, b - 1.0, k);
            const double w0 = tilted_tail(a, b, k);
            const double w1 = tilted_tail(a, b - 1.0, k);
            v = z1 / om - a * w1 / om - a * z0 / (om * om) +
                a / (om * om) * (w1 - (kd - 1.0) * w0) - a * a / (om * om) * (w1 - kd * w0);
        }
    }
    const double value = head + norm_ * v;
    return {ExtendedReal::finite(value), 1e-13 * std::abs(value), 0};
}

ExtendedReal pgf_eval(const OffspringModel& model, double s, int order) { return model.pgf(s, order); }

ExtendedReal pgf_eval(const LifetimeModel& model, double s, int order) {
    return model.pgf(s, order).value;
}

ExtendedReal tail_radius(const LifetimeModel& model) { return model.tail_radius(); }

OffspringModel make_offspring(const OffspringSpec& spec) { return OffspringModel(spec); }

LifetimeModel make_lifetime(const LifetimeSpec& spec) { return LifetimeModel(spec); }

} // namespace gwlife
