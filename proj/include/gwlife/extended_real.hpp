#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gwlife {

/// A real number that is either finite or +infinity.
///
/// Several results branch on whether a moment or a boundary value is finite,
/// so infinity is carried as an explicit state instead of a sentinel float.
class ExtendedReal {
public:
    constexpr ExtendedReal() = default;

    static constexpr ExtendedReal finite(double v) { return ExtendedReal(v, true); }
    static constexpr ExtendedReal infinity() { return ExtendedReal(0.0, false); }

    constexpr bool is_finite() const { return finite_; }
    constexpr bool is_infinite() const { return !finite_; }

    /// Finite value; throws when infinite.
    double value() const {
        if (!finite_) throw std::logic_error("ExtendedReal: value() of +inf");
        return value_;
    }

    /// Conversion to a plain double with +inf mapped to IEEE infinity.
    constexpr double to_double() const {
        return finite_ ? value_ : std::numeric_limits<double>::infinity();
    }

    friend constexpr bool operator<(const ExtendedReal& x, double y) { return x.finite_ && x.value_ < y; }
    friend constexpr bool operator>=(const ExtendedReal& x, double y) { return !(x < y); }
    friend constexpr bool operator>(const ExtendedReal& x, double y) { return !x.finite_ || x.value_ > y; }
    friend constexpr bool operator<=(const ExtendedReal& x, double y) { return !(x > y); }
    friend constexpr bool operator==(const ExtendedReal&, const ExtendedReal&) = default;

private:
    constexpr ExtendedReal(double v, bool f) : value_(v), finite_(f) {}

    double value_ = 0.0;
    bool finite_ = true;
};

inline ExtendedReal from_double(double v) {
    return std::isinf(v) && v > 0 ? ExtendedReal::infinity() : ExtendedReal::finite(v);
}

} // namespace gwlife
