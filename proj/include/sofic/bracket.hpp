#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace sofic {

// Closed interval [lo, hi] certifying a real quantity.
struct Bracket {
    double lo = 0.0;
    double hi = 0.0;

    bool well_formed() const { return lo <= hi && std::isfinite(lo); }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool overlaps(const Bracket& o) const { return lo <= o.hi && o.lo <= hi; }
    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
};

// Point estimate with symmetric additive radius.
struct ValueRadius {
    double value = 0.0;
    double radius = 0.0;

    Bracket bracket() const { return {value - radius, value + radius}; }
};

// Point estimate with multiplicative log-radius: the certified interval is
// [value e^{-r}, value e^{+r}] for nonnegative quantities.
struct ValueLogRadius {
    double value = 0.0;
    double log_radius = 0.0;

    Bracket bracket() const {
        return {value * std::exp(-log_radius), value * std::exp(log_radius)};
    }
};

// One ulp-scale ledger term per floating operation, folded into radii.
inline constexpr double kLedgerUlp = 4.0 * std::numeric_limits<double>::epsilon();

}  // namespace sofic
