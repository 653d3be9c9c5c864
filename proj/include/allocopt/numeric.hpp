#pragma once

#include <cmath>
#include <cstddef>

// Small numeric helpers shared by every solver: the snap tolerance applied
// before floor/ceil and threshold comparisons, and compensated summation.

namespace allocopt {

// Absolute tolerance for snapping real values to integers before floor/ceil
// and for "counts as covering the unit object" comparisons. T/n arithmetic in
// doubles routinely lands 1 ulp below an integer; without the snap, ceil and
// floor flip to the wrong bin.
inline constexpr double snap_tol = 1e-9;

inline double snap(double x) {
    const double r = std::round(x);
    return std::abs(x - r) <= snap_tol ? r : x;
}

inline long ceil_snapped(double x) { return static_cast<long>(std::ceil(snap(x))); }

inline long floor_snapped(double x) { return static_cast<long>(std::floor(snap(x))); }

// Recovery test: accessed amount covers one unit of the object.
inline bool covers_unit(double amount) { return amount >= 1.0 - snap_tol; }

inline bool nearly_equal(double a, double b) { return std::abs(a - b) <= snap_tol; }

// a > b beyond the snap band.
inline bool definitely_greater(double a, double b) { return a > b + snap_tol; }

// Kahan compensated accumulator; used wherever binomial terms are summed.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

}  // namespace allocopt
