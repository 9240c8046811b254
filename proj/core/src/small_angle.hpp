#pragma once

#include <cmath>

namespace botlab::detail {

// atan2(y, x) for x > 0 and |y / x| small: odd series through q^13, whose
// truncation error is below one ulp for |q| <= 0.05.
inline double small_angle(double y, double x) {
    if (x > 0.0) {
        const double q = y / x;
        if (std::abs(q) <= 0.05) {
            const double q2 = q * q;
            return q * (1.0 + q2 * (-1.0 / 3 + q2 * (1.0 / 5 + q2 * (-1.0 / 7 + q2 * (1.0 / 9 + q2 * (-1.0 / 11 + q2 / 13))))));
        }
    }
    return std::atan2(y, x);
}

}  // namespace botlab::detail
