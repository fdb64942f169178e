#pragma once

/**
 * @file entropy.hpp
 * @brief q-ary entropy and its inverse, used by distance/rate bounds.
 */

#include <cmath>
#include <stdexcept>

namespace aqec {

/// Binary entropy in bits; h2(0) = h2(1) = 0.
inline double h2(double x) {
    if (x < 0.0 || x > 1.0) throw std::domain_error("h2: argument outside [0,1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

/// q-ary entropy H_q(x) = x log_q(q-1) - x log_q x - (1-x) log_q(1-x),
/// defined on [0,1]; increasing on [0, 1-1/q] with H_q(1-1/q) = 1.
inline double hq(double q, double x) {
    if (q < 2.0) throw std::domain_error("hq: alphabet size must be >= 2");
    if (x < 0.0 || x > 1.0) throw std::domain_error("hq: argument outside [0,1]");
    if (x == 0.0) return 0.0;
    const double lq = std::log2(q);
    double v = x * std::log2(q - 1.0) / lq + h2(x) / lq;
    return v;
}

/// Inverse of H_q on the increasing branch: the unique x in [0, 1-1/q] with
/// H_q(x) = y, for y in [0,1].  Values y <= 0 map to 0, y >= 1 to 1-1/q.
inline double hq_inv(double q, double y) {
    if (q < 2.0) throw std::domain_error("hq_inv: alphabet size must be >= 2");
    const double hi_x = 1.0 - 1.0 / q;
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return hi_x;
    double lo = 0.0, hi = hi_x;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (hq(q, mid) < y)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace aqec
