#ifndef CAUSALBENCH_CORE_LOGISTIC_HPP
#define CAUSALBENCH_CORE_LOGISTIC_HPP

#include <cmath>
#include <limits>

namespace causalbench {

// Standard logistic e^y / (1 + e^y), with the branch split so that exp()
// is only ever taken of a non-positive argument. Never overflows.
inline double logistic(double y) {
    if (y >= 0.0) {
        return 1.0 / (1.0 + std::exp(-y));
    }
    const double e = std::exp(y);
    return e / (1.0 + e);
}

// Logistic clamped to the open interval (0, 1). Saturated arguments round
// to exactly 0 or 1 in double precision (e.g. y = 40); probabilities used
// as Bernoulli parameters must stay strictly interior.
inline double logistic_open(double y) {
    double p = logistic(y);
    constexpr double lo = std::numeric_limits<double>::min();
    const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    if (p < lo) p = lo;
    if (p > hi) p = hi;
    return p;
}

// log(1 + e^y) without overflow; the Bernoulli log-likelihood term.
inline double softplus(double y) {
    if (y > 0.0) {
        return y + std::log1p(std::exp(-y));
    }
    return std::log1p(std::exp(y));
}

}  // namespace causalbench

#endif
