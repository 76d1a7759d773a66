#pragma once

#include <cmath>

namespace vrb::num {

inline double softplus(double x) {
    // log(1 + e^x) without overflow for large |x|
    if (x > 30.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// log P(bit = 1) / log P(bit = 0) for a Bernoulli(sigmoid(logit)) bit
inline double log_bernoulli_on(double logit) { return -softplus(-logit); }
inline double log_bernoulli_off(double logit) { return -softplus(logit); }

} // namespace vrb::num
