#pragma once

// One-step recursions for the normalized consecutive ratios
// b~_n = (a_n / a_{n-1}) * k_1^{1/3} of a stationary sequence.
//
// Eliminating amplitudes from the interior balance turns it into a
// quadratic for the next (or previous) ratio. Both maps fix b~ = 1, the
// Kolmogorov-scaling ray a_n ~ C k_n^{-1/3}.

#include <cmath>
#include <stdexcept>

#include "dyadic/model.hpp"

namespace dyadic {

struct RatioStepParams {
    double k1_43 = 0.0;   // k_1^{4/3} = 2^{4 beta / 3}
    double k1_m43 = 0.0;  // k_1^{-4/3}
    double delta1 = 0.0;
    double delta2 = 0.0;

    static RatioStepParams from(const ModelParams& p) {
        RatioStepParams r;
        r.k1_43 = std::exp2(4.0 * p.beta / 3.0);
        r.k1_m43 = 1.0 / r.k1_43;
        r.delta1 = p.delta1;
        r.delta2 = p.delta2;
        return r;
    }
};

// b~_{n+1} from b~_n: positive root of
//   d2 x^2 + d1 K x - (d1 K b^{-2} + d2 b^{-1}) = 0,  K = k_1^{4/3}.
// Evaluated in conjugate form 2c / (d1 K + sqrt(d1^2 K^2 + 4 d2 c)) with
// c = d1 K b^{-2} + d2 b^{-1}: the textbook "(-B + sqrt(B^2+4AC))/2A"
// form loses ~1e-13 near the fixed point and far more for large b.
inline double forward_ratio_step(double b, const RatioStepParams& p) {
    if (!(b > 0.0)) throw std::invalid_argument("forward_ratio_step: b must be > 0");
    if (p.delta2 == 0.0)
        throw std::invalid_argument(
            "forward_ratio_step: delta2 = 0 degenerates; use the pure-KP closed form instead");
    const double K = p.k1_43;
    const double c = p.delta1 * K / (b * b) + p.delta2 / b;
    const double B = p.delta1 * K;
    return 2.0 * c / (B + std::sqrt(B * B + 4.0 * p.delta2 * c));
}

// b~_n from b~_{n+1}: the same elimination run downward, which swaps the
// roles of the two transfer families and the sign of the k_1 power:
//   d1 x^2 + d2 K' x - (d2 K' b^{-2} + d1 b^{-1}) = 0,  K' = k_1^{-4/3}.
inline double backward_ratio_step(double b_next, const RatioStepParams& p) {
    if (!(b_next > 0.0)) throw std::invalid_argument("backward_ratio_step: b must be > 0");
    if (p.delta1 == 0.0)
        throw std::invalid_argument(
            "backward_ratio_step: delta1 = 0 degenerates; the pure-Obukhov case is handled by "
            "symmetry");
    const double Kp = p.k1_m43;
    const double c = p.delta2 * Kp / (b_next * b_next) + p.delta1 / b_next;
    const double B = p.delta2 * Kp;
    return 2.0 * c / (B + std::sqrt(B * B + 4.0 * p.delta1 * c));
}

// Linearization of the forward map at the fixed point b~ = 1. Greater
// than 1 exactly when d1/d2 > k_1^{-4/3}: on that side the Kolmogorov ray
// repels ratio perturbations (shooting regime); below it attracts.
inline double ratio_fixed_point_multiplier(const RatioStepParams& p) {
    const double K = p.k1_43;
    return (2.0 * p.delta1 * K + p.delta2) / (p.delta1 * K + 2.0 * p.delta2);
}

}  // namespace dyadic
