#pragma once

#include "optmht/types.hpp"

namespace optmht {

// Residuals divided by 2*g1 (> 0). Signs, and so the indicators, are those of
// the unscaled residuals, but the largest product formed is g2*g3, which
// keeps sharply peaked densities finite. The operation order here is the
// contract shared with the vector kernels: change both or neither.
struct ScaledResiduals {
    double r1, r2, r3;
};

inline ScaledResiduals scaled_residuals(double g2, double g3, double inv_g1, const Multipliers& mu) {
    const double p23 = g2 * g3;
    const double s23 = g2 + g3;
    const double c0 = 3.0 * mu.mu0;
    ScaledResiduals r;
    r.r1 = p23 - ((c0 + mu.mu1 * s23) + mu.mu2 * p23) * inv_g1;
    r.r2 = p23 - (mu.mu1 + mu.mu2 * g3);
    r.r3 = p23 - mu.mu2 * g2;
    return r;
}

struct IndicatorBits {
    bool a1, a2, a3;
};

inline IndicatorBits indicator_bits(const ScaledResiduals& r) {
    const double s12 = r.r1 + r.r2;
    IndicatorBits b;
    b.a3 = r.r3 > 0.0;
    b.a2 = (r.r2 > 0.0) || (r.r2 + r.r3 > 0.0);
    b.a1 = (r.r1 > 0.0) || (s12 > 0.0) || (s12 + r.r3 > 0.0);
    return b;
}

}  // namespace optmht
