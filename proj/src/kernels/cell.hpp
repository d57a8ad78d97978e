#pragma once

#include "optmht/kernels.hpp"
#include "optmht/policy_math.hpp"

namespace optmht::kernels::detail {
// Internal linkage: each kernel translation unit gets its own copy compiled
// with its own target flags.
namespace {

struct RowConstants {
    double A, B, C, E;  // wn1*wn2, wa1*wn2, wn1*wa2, wa1*wa2
};

// Adds the contributions of cells k in [k_begin, k_end) of row (i, j) to t.
inline void cells(const AxisGrid& axis, const Multipliers& mu, double g2, double ig1, const RowConstants& rc,
                  int k_begin, int k_end, double t[7]) {
    for (int k = k_begin; k < k_end; ++k) {
        const double wn3 = axis.null_mass[k];
        const double wa3 = axis.alt_mass[k];
        const IndicatorBits b = indicator_bits(scaled_residuals(g2, axis.gbar[k], ig1, mu));
        const bool d1 = b.a1;
        const bool d2 = d1 && b.a2;
        const bool d3 = d2 && b.a3;
        if (d1) {
            t[0] += rc.A * wn3;
            t[1] += rc.C * wn3 + rc.A * wa3;
            t[2] += rc.C * wa3;
            t[3] += rc.E * wa3;
            t[4] += rc.E * wa3;
        }
        if (d2) {
            t[1] += rc.B * wn3;
            t[2] += rc.B * wa3;
            t[3] += rc.E * wa3;
        }
        if (d3) {
            t[2] += rc.E * wn3;
            t[3] += rc.E * wa3;
        }
        if (!b.a2) t[5] += rc.B * wn3;
        if (b.a3) t[6] += rc.E * wn3;
    }
}

inline double diag_weight(int i, int j) { return i == j ? 1.0 / 6.0 : 0.5; }
inline double rest_weight(int i, int j) { return i == j ? 0.5 : 1.0; }

}  // namespace
}  // namespace optmht::kernels::detail
