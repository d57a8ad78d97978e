#include "cell.hpp"
#include "optmht/compensated.hpp"

namespace optmht::kernels {

void row_block_scalar(const AxisGrid& axis, const Multipliers& mu, int i, double out[7]) {
    using namespace detail;
    const int n = axis.n;
    const double ig1 = axis.inv_gbar[i];
    const double wn1 = axis.null_mass[i];
    const double wa1 = axis.alt_mass[i];
    CompensatedSum acc[7];
    for (int j = i; j < n; ++j) {
        const RowConstants rc{wn1 * axis.null_mass[j], wa1 * axis.null_mass[j], wn1 * axis.alt_mass[j],
                              wa1 * axis.alt_mass[j]};
        double diag[7] = {0, 0, 0, 0, 0, 0, 0};
        double rest[7] = {0, 0, 0, 0, 0, 0, 0};
        cells(axis, mu, axis.gbar[j], ig1, rc, j, j + 1, diag);
        cells(axis, mu, axis.gbar[j], ig1, rc, j + 1, n, rest);
        const double td = diag_weight(i, j);
        const double tr = rest_weight(i, j);
        for (int m = 0; m < 7; ++m) acc[m].add(td * diag[m] + tr * rest[m]);
    }
    for (int m = 0; m < 7; ++m) out[m] = acc[m].value();
}

}  // namespace optmht::kernels
