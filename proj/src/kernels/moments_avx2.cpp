#include <immintrin.h>

#include "cell.hpp"
#include "optmht/compensated.hpp"

namespace optmht::kernels {

namespace {

inline double hsum(__m256d v) {
    alignas(32) double lane[4];
    _mm256_store_pd(lane, v);
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

inline __m256d gt0(__m256d x) { return _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_GT_OQ); }

}  // namespace

// Same arithmetic as detail::cells, four k at a time. Plain mul/add only so
// that every residual, and hence every indicator bit, matches the scalar path.
void row_block_avx2(const AxisGrid& axis, const Multipliers& mu, int i, double out[7]) {
    using namespace detail;
    const int n = axis.n;
    const double ig1 = axis.inv_gbar[i];
    const double wn1 = axis.null_mass[i];
    const double wa1 = axis.alt_mass[i];
    const double* gb = axis.gbar.data();
    const double* wn = axis.null_mass.data();
    const double* wa = axis.alt_mass.data();

    const __m256d vig1 = _mm256_set1_pd(ig1);
    const __m256d vc0 = _mm256_set1_pd(3.0 * mu.mu0);
    const __m256d vm1 = _mm256_set1_pd(mu.mu1);
    const __m256d vm2 = _mm256_set1_pd(mu.mu2);
    const __m256d ones = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));

    CompensatedSum acc[7];
    for (int j = i; j < n; ++j) {
        const double g2 = gb[j];
        const RowConstants rc{wn1 * wn[j], wa1 * wn[j], wn1 * wa[j], wa1 * wa[j]};
        double diag[7] = {0, 0, 0, 0, 0, 0, 0};
        double rest[7] = {0, 0, 0, 0, 0, 0, 0};
        cells(axis, mu, g2, ig1, rc, j, j + 1, diag);

        const __m256d vg2 = _mm256_set1_pd(g2);
        const __m256d vm2g2 = _mm256_set1_pd(mu.mu2 * g2);
        const __m256d vA = _mm256_set1_pd(rc.A);
        const __m256d vB = _mm256_set1_pd(rc.B);
        const __m256d vC = _mm256_set1_pd(rc.C);
        const __m256d vE = _mm256_set1_pd(rc.E);
        __m256d t0 = _mm256_setzero_pd(), t1 = t0, t2 = t0, t3 = t0, t4 = t0, t5 = t0, t6 = t0;

        int k = j + 1;
        for (; k + 4 <= n; k += 4) {
            const __m256d g3 = _mm256_loadu_pd(gb + k);
            const __m256d wn3 = _mm256_loadu_pd(wn + k);
            const __m256d wa3 = _mm256_loadu_pd(wa + k);

            const __m256d p23 = _mm256_mul_pd(vg2, g3);
            const __m256d s23 = _mm256_add_pd(vg2, g3);
            const __m256d r1 = _mm256_sub_pd(
                p23, _mm256_mul_pd(_mm256_add_pd(_mm256_add_pd(vc0, _mm256_mul_pd(vm1, s23)), _mm256_mul_pd(vm2, p23)),
                                   vig1));
            const __m256d r2 = _mm256_sub_pd(p23, _mm256_add_pd(vm1, _mm256_mul_pd(vm2, g3)));
            const __m256d r3 = _mm256_sub_pd(p23, vm2g2);

            const __m256d s12 = _mm256_add_pd(r1, r2);
            const __m256d a3 = gt0(r3);
            const __m256d a2 = _mm256_or_pd(gt0(r2), gt0(_mm256_add_pd(r2, r3)));
            const __m256d a1 = _mm256_or_pd(_mm256_or_pd(gt0(r1), gt0(s12)), gt0(_mm256_add_pd(s12, r3)));
            const __m256d d1 = a1;
            const __m256d d2 = _mm256_and_pd(d1, a2);
            const __m256d d3 = _mm256_and_pd(d2, a3);
            const __m256d na2 = _mm256_andnot_pd(a2, ones);

            const __m256d Awn = _mm256_mul_pd(vA, wn3);
            const __m256d Awa = _mm256_mul_pd(vA, wa3);
            const __m256d Bwn = _mm256_mul_pd(vB, wn3);
            const __m256d Bwa = _mm256_mul_pd(vB, wa3);
            const __m256d Cwn = _mm256_mul_pd(vC, wn3);
            const __m256d Cwa = _mm256_mul_pd(vC, wa3);
            const __m256d Ewn = _mm256_mul_pd(vE, wn3);
            const __m256d Ewa = _mm256_mul_pd(vE, wa3);

            t0 = _mm256_add_pd(t0, _mm256_and_pd(d1, Awn));
            t1 = _mm256_add_pd(t1, _mm256_and_pd(d1, _mm256_add_pd(Cwn, Awa)));
            t1 = _mm256_add_pd(t1, _mm256_and_pd(d2, Bwn));
            t2 = _mm256_add_pd(t2, _mm256_and_pd(d1, Cwa));
            t2 = _mm256_add_pd(t2, _mm256_and_pd(d2, Bwa));
            t2 = _mm256_add_pd(t2, _mm256_and_pd(d3, Ewn));
            t3 = _mm256_add_pd(t3, _mm256_and_pd(d1, Ewa));
            t3 = _mm256_add_pd(t3, _mm256_and_pd(d2, Ewa));
            t3 = _mm256_add_pd(t3, _mm256_and_pd(d3, Ewa));
            t4 = _mm256_add_pd(t4, _mm256_and_pd(d1, Ewa));
            t5 = _mm256_add_pd(t5, _mm256_and_pd(na2, Bwn));
            t6 = _mm256_add_pd(t6, _mm256_and_pd(a3, Ewn));
        }
        cells(axis, mu, g2, ig1, rc, k, n, rest);
        rest[0] += hsum(t0);
        rest[1] += hsum(t1);
        rest[2] += hsum(t2);
        rest[3] += hsum(t3);
        rest[4] += hsum(t4);
        rest[5] += hsum(t5);
        rest[6] += hsum(t6);

        const double td = diag_weight(i, j);
        const double tr = rest_weight(i, j);
        for (int m = 0; m < 7; ++m) acc[m].add(td * diag[m] + tr * rest[m]);
    }
    for (int m = 0; m < 7; ++m) out[m] = acc[m].value();
}

}  // namespace optmht::kernels
