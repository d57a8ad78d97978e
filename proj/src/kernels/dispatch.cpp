#include <atomic>
#include <stdexcept>

#include "optmht/compensated.hpp"
#include "optmht/kernels.hpp"
#include "optmht/parallel.hpp"
#include "optmht/policy_math.hpp"

namespace optmht {

namespace {

std::atomic<KernelBackend> g_default{KernelBackend::Auto};

PolicyMoments scale(const double raw[7]) {
    PolicyMoments m;
    m.fwer0 = 6.0 * raw[0];
    m.fwer1 = 2.0 * raw[1];
    m.fwer2 = 2.0 * raw[2];
    m.pi3 = 2.0 * raw[3];
    m.pi_any = 6.0 * raw[4];
    m.literal_f1 = 1.0 - 2.0 * raw[5];
    m.literal_f2 = 2.0 * raw[6];
    return m;
}

}  // namespace

bool avx2_available() {
#if defined(OPTMHT_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    static const bool ok = __builtin_cpu_supports("avx2");
    return ok;
#else
    return false;
#endif
}

std::string backend_name(KernelBackend b) {
    switch (b) {
        case KernelBackend::Auto: return "auto";
        case KernelBackend::Scalar: return "scalar";
        case KernelBackend::Avx2: return "avx2";
    }
    return "unknown";
}

void set_default_backend(KernelBackend b) { g_default.store(b); }

KernelBackend resolve_backend(KernelBackend b) {
    if (b == KernelBackend::Auto) b = g_default.load();
    if (b == KernelBackend::Auto) return avx2_available() ? KernelBackend::Avx2 : KernelBackend::Scalar;
    if (b == KernelBackend::Avx2 && !avx2_available()) throw std::runtime_error("AVX2 kernel requested but not available");
    return b;
}

PolicyMoments accumulate_moments(const AxisGrid& axis, const Multipliers& mu, KernelBackend backend, int threads) {
    const KernelBackend be = resolve_backend(backend);
    const int n = axis.n;
    std::vector<std::array<double, 7>> partial(static_cast<std::size_t>(n));
    parallel_for(n, threads, [&](int i) {
#ifdef OPTMHT_HAVE_AVX2
        if (be == KernelBackend::Avx2) {
            kernels::row_block_avx2(axis, mu, i, partial[i].data());
            return;
        }
#endif
        kernels::row_block_scalar(axis, mu, i, partial[i].data());
    });
    CompensatedSum acc[7];
    for (const auto& p : partial)
        for (int m = 0; m < 7; ++m) acc[m].add(p[m]);
    double raw[7];
    for (int m = 0; m < 7; ++m) raw[m] = acc[m].value();
    return scale(raw);
}

PolicyMoments accumulate_moments(const NodeSet& nodes, const Multipliers& mu) {
    CompensatedSum acc[7];
    const std::size_t count = nodes.g1.size();
    for (std::size_t q = 0; q < count; ++q) {
        const double g1 = nodes.g1[q], g2 = nodes.g2[q], g3 = nodes.g3[q];
        const IndicatorBits b = indicator_bits(scaled_residuals(g2, g3, 1.0 / g1, mu));
        const bool d1 = b.a1, d2 = d1 && b.a2, d3 = d2 && b.a3;
        const double prod = g1 * g2 * g3;
        if (d1) {
            acc[0].add(1.0);
            acc[1].add(g2 + g3);
            acc[2].add(g2 * g3);
            acc[3].add(prod);
            acc[4].add(prod);
        }
        if (d2) {
            acc[1].add(g1);
            acc[2].add(g1 * g3);
            acc[3].add(prod);
        }
        if (d3) {
            acc[2].add(g1 * g2);
            acc[3].add(prod);
        }
        if (!b.a2) acc[5].add(g1);
        if (b.a3) acc[6].add(g1 * g2);
    }
    double raw[7];
    for (int m = 0; m < 7; ++m) raw[m] = acc[m].value() * nodes.weight;
    return scale(raw);
}

PolicyMoments accumulate_moments(const Discretization& d, const Multipliers& mu, KernelBackend backend, int threads) {
    if (const auto* a = std::get_if<AxisGrid>(&d)) return accumulate_moments(*a, mu, backend, threads);
    return accumulate_moments(std::get<NodeSet>(d), mu);
}

}  // namespace optmht
