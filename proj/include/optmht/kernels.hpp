#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "optmht/simplex_integration.hpp"
#include "optmht/types.hpp"

namespace optmht {

// Integrals of the policy D^mu over Q, already scaled to their final form.
struct PolicyMoments {
    double fwer0 = 0.0;       // 6 * int a1
    double fwer1 = 0.0;       // 2 * int a1 (a2 g1 + g2 + g3)
    double fwer2 = 0.0;       // 2 * int a1 (g2 g3 + a2 g1 g3 + a2 a3 g1 g2)
    double pi3 = 0.0;         // 2 * int g1 g2 g3 a1 (1 + a2 + a2 a3)
    double pi_any = 0.0;      // 6 * int g1 g2 g3 a1
    double literal_f1 = 0.0;  // 1 - 2 * int (1 - a2) g1
    double literal_f2 = 0.0;  // 2 * int a3 g1 g2
};

// Unordered sample points with per-point weight (Monte Carlo discretization).
struct NodeSet {
    std::vector<double> g1, g2, g3;
    double weight = 0.0;
};

using Discretization = std::variant<AxisGrid, NodeSet>;

enum class KernelBackend { Auto, Scalar, Avx2 };

bool avx2_available();
std::string backend_name(KernelBackend b);
// Process-wide default used when a call passes Auto.
void set_default_backend(KernelBackend b);
KernelBackend resolve_backend(KernelBackend b);

PolicyMoments accumulate_moments(const AxisGrid& axis, const Multipliers& mu, KernelBackend backend = KernelBackend::Auto,
                                 int threads = 1);
PolicyMoments accumulate_moments(const NodeSet& nodes, const Multipliers& mu);
PolicyMoments accumulate_moments(const Discretization& d, const Multipliers& mu,
                                 KernelBackend backend = KernelBackend::Auto, int threads = 1);

namespace kernels {

// Raw per-row sums for a fixed i: out[0..6] in PolicyMoments field order,
// before the final 6/2 scaling. Exposed for the equivalence tests.
void row_block_scalar(const AxisGrid& axis, const Multipliers& mu, int i, double out[7]);
void row_block_avx2(const AxisGrid& axis, const Multipliers& mu, int i, double out[7]);

}  // namespace kernels

}  // namespace optmht
