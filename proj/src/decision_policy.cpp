#include "optmht/decision_policy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "optmht/parallel.hpp"
#include "optmht/policy_math.hpp"

namespace optmht {

void check_pvalues(const PValueTriple& p) {
    for (int k = 0; k < 3; ++k) {
        if (!std::isfinite(p.p[k]) || p.p[k] < 0.0 || p.p[k] > 1.0) {
            std::ostringstream os;
            os << "p-value " << (k + 1) << " = " << p.p[k] << " is outside [0,1]";
            throw std::invalid_argument(os.str());
        }
    }
}

std::array<int, 3> sort_order(const PValueTriple& p) {
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return p.p[a] < p.p[b]; });
    return order;
}

Decision decision_from_count(const PValueTriple& p, int count) {
    Decision d;
    d.order = sort_order(p);
    d.num_rejected = count;
    for (int r = 0; r < 3; ++r) {
        d.sorted_p[r] = p.p[d.order[r]];
        d.D[r] = r < count;
        d.reject[d.order[r]] = d.D[r];
    }
    return d;
}

Decision decide(const DensityModel& model, const Multipliers& mu, const PValueTriple& pvals) {
    check_pvalues(pvals);
    if (!mu.valid()) throw std::invalid_argument("decide: multipliers must be non-negative");
    const std::array<int, 3> order = sort_order(pvals);
    double u[3];
    bool clamped = false;
    const bool unbounded = unbounded_at_zero(model);
    for (int r = 0; r < 3; ++r) {
        u[r] = pvals.p[order[r]];
        if (unbounded) {
            const double c = std::clamp(u[r], kInteriorOffset, 1.0 - kInteriorOffset);
            clamped = clamped || c != u[r];
            u[r] = c;
        }
    }
    const double g1 = eval_g(model, u[0]), g2 = eval_g(model, u[1]), g3 = eval_g(model, u[2]);
    const IndicatorBits b = indicator_bits(scaled_residuals(g2, g3, 1.0 / g1, mu));
    const int count = b.a1 ? (b.a2 ? (b.a3 ? 3 : 2) : 1) : 0;
    Decision d = decision_from_count(pvals, count);
    if (clamped) {
        d.clamped = true;
        d.warning = "p-value clamped into [1e-8, 1-1e-8] for a density unbounded at 0";
    }
    return d;
}

std::vector<DecisionRecord> decide_batch(const DensityModel& model, const Multipliers& mu,
                                         const std::vector<PValueTriple>& rows, int threads) {
    std::vector<DecisionRecord> out(rows.size());
    parallel_for(static_cast<int>(rows.size()), threads, [&](int i) {
        try {
            out[i].decision = decide(model, mu, rows[i]);
        } catch (const std::exception& e) {
            out[i].error = e.what();
        }
    });
    return out;
}

}  // namespace optmht
