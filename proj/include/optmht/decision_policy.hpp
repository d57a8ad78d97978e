#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "optmht/density.hpp"
#include "optmht/types.hpp"

namespace optmht {

struct PValueTriple {
    std::array<double, 3> p{};
};

struct Decision {
    std::array<bool, 3> reject{};   // original hypothesis order
    int num_rejected = 0;
    std::array<double, 3> sorted_p{};
    std::array<bool, 3> D{};        // D1 >= D2 >= D3 on the sorted view
    std::array<int, 3> order{};     // order[r] = original index of the r-th smallest p
    bool clamped = false;
    std::string warning;
};

// Throws std::invalid_argument unless every p is finite and in [0,1].
void check_pvalues(const PValueTriple& p);

// Stable ascending order of the three p-values.
std::array<int, 3> sort_order(const PValueTriple& p);

// Decision that rejects the `count` smallest p-values.
Decision decision_from_count(const PValueTriple& p, int count);

Decision decide(const DensityModel& model, const Multipliers& mu, const PValueTriple& pvals);

struct DecisionRecord {
    std::optional<Decision> decision;
    std::string error;
};

std::vector<DecisionRecord> decide_batch(const DensityModel& model, const Multipliers& mu,
                                         const std::vector<PValueTriple>& rows, int threads = 1);

}  // namespace optmht
