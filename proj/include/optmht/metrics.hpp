#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "optmht/baselines.hpp"
#include "optmht/decision_policy.hpp"
#include "optmht/density.hpp"
#include "optmht/rng.hpp"

namespace optmht {

struct TruthConfig {
    std::array<int, 3> h{};

    // h_l: the first l hypotheses are false nulls.
    static TruthConfig canonical(int l);
    int num_alternatives() const { return h[0] + h[1] + h[2]; }
    std::string label() const;
};

struct OutcomeCounts {
    int U = 0, V = 0, T = 0, S = 0, W = 0, R = 0, K0 = 0;
};

OutcomeCounts count_outcomes(const TruthConfig& truth, const Decision& d);

PValueTriple sample_triple(const DensityModel& model, const TruthConfig& truth, RngStream& rng);

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

struct PowerReport {
    std::string procedure;
    std::string model;
    double parameter = 0.0;
    double alpha = 0.05;
    std::vector<std::string> truths;
    std::optional<Estimate> pi3, pi_any;
    std::array<std::optional<Estimate>, 3> fwer, fdr;
    int n_reps = 0;
    std::uint64_t seed = 0;
};

struct SimulationConfig {
    int n_reps = 20000;
    std::uint64_t seed = 1;
    int threads = 1;
    std::vector<TruthConfig> truths = {TruthConfig::canonical(0), TruthConfig::canonical(1), TruthConfig::canonical(2),
                                       TruthConfig::canonical(3)};
};

void check_config(const SimulationConfig& config);

// Paired Monte Carlo difference of average power against a reference procedure.
struct PairedDifference {
    std::string procedure;
    std::string reference;
    Estimate pi3_diff;
};

struct ComparisonTable {
    std::vector<PowerReport> rows;
    std::vector<PairedDifference> paired;  // each row against rows[0]; present when h3 was simulated
};

PowerReport estimate_power(const Procedure& proc, const DensityModel& model, double alpha,
                           const SimulationConfig& config);

// All procedures see the same sampled p-values in every replication.
ComparisonTable compare_procedures(const std::vector<Procedure>& procs, const DensityModel& model, double alpha,
                                   const SimulationConfig& config);

}  // namespace optmht
