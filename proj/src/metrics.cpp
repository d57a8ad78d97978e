#include "optmht/metrics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "optmht/compensated.hpp"
#include "optmht/parallel.hpp"

namespace optmht {

TruthConfig TruthConfig::canonical(int l) {
    if (l < 0 || l > 3) throw std::invalid_argument("truth configuration index must be 0..3");
    TruthConfig t;
    for (int k = 0; k < l; ++k) t.h[k] = 1;
    return t;
}

std::string TruthConfig::label() const {
    return "h" + std::to_string(num_alternatives()) + "=" + std::to_string(h[0]) + std::to_string(h[1]) +
           std::to_string(h[2]);
}

OutcomeCounts count_outcomes(const TruthConfig& truth, const Decision& d) {
    OutcomeCounts c;
    for (int k = 0; k < 3; ++k) {
        const bool alt = truth.h[k] == 1;
        if (!alt) {
            ++c.K0;
            if (d.reject[k])
                ++c.V;
            else
                ++c.U;
        } else if (d.reject[k]) {
            ++c.S;
        } else {
            ++c.T;
        }
    }
    c.R = c.V + c.S;
    c.W = 3 - c.R;
    return c;
}

PValueTriple sample_triple(const DensityModel& model, const TruthConfig& truth, RngStream& rng) {
    PValueTriple p;
    for (int k = 0; k < 3; ++k) p.p[k] = truth.h[k] ? sample_alternative(model, rng) : rng.uniform();
    return p;
}

void check_config(const SimulationConfig& c) {
    if (c.n_reps < 1000) throw std::invalid_argument("simulation: n_reps must be >= 1000");
    if (c.threads < 1) throw std::invalid_argument("simulation: threads must be >= 1");
    if (c.truths.empty()) throw std::invalid_argument("simulation: at least one truth configuration is required");
    bool seen[4] = {};
    for (const auto& t : c.truths) {
        for (int b : t.h)
            if (b != 0 && b != 1) throw std::invalid_argument("simulation: truth bits must be 0 or 1");
        const int l = t.num_alternatives();
        if (seen[l]) throw std::invalid_argument("simulation: two truth configurations with the same number of false nulls");
        seen[l] = true;
    }
}

namespace {

Estimate mean_se(const std::vector<double>& x) {
    CompensatedSum s1, s2;
    for (double v : x) {
        s1.add(v);
        s2.add(v * v);
    }
    const double n = static_cast<double>(x.size());
    const double m = s1.value() / n;
    const double var = std::max(0.0, (s2.value() / n - m * m) * n / (n - 1.0));
    return Estimate{m, std::sqrt(var / n)};
}

Estimate proportion(const std::vector<double>& x) {
    CompensatedSum s;
    for (double v : x) s.add(v);
    const double n = static_cast<double>(x.size());
    const double p = s.value() / n;
    return Estimate{p, std::sqrt(p * (1.0 - p) / n)};
}

}  // namespace

ComparisonTable compare_procedures(const std::vector<Procedure>& procs, const DensityModel& model, double alpha,
                                   const SimulationConfig& config) {
    if (procs.empty()) throw std::invalid_argument("compare: at least one procedure is required");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    check_config(config);
    check_parameters(model);

    const int n = config.n_reps;
    const std::size_t P = procs.size();
    ComparisonTable table;
    table.rows.resize(P);
    for (std::size_t q = 0; q < P; ++q) {
        PowerReport& r = table.rows[q];
        r.procedure = procs[q].name();
        r.model = model_name(model);
        r.parameter = model_parameter(model);
        r.alpha = alpha;
        r.n_reps = n;
        r.seed = config.seed;
        for (const auto& t : config.truths) r.truths.push_back(t.label());
    }

    for (const auto& truth : config.truths) {
        const int l = truth.num_alternatives();
        const std::uint64_t lane = 1 + truth.h[0] + 2 * truth.h[1] + 4 * truth.h[2];
        // Per procedure, per replication: any false rejection, false discovery
        // proportion, share of false nulls rejected, any rejection.
        std::vector<std::vector<double>> fw(P, std::vector<double>(n)), fd(P, std::vector<double>(n)),
            pw(P, std::vector<double>(n)), an(P, std::vector<double>(n));
        const int block = 512;
        const int blocks = (n + block - 1) / block;
        parallel_for(blocks, config.threads, [&](int b) {
            for (int rep = b * block; rep < std::min(n, (b + 1) * block); ++rep) {
                try {
                    RngStream rng = RngStream::derive(config.seed, static_cast<std::uint64_t>(rep), lane);
                    const PValueTriple p = sample_triple(model, truth, rng);
                    for (std::size_t q = 0; q < P; ++q) {
                        const OutcomeCounts c = count_outcomes(truth, apply_procedure(procs[q], p, alpha));
                        fw[q][rep] = c.V > 0 ? 1.0 : 0.0;
                        fd[q][rep] = c.R > 0 ? static_cast<double>(c.V) / c.R : 0.0;
                        pw[q][rep] = l > 0 ? static_cast<double>(c.S) / l : 0.0;
                        an[q][rep] = c.R > 0 ? 1.0 : 0.0;
                    }
                } catch (const std::exception& e) {
                    std::ostringstream os;
                    os << "replication " << rep << " (" << truth.label() << "): " << e.what();
                    throw std::runtime_error(os.str());
                }
            }
        });
        for (std::size_t q = 0; q < P; ++q) {
            PowerReport& r = table.rows[q];
            if (l < 3) {
                r.fwer[l] = proportion(fw[q]);
                r.fdr[l] = mean_se(fd[q]);
            } else {
                r.pi3 = mean_se(pw[q]);
                r.pi_any = proportion(an[q]);
            }
        }
        if (l == 3) {
            for (std::size_t q = 0; q < P; ++q) {
                std::vector<double> diff(n);
                for (int rep = 0; rep < n; ++rep) diff[rep] = pw[q][rep] - pw[0][rep];
                table.paired.push_back(PairedDifference{procs[q].name(), procs[0].name(), mean_se(diff)});
            }
        }
    }
    return table;
}

PowerReport estimate_power(const Procedure& proc, const DensityModel& model, double alpha,
                           const SimulationConfig& config) {
    return compare_procedures({proc}, model, alpha, config).rows.front();
}

}  // namespace optmht
