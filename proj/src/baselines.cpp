#include "optmht/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace optmht {

Procedure Procedure::baseline(ProcedureKind k) {
    if (k == ProcedureKind::Optimal) throw std::invalid_argument("optimal procedure needs a density and multipliers");
    Procedure p;
    p.kind = k;
    return p;
}

Procedure Procedure::optimal(DensityModel model, Multipliers mu) {
    check_parameters(model);
    if (!mu.valid()) throw std::invalid_argument("optimal procedure: multipliers must be non-negative");
    Procedure p;
    p.kind = ProcedureKind::Optimal;
    p.model = std::move(model);
    p.mu = mu;
    return p;
}

std::string Procedure::name() const { return procedure_name(kind); }

std::string procedure_name(ProcedureKind k) {
    switch (k) {
        case ProcedureKind::Bonferroni: return "bonferroni";
        case ProcedureKind::Holm: return "holm";
        case ProcedureKind::Hochberg: return "hochberg";
        case ProcedureKind::Hommel: return "hommel";
        case ProcedureKind::RomanoWolfIndependent: return "romano_wolf";
        case ProcedureKind::Optimal: return "optimal";
    }
    return "unknown";
}

ProcedureKind procedure_kind_from_name(const std::string& name) {
    if (name == "bonferroni") return ProcedureKind::Bonferroni;
    if (name == "holm") return ProcedureKind::Holm;
    if (name == "hochberg") return ProcedureKind::Hochberg;
    if (name == "hommel") return ProcedureKind::Hommel;
    if (name == "romano_wolf" || name == "rw") return ProcedureKind::RomanoWolfIndependent;
    if (name == "optimal") return ProcedureKind::Optimal;
    throw std::invalid_argument("unknown procedure '" + name + "'");
}

std::vector<ProcedureKind> baseline_kinds() {
    return {ProcedureKind::Bonferroni, ProcedureKind::Holm, ProcedureKind::Hochberg, ProcedureKind::Hommel,
            ProcedureKind::RomanoWolfIndependent};
}

bool simes_rejects(std::vector<double> p, double alpha) {
    std::sort(p.begin(), p.end());
    const double m = static_cast<double>(p.size());
    for (std::size_t j = 0; j < p.size(); ++j)
        if (p[j] <= (j + 1) * alpha / m) return true;
    return false;
}

namespace {

int stepdown(const Decision& sorted, const double thr[3]) {
    int count = 0;
    while (count < 3 && sorted.sorted_p[count] <= thr[count]) ++count;
    return count;
}

int stepup(const Decision& sorted, const double thr[3]) {
    for (int r = 2; r >= 0; --r)
        if (sorted.sorted_p[r] <= thr[r]) return r + 1;
    return 0;
}

Decision from_flags(const PValueTriple& p, const std::array<bool, 3>& rej) {
    Decision d = decision_from_count(p, 0);
    d.reject = rej;
    d.num_rejected = 0;
    for (int k = 0; k < 3; ++k) d.num_rejected += rej[k];
    for (int r = 0; r < 3; ++r) d.D[r] = rej[d.order[r]];
    return d;
}

}  // namespace

Decision apply_procedure(const Procedure& proc, const PValueTriple& pvals, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    check_pvalues(pvals);
    const Decision view = decision_from_count(pvals, 0);
    switch (proc.kind) {
        case ProcedureKind::Bonferroni: {
            std::array<bool, 3> rej{};
            for (int k = 0; k < 3; ++k) rej[k] = pvals.p[k] <= alpha / 3.0;
            return from_flags(pvals, rej);
        }
        case ProcedureKind::Holm: {
            const double thr[3] = {alpha / 3.0, alpha / 2.0, alpha};
            return decision_from_count(pvals, stepdown(view, thr));
        }
        case ProcedureKind::Hochberg: {
            const double thr[3] = {alpha / 3.0, alpha / 2.0, alpha};
            return decision_from_count(pvals, stepup(view, thr));
        }
        case ProcedureKind::Hommel: {
            // Closed testing: H_i falls iff every intersection containing it is Simes-rejected.
            bool subset_rejected[8] = {};
            for (int mask = 1; mask < 8; ++mask) {
                std::vector<double> sub;
                for (int k = 0; k < 3; ++k)
                    if (mask & (1 << k)) sub.push_back(pvals.p[k]);
                subset_rejected[mask] = simes_rejects(sub, alpha);
            }
            std::array<bool, 3> rej{};
            for (int k = 0; k < 3; ++k) {
                bool all = true;
                for (int mask = 1; mask < 8; ++mask)
                    if ((mask & (1 << k)) && !subset_rejected[mask]) all = false;
                rej[k] = all;
            }
            return from_flags(pvals, rej);
        }
        case ProcedureKind::RomanoWolfIndependent: {
            double thr[3];
            for (int r = 0; r < 3; ++r) thr[r] = -std::expm1(std::log1p(-alpha) / (3 - r));
            return decision_from_count(pvals, stepdown(view, thr));
        }
        case ProcedureKind::Optimal: {
            if (!proc.model) throw std::invalid_argument("optimal procedure has no density");
            return decide(*proc.model, proc.mu, pvals);
        }
    }
    throw std::invalid_argument("unknown procedure");
}

}  // namespace optmht
