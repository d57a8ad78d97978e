#pragma once

#include <optional>
#include <string>
#include <vector>

#include "optmht/decision_policy.hpp"
#include "optmht/density.hpp"
#include "optmht/types.hpp"

namespace optmht {

enum class ProcedureKind { Bonferroni, Holm, Hochberg, Hommel, RomanoWolfIndependent, Optimal };

struct Procedure {
    ProcedureKind kind = ProcedureKind::Bonferroni;
    std::optional<DensityModel> model;  // Optimal only
    Multipliers mu;                     // Optimal only

    static Procedure baseline(ProcedureKind k);
    static Procedure optimal(DensityModel model, Multipliers mu);
    std::string name() const;
};

// Names accepted on the command line: bonferroni, holm, hochberg, hommel,
// romano_wolf (alias rw), optimal.
ProcedureKind procedure_kind_from_name(const std::string& name);
std::string procedure_name(ProcedureKind k);
std::vector<ProcedureKind> baseline_kinds();

// Simes test of the intersection of the given p-values at level alpha.
bool simes_rejects(std::vector<double> p, double alpha);

Decision apply_procedure(const Procedure& proc, const PValueTriple& pvals, double alpha);

}  // namespace optmht
