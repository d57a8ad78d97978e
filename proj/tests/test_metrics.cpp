#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "optmht/dual_solver.hpp"
#include "optmht/metrics.hpp"

using namespace optmht;

namespace {

SimulationConfig sim(int reps, std::uint64_t seed, std::vector<int> ls = {0, 1, 2, 3}, int threads = 1) {
    SimulationConfig c;
    c.n_reps = reps;
    c.seed = seed;
    c.threads = threads;
    c.truths.clear();
    for (int l : ls) c.truths.push_back(TruthConfig::canonical(l));
    return c;
}

Decision rejecting(std::array<bool, 3> r) {
    Decision d;
    d.reject = r;
    d.num_rejected = r[0] + r[1] + r[2];
    return d;
}

}  // namespace

TEST(Metrics, OutcomeCountIdentities) {
    for (int mask = 0; mask < 8; ++mask)
        for (int rm = 0; rm < 8; ++rm) {
            TruthConfig t;
            for (int k = 0; k < 3; ++k) t.h[k] = (mask >> k) & 1;
            const OutcomeCounts c = count_outcomes(t, rejecting({bool(rm & 1), bool(rm & 2), bool(rm & 4)}));
            EXPECT_EQ(c.U + c.V, c.K0);
            EXPECT_EQ(c.T + c.S, 3 - c.K0);
            EXPECT_EQ(c.V + c.S, c.R);
            EXPECT_EQ(c.U + c.T, c.W);
            EXPECT_EQ(c.R + c.W, 3);
            EXPECT_EQ(c.K0, 3 - t.num_alternatives());
        }
}

TEST(Metrics, CanonicalTruths) {
    EXPECT_EQ(TruthConfig::canonical(2).h, (std::array<int, 3>{1, 1, 0}));
    EXPECT_EQ(TruthConfig::canonical(0).label(), "h0=000");
    EXPECT_THROW(TruthConfig::canonical(4), std::invalid_argument);
}

TEST(Metrics, NullSamplingIsUniform) {
    RngStream rng(3);
    const int n = 20000;
    std::array<std::vector<double>, 3> x;
    for (int i = 0; i < n; ++i) {
        const PValueTriple p = sample_triple(BetaModel{0.2}, TruthConfig::canonical(0), rng);
        for (int k = 0; k < 3; ++k) x[k].push_back(p.p[k]);
    }
    for (auto& v : x) {
        std::sort(v.begin(), v.end());
        double d = 0;
        for (int i = 0; i < n; ++i) d = std::max({d, std::abs(v[i] - double(i) / n), std::abs(double(i + 1) / n - v[i])});
        EXPECT_LT(d, 1.628 / std::sqrt(double(n)));
    }
}

TEST(Metrics, MixedTruthMeans) {
    RngStream rng(4);
    const int n = 100000;
    TruthConfig t;
    t.h = {1, 0, 0};
    double s[3] = {0, 0, 0};
    for (int i = 0; i < n; ++i) {
        const PValueTriple p = sample_triple(BetaModel{0.2}, t, rng);
        for (int k = 0; k < 3; ++k) s[k] += p.p[k];
    }
    // sd of Beta(0.2,1) is about 0.26, of U(0,1) about 0.29
    EXPECT_NEAR(s[0] / n, 1.0 / 6.0, 3 * 0.26 / std::sqrt(double(n)));
    EXPECT_NEAR(s[1] / n, 0.5, 3 * 0.29 / std::sqrt(double(n)));
    EXPECT_NEAR(s[2] / n, 0.5, 3 * 0.29 / std::sqrt(double(n)));
}

TEST(Metrics, BonferroniGlobalNullMatchesExactRate) {
    const double exact = 1.0 - std::pow(1.0 - 0.05 / 3.0, 3.0);
    const PowerReport r = estimate_power(Procedure::baseline(ProcedureKind::Bonferroni), Uniform{}, 0.05, sim(100000, 7, {0}, 4));
    ASSERT_TRUE(r.fwer[0].has_value());
    EXPECT_NEAR(r.fwer[0]->value, exact, 3 * r.fwer[0]->se);
}

TEST(Metrics, UniformAlternativeLooksLikeTheNull) {
    const PowerReport r = estimate_power(Procedure::baseline(ProcedureKind::Holm), Uniform{}, 0.05, sim(50000, 8, {0, 3}));
    // all-null and all-uniform-alternative draws use different lanes but the same law
    const double any = r.pi_any->value, fw0 = r.fwer[0]->value;
    EXPECT_NEAR(any, fw0, 3 * std::hypot(r.pi_any->se, r.fwer[0]->se));
}

TEST(Metrics, IdenticalSeedsGiveIdenticalTables) {
    const std::vector<Procedure> procs = {Procedure::optimal(BetaModel{0.2}, Multipliers{0, 0.7458, 1.4398}),
                                          Procedure::baseline(ProcedureKind::Hommel)};
    const ComparisonTable a = compare_procedures(procs, BetaModel{0.2}, 0.05, sim(3000, 42, {0, 1, 2, 3}, 1));
    const ComparisonTable b = compare_procedures(procs, BetaModel{0.2}, 0.05, sim(3000, 42, {0, 1, 2, 3}, 3));
    for (std::size_t q = 0; q < procs.size(); ++q) {
        EXPECT_EQ(a.rows[q].pi3->value, b.rows[q].pi3->value);
        EXPECT_EQ(a.rows[q].pi3->se, b.rows[q].pi3->se);
        for (int l = 0; l < 3; ++l) {
            EXPECT_EQ(a.rows[q].fwer[l]->value, b.rows[q].fwer[l]->value);
            EXPECT_EQ(a.rows[q].fdr[l]->value, b.rows[q].fdr[l]->value);
        }
    }
    EXPECT_EQ(a.paired[1].pi3_diff.value, b.paired[1].pi3_diff.value);
    const ComparisonTable c = compare_procedures(procs, BetaModel{0.2}, 0.05, sim(3000, 43));
    EXPECT_NE(a.rows[0].pi3->value, c.rows[0].pi3->value);
}

TEST(Metrics, FdrNeverExceedsFwerPerReplication) {
    const ComparisonTable t = compare_procedures(
        {Procedure::baseline(ProcedureKind::Hochberg), Procedure::baseline(ProcedureKind::Bonferroni)}, StudentT{2.0}, 0.1,
        sim(5000, 9, {0, 1, 2}));
    for (const auto& r : t.rows)
        for (int l = 0; l < 3; ++l) EXPECT_LE(r.fdr[l]->value, r.fwer[l]->value + 1e-15);
    // Under the global null every rejection is false, so the two coincide.
    EXPECT_DOUBLE_EQ(t.rows[0].fdr[0]->value, t.rows[0].fwer[0]->value);
}

TEST(Metrics, InputValidation) {
    EXPECT_THROW(check_config(sim(0, 1)), std::invalid_argument);
    EXPECT_THROW(check_config(sim(999, 1)), std::invalid_argument);
    EXPECT_THROW(check_config(sim(1000, 1, {2, 2})), std::invalid_argument);
    EXPECT_THROW(estimate_power(Procedure::baseline(ProcedureKind::Holm), Uniform{}, 0.05, sim(0, 1)), std::invalid_argument);
    EXPECT_THROW(compare_procedures({}, Uniform{}, 0.05, sim(1000, 1)), std::invalid_argument);
}

TEST(Metrics, TabulatedSamplingErrorNamesReplication) {
    try {
        estimate_power(Procedure::baseline(ProcedureKind::Holm), make_tabulated({0.0, 1.0}, {1.0, 1.0}), 0.05,
                       sim(1000, 1, {1}));
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("replication"), std::string::npos);
    }
}

TEST(Metrics, OptimalBetaPolicyControlsFwer) {
    const SolveResult s = solve_optimal_mu(BetaModel{0.2}, SolverConfig{});
    ASSERT_EQ(s.status, SolveStatus::Converged);
    const PowerReport r = estimate_power(Procedure::optimal(BetaModel{0.2}, s.mu), BetaModel{0.2}, 0.05, sim(20000, 5, {0, 1, 2, 3}, 4));
    for (int l = 0; l < 3; ++l) EXPECT_LE(r.fwer[l]->value, 0.05 + 3 * r.fwer[l]->se) << "l=" << l;
    // Grid functionals of the same policy predict the simulated rates.
    EXPECT_NEAR(r.pi3->value, s.diagnostics.pi3, 4 * r.pi3->se);
    EXPECT_NEAR(r.pi_any->value, s.diagnostics.pi_any, 4 * r.pi_any->se);
}
