#include "optmht/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>

#include "optmht/baselines.hpp"
#include "optmht/io.hpp"
#include "optmht/metrics.hpp"

namespace optmht {

namespace fs = std::filesystem;

namespace {

class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string command;
    std::string config_path;
    std::string procedure;
    std::string out;
    int threads = 1;
    std::optional<std::uint64_t> seed;
    std::string kernel = "auto";
};

struct Context {
    Options opt;
    json cfg;
    fs::path base;
    double alpha = 0.05;
    std::ostream* err = nullptr;
};

json section(const Context& c, const char* key) {
    if (!c.cfg.contains(key)) return json::object();
    const json& s = c.cfg.at(key);
    if (!s.is_object()) throw InputError(std::string("config: '") + key + "' must be an object");
    return s;
}

DensityModel config_density(const Context& c) {
    if (!c.cfg.contains("density")) throw InputError("config: missing 'density'");
    return density_from_json(c.cfg.at("density"), c.base);
}

fs::path resolve(const Context& c, const std::string& p) {
    fs::path path(p);
    return path.is_relative() ? c.base / path : path;
}

void emit(const Context& c, const std::string& text, std::ostream& out) {
    if (c.opt.out.empty()) {
        out << text;
        return;
    }
    std::ofstream f(c.opt.out, std::ios::binary);
    if (!f) throw InputError("cannot write '" + c.opt.out + "'");
    f << text;
}

bool wants_json(const Context& c) { return c.opt.out.size() >= 5 && c.opt.out.substr(c.opt.out.size() - 5) == ".json"; }

SolverConfig solver_config(const Context& c) {
    SolverConfig sc = solver_config_from_json(c.cfg.contains("solver") ? c.cfg.at("solver") : json(), c.alpha);
    sc.integration.threads = c.opt.threads;
    return sc;
}

void warn_if_not_monotone(const DensityModel& model, std::ostream& err) {
    const DensityValidationReport r = validate_density(model, 1000);
    if (r.monotone_violations > 0)
        err << "optmht: warning: density is not non-increasing (" << r.monotone_violations
            << " rising stretch(es)); run validate-density for details\n";
}

struct Solved {
    SolveResult result;
    SolverConfig config;
};

Solved solve(const Context& c, const DensityModel& model) {
    warn_if_not_monotone(model, *c.err);
    Solved s{SolveResult{}, solver_config(c)};
    s.result = solve_optimal_mu(model, s.config);
    return s;
}

void throw_if_failed(const SolveResult& r) {
    if (r.status == SolveStatus::Converged) return;
    std::string msg = "solver stopped with status " + to_string(r.status);
    if (r.status_coordinate >= 0) msg += " at coordinate mu" + std::to_string(r.status_coordinate);
    if (!r.message.empty()) msg += ": " + r.message;
    if (r.status == SolveStatus::MaxIterations) msg += ": no convergence within T_max outer iterations";
    throw SolverFailure(msg);
}

// Density and multipliers for the optimal policy: a saved solve, inline mu, or a fresh solve.
std::pair<DensityModel, Multipliers> optimal_inputs(const Context& c, const json& sec) {
    if (sec.contains("solve_result")) {
        const fs::path p = resolve(c, sec.at("solve_result").get<std::string>());
        const SavedSolve s = saved_solve_from_json(read_json_file(p), p.parent_path());
        if (s.status != "Converged") throw SolverFailure("saved solve result has status " + s.status);
        return {s.model, s.mu};
    }
    const DensityModel model = config_density(c);
    if (sec.contains("mu")) {
        const auto mu = sec.at("mu").get<std::vector<double>>();
        if (mu.size() != 3) throw InputError("config: 'mu' must have three entries");
        const Multipliers m{mu[0], mu[1], mu[2]};
        if (!m.valid()) throw InputError("config: multipliers must be non-negative");
        return {model, m};
    }
    const Solved s = solve(c, model);
    throw_if_failed(s.result);
    return {model, s.result.mu};
}

TruthConfig truth_from_json(const json& t) {
    if (t.is_string()) {
        const std::string s = t.get<std::string>();
        if (s.size() == 2 && s[0] == 'h' && s[1] >= '0' && s[1] <= '3') return TruthConfig::canonical(s[1] - '0');
        throw InputError("simulation: truth '" + s + "' is not one of h0..h3");
    }
    const auto bits = t.get<std::vector<int>>();
    if (bits.size() != 3) throw InputError("simulation: a truth vector needs three bits");
    TruthConfig tc;
    for (int k = 0; k < 3; ++k) tc.h[k] = bits[k];
    return tc;
}

SimulationConfig simulation_config(const Context& c, const json& sec) {
    SimulationConfig s;
    if (sec.contains("n_reps")) s.n_reps = sec.at("n_reps").get<int>();
    if (sec.contains("seed")) s.seed = sec.at("seed").get<std::uint64_t>();
    if (c.opt.seed) s.seed = *c.opt.seed;
    if (sec.contains("truths")) {
        s.truths.clear();
        for (const auto& t : sec.at("truths")) s.truths.push_back(truth_from_json(t));
    }
    s.threads = c.opt.threads;
    check_config(s);
    return s;
}

std::vector<std::string> split_names(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<Procedure> build_procedures(const Context& c, const json& sec, const std::vector<std::string>& names,
                                        DensityModel& model) {
    std::vector<Procedure> procs;
    bool have_model = false;
    for (const auto& name : names) {
        const ProcedureKind k = procedure_kind_from_name(name);
        if (k == ProcedureKind::Optimal) {
            auto [m, mu] = optimal_inputs(c, sec);
            model = m;
            have_model = true;
            procs.push_back(Procedure::optimal(m, mu));
        } else {
            procs.push_back(Procedure::baseline(k));
        }
    }
    if (!have_model) model = config_density(c);
    return procs;
}

int cmd_solve(const Context& c, std::ostream& out, std::ostream& err) {
    const DensityModel model = config_density(c);
    const Solved s = solve(c, model);
    emit(c, solve_result_to_json(s.result, model, s.config).dump(2) + "\n", out);
    try {
        throw_if_failed(s.result);
    } catch (const SolverFailure& e) {
        err << "optmht: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

int cmd_decide(const Context& c, std::ostream& out, std::ostream& err) {
    const json sec = section(c, "decide");
    if (!sec.contains("input")) throw InputError("config: decide.input (p-value CSV) is required");
    const auto rows = read_pvalue_csv(resolve(c, sec.at("input").get<std::string>()));
    const auto [model, mu] = optimal_inputs(c, sec);
    std::vector<PValueTriple> triples;
    for (const auto& r : rows) triples.push_back(r.p);
    const auto records = decide_batch(model, mu, triples, c.opt.threads);
    emit(c, decisions_csv(rows, records), out);
    int code = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!records[i].error.empty()) {
            err << "optmht: row '" << rows[i].id << "': " << records[i].error << "\n";
            code = 1;
        } else if (records[i].decision->clamped) {
            err << "optmht: row '" << rows[i].id << "': " << records[i].decision->warning << "\n";
        }
    }
    return code;
}

int cmd_simulate(const Context& c, std::ostream& out, bool compare) {
    const json sec = section(c, "simulation");
    const SimulationConfig sim = simulation_config(c, sec);
    std::vector<std::string> names;
    if (!c.opt.procedure.empty()) {
        names = split_names(c.opt.procedure);
    } else if (compare) {
        if (sec.contains("procedures"))
            names = sec.at("procedures").get<std::vector<std::string>>();
        else
            names = {"optimal", "bonferroni", "holm", "hochberg", "hommel", "romano_wolf"};
    } else {
        names = {sec.value("procedure", std::string("optimal"))};
    }
    if (names.empty()) throw InputError("no procedure given");
    if (!compare && names.size() != 1) throw InputError("simulate runs one procedure; use compare for several");
    DensityModel model;
    const auto procs = build_procedures(c, sec, names, model);
    const ComparisonTable table = compare_procedures(procs, model, c.alpha, sim);
    if (wants_json(c)) {
        json j = compare ? comparison_to_json(table) : power_report_to_json(table.rows.front());
        emit(c, j.dump(2) + "\n", out);
    } else {
        emit(c, power_table_csv(table.rows), out);
    }
    return 0;
}

int cmd_validate(const Context& c, std::ostream& out) {
    const DensityModel model = config_density(c);
    const json sec = section(c, "validate");
    const int grid = sec.value("grid_size", 10000);
    const DensityValidationReport r = validate_density(model, grid);
    emit(c, validation_to_json(r, model).dump(2) + "\n", out);
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal multiple testing for three hypotheses under FWER control"};
    app.require_subcommand(1);
    Options opt;
    const char* commands[] = {"solve", "decide", "simulate", "compare", "validate-density"};
    for (const char* name : commands) {
        CLI::App* sc = app.add_subcommand(name);
        sc->add_option("--config", opt.config_path, "JSON configuration file")->required();
        sc->add_option("--procedure", opt.procedure, "procedure name(s), comma separated");
        sc->add_option("--out", opt.out, "output path (stdout when omitted)");
        sc->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
        sc->add_option("--seed", opt.seed, "simulation seed override");
        sc->add_option("--kernel", opt.kernel, "integration kernel: auto, scalar or avx2")
            ->check(CLI::IsMember({"auto", "scalar", "avx2"}));
    }
    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }
    opt.command = app.get_subcommands().front()->get_name();

    try {
        set_default_backend(opt.kernel == "scalar" ? KernelBackend::Scalar
                            : opt.kernel == "avx2" ? KernelBackend::Avx2
                                                   : KernelBackend::Auto);
        Context c;
        c.opt = opt;
        c.err = &err;
        c.cfg = read_json_file(opt.config_path);
        if (!c.cfg.is_object()) throw InputError(opt.config_path + ": top level must be a JSON object");
        c.base = fs::path(opt.config_path).parent_path();
        if (c.cfg.contains("alpha")) {
            if (!c.cfg.at("alpha").is_number()) throw InputError("config: 'alpha' must be a number");
            c.alpha = c.cfg.at("alpha").get<double>();
        }
        if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw InputError("config: alpha must lie in (0,1)");

        if (opt.command == "solve") return cmd_solve(c, out, err);
        if (opt.command == "decide") return cmd_decide(c, out, err);
        if (opt.command == "simulate") return cmd_simulate(c, out, false);
        if (opt.command == "compare") return cmd_simulate(c, out, true);
        return cmd_validate(c, out);
    } catch (const SolverFailure& e) {
        err << "optmht: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        err << "optmht: config: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "optmht: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace optmht
