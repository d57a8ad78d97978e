#include "optmht/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace optmht {

namespace {

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* b = s.data();
    const char* e = b + s.size();
    if (*b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && ptr == e;
}

// Column numbers are 1-based character offsets of the field start.
int field_column(const std::string& line, std::size_t field) {
    std::size_t col = 0;
    for (std::size_t f = 0; f < field; ++f) col = line.find(',', col) + 1;
    return static_cast<int>(col) + 1;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::istringstream in(read_text(path));
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

double get_num(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw InputError(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

long long get_int(const json& obj, const char* key, long long fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) throw InputError(std::string("field '") + key + "' must be an integer");
    return v.get<long long>();
}

json mu_json(const Multipliers& m) { return json::array({m.mu0, m.mu1, m.mu2}); }

json moments_json(const PolicyMoments& m) {
    json j;
    j["fwer0"] = m.fwer0;
    j["fwer1"] = m.fwer1;
    j["fwer2"] = m.fwer2;
    j["pi3"] = m.pi3;
    j["pi_any"] = m.pi_any;
    j["literal_f1"] = m.literal_f1;
    j["literal_f2"] = m.literal_f2;
    return j;
}

json estimate_json(const std::optional<Estimate>& e) {
    if (!e) return nullptr;
    return json{{"value", e->value}, {"se", e->se}};
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
            if (text[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream os;
        os << source << ": line " << line << ", column " << col << ": malformed JSON";
        throw InputError(os.str());
    }
}

json read_json_file(const std::filesystem::path& path) { return parse_json_text(read_text(path), path.string()); }

Tabulated read_tabulated_csv(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    std::vector<double> u, g;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        if (trim(lines[ln]).empty()) continue;
        const auto f = split(lines[ln]);
        double a, b;
        const bool ok_a = f.size() >= 1 && parse_number(f[0], a);
        const bool ok_b = f.size() >= 2 && parse_number(f[1], b);
        if (ln == 0 && !ok_a) continue;  // header
        if (f.size() != 2 || !ok_a || !ok_b) {
            std::ostringstream os;
            os << path.string() << ": line " << (ln + 1) << ", column " << field_column(lines[ln], ok_a ? 1 : 0)
               << ": expected two numeric columns u,g";
            throw InputError(os.str());
        }
        u.push_back(a);
        g.push_back(b);
    }
    return make_tabulated(std::move(u), std::move(g));
}

DensityModel density_from_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object() || !j.contains("model") || !j.at("model").is_string())
        throw InputError("density: expected an object with a string field 'model'");
    const std::string name = j.at("model").get<std::string>();
    const json params = j.value("params", json::object());
    DensityModel m;
    if (name == "truncated_normal") {
        m = TruncatedNormal{get_num(params, "theta", -2.0), get_num(params, "M", 6.0)};
    } else if (name == "mixture_normal") {
        m = MixtureNormal{get_num(params, "theta", -2.0)};
    } else if (name == "student_t") {
        m = StudentT{get_num(params, "df", 4.0)};
    } else if (name == "beta") {
        m = BetaModel{get_num(params, "theta", 0.2)};
    } else if (name == "uniform") {
        m = Uniform{};
    } else if (name == "tabulated") {
        if (params.contains("csv")) {
            std::filesystem::path p = params.at("csv").get<std::string>();
            if (p.is_relative()) p = base_dir / p;
            m = read_tabulated_csv(p);
        } else if (params.contains("u") && params.contains("g")) {
            m = make_tabulated(params.at("u").get<std::vector<double>>(), params.at("g").get<std::vector<double>>());
        } else {
            throw InputError("density: tabulated needs params.csv or params.u/params.g");
        }
    } else {
        throw InputError("density: unknown model '" + name + "'");
    }
    check_parameters(m);
    return m;
}

json density_to_json(const DensityModel& model) {
    json j;
    j["model"] = model_name(model);
    json p = json::object();
    if (const auto* t = std::get_if<TruncatedNormal>(&model)) {
        p["theta"] = t->theta;
        p["M"] = t->M;
    } else if (const auto* x = std::get_if<MixtureNormal>(&model)) {
        p["theta"] = x->theta;
    } else if (const auto* s = std::get_if<StudentT>(&model)) {
        p["df"] = s->df;
    } else if (const auto* b = std::get_if<BetaModel>(&model)) {
        p["theta"] = b->theta;
    } else if (const auto* tab = std::get_if<Tabulated>(&model)) {
        p["u"] = tab->u;
        p["g"] = tab->g;
    }
    j["params"] = p;
    return j;
}

IntegrationConfig integration_from_json(const json& j, IntegrationConfig defaults) {
    IntegrationConfig c = defaults;
    if (j.is_null()) return c;
    if (j.contains("method")) {
        const std::string m = j.at("method").get<std::string>();
        if (m == "grid")
            c.method = IntegrationConfig::Method::Grid;
        else if (m == "monte_carlo")
            c.method = IntegrationConfig::Method::MonteCarlo;
        else
            throw InputError("integration: method must be 'grid' or 'monte_carlo'");
    }
    if (c.method == IntegrationConfig::Method::MonteCarlo && !j.contains("n")) c.n = 100000;
    c.n = static_cast<int>(get_int(j, "n", c.n));
    c.seed = static_cast<std::uint64_t>(get_int(j, "seed", static_cast<long long>(c.seed)));
    return c;
}

json integration_to_json(const IntegrationConfig& c) {
    json j;
    j["method"] = c.method == IntegrationConfig::Method::Grid ? "grid" : "monte_carlo";
    j["n"] = c.n;
    j["seed"] = c.seed;
    return j;
}

SolverConfig solver_config_from_json(const json& s, double alpha) {
    SolverConfig c;
    c.alpha = alpha;
    if (s.is_null()) return c;
    if (!s.is_object()) throw InputError("solver: expected an object");
    c.delta = get_num(s, "delta", c.delta);
    c.epsilon = get_num(s, "epsilon", c.epsilon);
    c.T_max = static_cast<int>(get_int(s, "T_max", c.T_max));
    c.U_s = get_num(s, "U_s", c.U_s);
    c.U_f = get_num(s, "U_f", c.U_f);
    c.U_max = get_num(s, "U_max", c.U_max);
    c.max_iter_b = static_cast<int>(get_int(s, "max_iter_b", c.max_iter_b));
    if (s.contains("allow_slack")) c.allow_slack = s.at("allow_slack").get<bool>();
    if (s.contains("target_form")) {
        const std::string f = s.at("target_form").get<std::string>();
        if (f == "constraint")
            c.target_form = TargetForm::Constraint;
        else if (f == "literal")
            c.target_form = TargetForm::Literal;
        else
            throw InputError("solver: target_form must be 'constraint' or 'literal'");
    }
    if (s.contains("integration")) c.integration = integration_from_json(s.at("integration"), c.integration);
    return c;
}

json solver_config_to_json(const SolverConfig& c) {
    json j;
    j["delta"] = c.delta;
    j["epsilon"] = c.epsilon;
    j["T_max"] = c.T_max;
    j["U_s"] = c.U_s;
    j["U_f"] = c.U_f;
    j["U_max"] = c.U_max;
    j["max_iter_b"] = c.max_iter_b;
    j["allow_slack"] = c.allow_slack;
    j["target_form"] = to_string(c.target_form);
    j["integration"] = integration_to_json(c.integration);
    return j;
}

json solve_result_to_json(const SolveResult& r, const DensityModel& model, const SolverConfig& config) {
    json j;
    j["alpha"] = config.alpha;
    j["density"] = density_to_json(model);
    j["solver"] = solver_config_to_json(config);
    j["mu"] = mu_json(r.mu);
    j["status"] = to_string(r.status);
    if (r.status_coordinate >= 0) j["status_coordinate"] = r.status_coordinate;
    j["message"] = r.message;
    j["kkt"] = json::array({r.kkt_residuals[0], r.kkt_residuals[1], r.kkt_residuals[2]});
    j["kkt_n"] = r.kkt_n;
    j["outer_iterations"] = r.outer_iterations;
    json trace = json::array();
    for (const auto& t : r.trace) trace.push_back(json{{"mu", mu_json(t.mu)}, {"step", t.step}});
    j["trace"] = trace;
    json log = json::array();
    for (const auto& e : r.coordinate_log) {
        json x;
        x["iteration"] = e.iteration;
        x["gamma"] = e.gamma;
        x["mu"] = e.result.mu_coord;
        x["flag"] = to_string(e.result.flag);
        x["f_at_zero"] = e.result.f_at_zero;
        x["bracket_upper"] = e.result.bracket_upper;
        x["bisection_steps"] = e.result.bisection_steps;
        x["evaluations"] = e.result.evaluations;
        log.push_back(x);
    }
    j["coordinate_log"] = log;
    j["diagnostics"] = moments_json(r.diagnostics);
    return j;
}

SavedSolve saved_solve_from_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object() || !j.contains("mu") || !j.contains("density"))
        throw InputError("solve result: expected fields 'mu' and 'density'");
    const auto mu = j.at("mu").get<std::vector<double>>();
    if (mu.size() != 3) throw InputError("solve result: 'mu' must have three entries");
    SavedSolve s;
    s.model = density_from_json(j.at("density"), base_dir);
    s.mu = Multipliers{mu[0], mu[1], mu[2]};
    if (!s.mu.valid()) throw InputError("solve result: multipliers must be non-negative");
    s.alpha = get_num(j, "alpha", 0.05);
    s.status = j.value("status", std::string("Converged"));
    return s;
}

json validation_to_json(const DensityValidationReport& r, const DensityModel& model) {
    json j;
    j["density"] = density_to_json(model);
    j["grid_size"] = r.grid_size;
    j["interior_offset"] = r.interior_offset;
    j["min_value"] = r.min_value;
    j["max_value"] = r.max_value;
    j["monotone_violations"] = r.monotone_violations;
    j["mass"] = r.mass;
    j["mass_tolerance"] = r.mass_tolerance;
    j["lipschitz_lower_estimate"] = r.lipschitz_lower_estimate;
    return j;
}

std::vector<PValueRow> read_pvalue_csv(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    std::vector<PValueRow> rows;
    bool header_seen = false;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        if (trim(lines[ln]).empty()) continue;
        const auto f = split(lines[ln]);
        if (!header_seen) {
            header_seen = true;
            double probe;
            if (f.size() >= 2 && !parse_number(f[1], probe)) continue;
        }
        if (f.size() != 4) {
            std::ostringstream os;
            os << path.string() << ": line " << (ln + 1) << ", column 1: expected 4 fields id,p1,p2,p3, found "
               << f.size();
            throw InputError(os.str());
        }
        PValueRow row;
        row.id = f[0];
        for (int k = 0; k < 3; ++k) {
            if (!parse_number(f[k + 1], row.p.p[k])) {
                std::ostringstream os;
                os << path.string() << ": line " << (ln + 1) << ", column " << field_column(lines[ln], k + 1)
                   << ": '" << f[k + 1] << "' is not a number";
                throw InputError(os.str());
            }
        }
        rows.push_back(row);
    }
    return rows;
}

std::string decisions_csv(const std::vector<PValueRow>& rows, const std::vector<DecisionRecord>& records) {
    std::ostringstream os;
    os << "id,reject1,reject2,reject3,num_rejected\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        os << rows[i].id;
        if (records[i].decision) {
            const Decision& d = *records[i].decision;
            os << ',' << d.reject[0] << ',' << d.reject[1] << ',' << d.reject[2] << ',' << d.num_rejected;
        } else {
            os << ",,,,";
        }
        os << '\n';
    }
    return os.str();
}

json power_report_to_json(const PowerReport& r) {
    json j;
    j["procedure"] = r.procedure;
    j["model"] = r.model;
    j["parameter"] = r.parameter;
    j["alpha"] = r.alpha;
    j["truths"] = r.truths;
    j["pi3"] = estimate_json(r.pi3);
    j["pi_any"] = estimate_json(r.pi_any);
    json fw = json::array(), fd = json::array();
    for (int l = 0; l < 3; ++l) {
        fw.push_back(estimate_json(r.fwer[l]));
        fd.push_back(estimate_json(r.fdr[l]));
    }
    j["fwer"] = fw;
    j["fdr"] = fd;
    j["n_reps"] = r.n_reps;
    j["seed"] = r.seed;
    return j;
}

std::string power_table_csv(const std::vector<PowerReport>& rows) {
    std::ostringstream os;
    os << "procedure,model,theta_df,truth,pi3,pi3_se,pi_any,pi_any_se,fwer0,fwer1,fwer2,fdr0,fdr1,fdr2,n_reps,seed,"
          "alpha,fwer0_se,fwer1_se,fwer2_se,fdr0_se,fdr1_se,fdr2_se\n";
    auto v = [](const std::optional<Estimate>& e) { return e ? format_double(e->value) : std::string(); };
    auto s = [](const std::optional<Estimate>& e) { return e ? format_double(e->se) : std::string(); };
    for (const auto& r : rows) {
        std::string truth;
        for (std::size_t k = 0; k < r.truths.size(); ++k) truth += (k ? ";" : "") + r.truths[k];
        os << r.procedure << ',' << r.model << ',' << format_double(r.parameter) << ',' << truth << ',' << v(r.pi3)
           << ',' << s(r.pi3) << ',' << v(r.pi_any) << ',' << s(r.pi_any);
        for (int l = 0; l < 3; ++l) os << ',' << v(r.fwer[l]);
        for (int l = 0; l < 3; ++l) os << ',' << v(r.fdr[l]);
        os << ',' << r.n_reps << ',' << r.seed << ',' << format_double(r.alpha);
        for (int l = 0; l < 3; ++l) os << ',' << s(r.fwer[l]);
        for (int l = 0; l < 3; ++l) os << ',' << s(r.fdr[l]);
        os << '\n';
    }
    return os.str();
}

json comparison_to_json(const ComparisonTable& t) {
    json j;
    json rows = json::array();
    for (const auto& r : t.rows) rows.push_back(power_report_to_json(r));
    j["rows"] = rows;
    json paired = json::array();
    for (const auto& p : t.paired)
        paired.push_back(json{{"procedure", p.procedure},
                              {"reference", p.reference},
                              {"pi3_diff", p.pi3_diff.value},
                              {"pi3_diff_se", p.pi3_diff.se}});
    j["paired"] = paired;
    return j;
}

}  // namespace optmht
