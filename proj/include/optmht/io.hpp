#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "optmht/decision_policy.hpp"
#include "optmht/density.hpp"
#include "optmht/dual_solver.hpp"
#include "optmht/metrics.hpp"

namespace optmht {

using json = nlohmann::ordered_json;

// Malformed user input; the message carries a line/column location when one exists.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shortest round-trip decimal form, independent of the C locale.
std::string format_double(double x);

json parse_json_text(const std::string& text, const std::string& source);
json read_json_file(const std::filesystem::path& path);

DensityModel density_from_json(const json& j, const std::filesystem::path& base_dir = {});
json density_to_json(const DensityModel& model);

Tabulated read_tabulated_csv(const std::filesystem::path& path);

IntegrationConfig integration_from_json(const json& j, IntegrationConfig defaults = {});
json integration_to_json(const IntegrationConfig& c);
SolverConfig solver_config_from_json(const json& solver, double alpha);
json solver_config_to_json(const SolverConfig& c);

json solve_result_to_json(const SolveResult& r, const DensityModel& model, const SolverConfig& config);

struct SavedSolve {
    DensityModel model;
    Multipliers mu;
    double alpha = 0.05;
    std::string status;
};
SavedSolve saved_solve_from_json(const json& j, const std::filesystem::path& base_dir = {});

json validation_to_json(const DensityValidationReport& r, const DensityModel& model);

struct PValueRow {
    std::string id;
    PValueTriple p;
};
// Headered CSV "id,p1,p2,p3".
std::vector<PValueRow> read_pvalue_csv(const std::filesystem::path& path);

std::string decisions_csv(const std::vector<PValueRow>& rows, const std::vector<DecisionRecord>& records);

json power_report_to_json(const PowerReport& r);
std::string power_table_csv(const std::vector<PowerReport>& rows);
json comparison_to_json(const ComparisonTable& t);

}  // namespace optmht
