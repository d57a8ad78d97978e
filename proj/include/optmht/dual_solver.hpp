#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "optmht/density.hpp"
#include "optmht/kernels.hpp"
#include "optmht/simplex_integration.hpp"
#include "optmht/types.hpp"

namespace optmht {

struct ConstraintCoefficients {
    std::array<double, 3> a{};
    std::array<std::array<double, 3>, 3> b{};  // b[l][i]
};

struct Residuals {
    double R1 = 0.0, R2 = 0.0, R3 = 0.0;
};

struct Indicators {
    bool alpha1 = false, alpha2 = false, alpha3 = false;
};

// Constraint: F_gamma(mu) is the gamma-th error functional of D^mu, the
// quantity the constraint bounds. Literal: the shortened closed forms
// F1 = 1 - 2 int beta2 g1 and F2 = 2 int alpha3 g1 g2 (F0 is the same in both).
enum class TargetForm { Constraint, Literal };

enum class CoordinateFlag { Success, InfeasibleAtZero, BracketFailed, SlackAtZero };

struct CoordinateResult {
    double mu_coord = 0.0;
    CoordinateFlag flag = CoordinateFlag::Success;
    std::string message;
    double f_at_zero = 0.0;
    double bracket_upper = 0.0;  // U handed to the bisection (0 when no bisection ran)
    int bisection_steps = 0;
    int evaluations = 0;
};

struct SolverConfig {
    double alpha = 0.05;
    double delta = 1e-5;
    double epsilon = 1e-4;
    int T_max = 200;
    double U_s = 0.5;
    double U_f = 2.0;
    double U_max = 1e6;
    int max_iter_b = 200;
    IntegrationConfig integration{IntegrationConfig::Method::Grid, 128};
    bool allow_slack = true;
    TargetForm target_form = TargetForm::Constraint;
    KernelBackend backend = KernelBackend::Auto;
};

void check_config(const SolverConfig& config);

enum class SolveStatus { Converged, MaxIterations, InfeasibleAtZero, BracketFailed, SlackAtZero };

struct TraceEntry {
    Multipliers mu;
    double step = 0.0;
};

struct CoordinateLogEntry {
    int iteration = 0;
    int gamma = 0;
    CoordinateResult result;
};

struct SolveResult {
    Multipliers mu;
    int outer_iterations = 0;
    std::array<double, 3> kkt_residuals{};
    std::vector<TraceEntry> trace;
    SolveStatus status = SolveStatus::MaxIterations;
    int status_coordinate = -1;
    std::string message;
    std::vector<CoordinateLogEntry> coordinate_log;
    // All policy functionals at mu on the reporting discretization,
    // including both target forms.
    PolicyMoments diagnostics;
    int kkt_n = 0;
};

std::string to_string(CoordinateFlag f);
std::string to_string(SolveStatus s);
std::string to_string(TargetForm f);

ConstraintCoefficients coefficients(const DensityModel& model, const SimplexPoint& u);
Residuals residuals(const DensityModel& model, const Multipliers& mu, const SimplexPoint& u);
Indicators indicators(const DensityModel& model, const Multipliers& mu, const SimplexPoint& u);

// Grid: density-graded axis with n cells. MonteCarlo: n sorted uniform triples.
Discretization make_discretization(const DensityModel& model, const IntegrationConfig& integration);

double target_value(int gamma, const PolicyMoments& m, TargetForm form);

// F_gamma with coordinate gamma set to x; the other two come from `fixed`.
double target_F(int gamma, double x, const Multipliers& fixed, const Discretization& d,
                TargetForm form = TargetForm::Constraint, KernelBackend backend = KernelBackend::Auto, int threads = 1);
double target_F(int gamma, double x, const Multipliers& fixed, const DensityModel& model,
                const IntegrationConfig& integration, TargetForm form = TargetForm::Constraint);

// Bracket-and-bisect root of a non-increasing F against config.alpha.
CoordinateResult compute_coordinate_mu(const std::function<double(double)>& F, const SolverConfig& config);
CoordinateResult compute_coordinate_mu(int gamma, const Multipliers& fixed, const DensityModel& model,
                                       const SolverConfig& config);

SolveResult solve_optimal_mu(const DensityModel& model, const SolverConfig& config);

double lagrangian(const DensityModel& model, const Multipliers& mu, double alpha, const IntegrationConfig& integration);
double lagrangian(const PolicyMoments& m, const Multipliers& mu, double alpha);

std::array<double, 3> check_kkt(const DensityModel& model, const Multipliers& mu, double alpha,
                                const IntegrationConfig& integration, TargetForm form = TargetForm::Constraint);

}  // namespace optmht
