#include "optmht/dual_solver.hpp"

#include <cmath>
#include <stdexcept>

#include "optmht/policy_math.hpp"

namespace optmht {

namespace {

const char* kDecreaseAlpha = "Consider decreasing FWER level \xCE\xB1.";
const char* kIncreaseUmax = "Consider increasing U_max or decreasing FWER level \xCE\xB1.";

void check_sorted(const SimplexPoint& u) {
    if (!(u.u1 <= u.u2 && u.u2 <= u.u3)) throw std::invalid_argument("simplex point must satisfy u1 <= u2 <= u3");
}

Multipliers with_coordinate(Multipliers m, int gamma, double x) {
    m[gamma] = x;
    return m;
}

IntegrationConfig refined(IntegrationConfig c) {
    c.n *= 2;
    if (c.method == IntegrationConfig::Method::MonteCarlo) c.seed += 1;
    return c;
}

}  // namespace

std::string to_string(CoordinateFlag f) {
    switch (f) {
        case CoordinateFlag::Success: return "Success";
        case CoordinateFlag::InfeasibleAtZero: return "InfeasibleAtZero";
        case CoordinateFlag::BracketFailed: return "BracketFailed";
        case CoordinateFlag::SlackAtZero: return "SlackAtZero";
    }
    return "Unknown";
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::MaxIterations: return "MaxIterations";
        case SolveStatus::InfeasibleAtZero: return "InfeasibleAtZero";
        case SolveStatus::BracketFailed: return "BracketFailed";
        case SolveStatus::SlackAtZero: return "SlackAtZero";
    }
    return "Unknown";
}

std::string to_string(TargetForm f) { return f == TargetForm::Constraint ? "constraint" : "literal"; }

void check_config(const SolverConfig& c) {
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw std::invalid_argument("solver: alpha must lie in (0,1)");
    if (!(c.delta > 0.0)) throw std::invalid_argument("solver: delta must be > 0");
    if (!(c.epsilon > 0.0)) throw std::invalid_argument("solver: epsilon must be > 0");
    if (!(c.delta < c.epsilon)) throw std::invalid_argument("solver: delta must be < epsilon");
    if (c.T_max < 1) throw std::invalid_argument("solver: T_max must be >= 1");
    if (!(c.U_s > 0.0)) throw std::invalid_argument("solver: U_s must be > 0");
    if (!(c.U_f > 1.0)) throw std::invalid_argument("solver: U_f must be > 1");
    if (!(c.U_s < c.U_max)) throw std::invalid_argument("solver: U_s must be < U_max");
    if (c.max_iter_b < 1) throw std::invalid_argument("solver: max_iter_b must be >= 1");
    check_config(c.integration);
}

ConstraintCoefficients coefficients(const DensityModel& model, const SimplexPoint& u) {
    check_sorted(u);
    const double g1 = eval_g(model, u.u1), g2 = eval_g(model, u.u2), g3 = eval_g(model, u.u3);
    ConstraintCoefficients c;
    const double p = 2.0 * g1 * g2 * g3;
    c.a = {p, p, p};
    c.b[0] = {6.0, 0.0, 0.0};
    c.b[1] = {2.0 * (g2 + g3), 2.0 * g1, 0.0};
    c.b[2] = {2.0 * g2 * g3, 2.0 * g1 * g3, 2.0 * g1 * g2};
    return c;
}

Residuals residuals(const DensityModel& model, const Multipliers& mu, const SimplexPoint& u) {
    check_sorted(u);
    const double g1 = eval_g(model, u.u1), g2 = eval_g(model, u.u2), g3 = eval_g(model, u.u3);
    const double p = 2.0 * g1 * g2 * g3;
    Residuals r;
    r.R1 = p - 6.0 * mu.mu0 - 2.0 * mu.mu1 * (g2 + g3) - 2.0 * mu.mu2 * g2 * g3;
    r.R2 = p - 2.0 * mu.mu1 * g1 - 2.0 * mu.mu2 * g1 * g3;
    r.R3 = p - 2.0 * mu.mu2 * g1 * g2;
    return r;
}

Indicators indicators(const DensityModel& model, const Multipliers& mu, const SimplexPoint& u) {
    check_sorted(u);
    const double g1 = eval_g(model, u.u1), g2 = eval_g(model, u.u2), g3 = eval_g(model, u.u3);
    const IndicatorBits b = indicator_bits(scaled_residuals(g2, g3, 1.0 / g1, mu));
    return Indicators{b.a1, b.a2, b.a3};
}

Discretization make_discretization(const DensityModel& model, const IntegrationConfig& integration) {
    check_config(integration);
    check_parameters(model);
    if (integration.method == IntegrationConfig::Method::Grid) return graded_axis(model, integration.n);
    NodeSet s;
    const auto pts = sorted_uniform_triples(integration.n, integration.seed);
    s.g1.reserve(pts.size());
    s.g2.reserve(pts.size());
    s.g3.reserve(pts.size());
    for (const auto& p : pts) {
        s.g1.push_back(eval_g(model, p.u1));
        s.g2.push_back(eval_g(model, p.u2));
        s.g3.push_back(eval_g(model, p.u3));
    }
    s.weight = 1.0 / (6.0 * integration.n);
    return s;
}

double target_value(int gamma, const PolicyMoments& m, TargetForm form) {
    switch (gamma) {
        case 0: return m.fwer0;
        case 1: return form == TargetForm::Constraint ? m.fwer1 : m.literal_f1;
        case 2: return form == TargetForm::Constraint ? m.fwer2 : m.literal_f2;
    }
    throw std::invalid_argument("target_F: gamma must be 0, 1 or 2");
}

double target_F(int gamma, double x, const Multipliers& fixed, const Discretization& d, TargetForm form,
                KernelBackend backend, int threads) {
    if (gamma < 0 || gamma > 2) throw std::invalid_argument("target_F: gamma must be 0, 1 or 2");
    const Multipliers mu = with_coordinate(fixed, gamma, x);
    if (!mu.valid()) throw std::invalid_argument("target_F: multipliers must be non-negative");
    return target_value(gamma, accumulate_moments(d, mu, backend, threads), form);
}

double target_F(int gamma, double x, const Multipliers& fixed, const DensityModel& model,
                const IntegrationConfig& integration, TargetForm form) {
    return target_F(gamma, x, fixed, make_discretization(model, integration), form, KernelBackend::Auto,
                    integration.threads);
}

CoordinateResult compute_coordinate_mu(const std::function<double(double)>& F, const SolverConfig& config) {
    const double alpha = config.alpha;
    CoordinateResult r;
    auto eval = [&](double x) {
        ++r.evaluations;
        return F(x);
    };
    r.f_at_zero = eval(0.0);
    if (r.f_at_zero == alpha) return r;
    if (r.f_at_zero < alpha) {
        r.flag = config.allow_slack ? CoordinateFlag::SlackAtZero : CoordinateFlag::InfeasibleAtZero;
        r.message = kDecreaseAlpha;
        return r;
    }
    double L = 0.0;
    double U = L + config.U_s;
    double fU = eval(U);
    while (fU > alpha && U < config.U_max) {
        U *= config.U_f;
        fU = eval(U);
    }
    if (fU > alpha) {
        r.mu_coord = U;
        r.flag = CoordinateFlag::BracketFailed;
        r.message = kIncreaseUmax;
        return r;
    }
    r.bracket_upper = U;
    for (int j = 0; j < config.max_iter_b; ++j) {
        const double half = (U - L) / 2.0;
        if (half < config.delta) break;
        const double mid = L + half;
        ++r.bisection_steps;
        if (eval(mid) > alpha)
            L = mid;
        else
            U = mid;
    }
    r.mu_coord = L + (U - L) / 2.0;
    return r;
}

CoordinateResult compute_coordinate_mu(int gamma, const Multipliers& fixed, const DensityModel& model,
                                       const SolverConfig& config) {
    check_config(config);
    const Discretization d = make_discretization(model, config.integration);
    return compute_coordinate_mu(
        [&](double x) {
            return target_F(gamma, x, fixed, d, config.target_form, config.backend, config.integration.threads);
        },
        config);
}

SolveResult solve_optimal_mu(const DensityModel& model, const SolverConfig& config) {
    check_config(config);
    check_parameters(model);
    const Discretization d = make_discretization(model, config.integration);
    const int threads = config.integration.threads;

    SolveResult res;
    Multipliers mu;
    bool stopped = false;
    for (int t = 1; t <= config.T_max && !stopped; ++t) {
        const Multipliers prev = mu;
        for (int gamma = 0; gamma < 3; ++gamma) {
            CoordinateResult cr = compute_coordinate_mu(
                [&](double x) { return target_F(gamma, x, mu, d, config.target_form, config.backend, threads); },
                config);
            res.coordinate_log.push_back(CoordinateLogEntry{t, gamma, cr});
            if (cr.flag == CoordinateFlag::InfeasibleAtZero || cr.flag == CoordinateFlag::BracketFailed) {
                res.status = cr.flag == CoordinateFlag::InfeasibleAtZero ? SolveStatus::InfeasibleAtZero
                                                                          : SolveStatus::BracketFailed;
                res.status_coordinate = gamma;
                res.message = cr.message;
                res.outer_iterations = t;
                stopped = true;
                break;
            }
            mu[gamma] = cr.mu_coord;
        }
        if (stopped) break;
        const double step = std::sqrt((mu.mu0 - prev.mu0) * (mu.mu0 - prev.mu0) +
                                      (mu.mu1 - prev.mu1) * (mu.mu1 - prev.mu1) +
                                      (mu.mu2 - prev.mu2) * (mu.mu2 - prev.mu2));
        res.trace.push_back(TraceEntry{mu, step});
        res.outer_iterations = t;
        if (step <= config.epsilon) {
            res.status = SolveStatus::Converged;
            stopped = true;
        }
    }
    if (!stopped) res.status = SolveStatus::MaxIterations;
    res.mu = mu;

    const IntegrationConfig fine = refined(config.integration);
    res.kkt_n = fine.n;
    res.diagnostics = accumulate_moments(make_discretization(model, fine), mu, config.backend, threads);
    for (int g = 0; g < 3; ++g) res.kkt_residuals[g] = target_value(g, res.diagnostics, config.target_form) - config.alpha;
    return res;
}

double lagrangian(const PolicyMoments& m, const Multipliers& mu, double alpha) {
    return alpha * (mu.mu0 + mu.mu1 + mu.mu2) + m.pi3 - mu.mu0 * m.fwer0 - mu.mu1 * m.fwer1 - mu.mu2 * m.fwer2;
}

double lagrangian(const DensityModel& model, const Multipliers& mu, double alpha, const IntegrationConfig& integration) {
    if (!mu.valid()) throw std::invalid_argument("lagrangian: multipliers must be non-negative");
    const Discretization d = make_discretization(model, integration);
    return lagrangian(accumulate_moments(d, mu, KernelBackend::Auto, integration.threads), mu, alpha);
}

std::array<double, 3> check_kkt(const DensityModel& model, const Multipliers& mu, double alpha,
                                const IntegrationConfig& integration, TargetForm form) {
    if (!mu.valid()) throw std::invalid_argument("check_kkt: multipliers must be non-negative");
    const Discretization d = make_discretization(model, integration);
    const PolicyMoments m = accumulate_moments(d, mu, KernelBackend::Auto, integration.threads);
    return {target_value(0, m, form) - alpha, target_value(1, m, form) - alpha, target_value(2, m, form) - alpha};
}

}  // namespace optmht
