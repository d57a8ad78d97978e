#include "optmht/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace optmht {

namespace {

const boost::math::normal kStdNormal(0.0, 1.0);

double Phi(double x) { return boost::math::cdf(kStdNormal, x); }
double Phi_upper(double x) { return boost::math::cdf(boost::math::complement(kStdNormal, x)); }
double Phi_inv(double p) { return boost::math::quantile(kStdNormal, p); }
double Phi_inv_upper(double q) { return boost::math::quantile(boost::math::complement(kStdNormal, q)); }

// Two-sided z statistic for p-value u: Phi^{-1}(1 - u/2), formed from the upper tail.
double two_sided_stat(double u) {
    if (u >= 1.0) return 0.0;
    return Phi_inv_upper(0.5 * u);
}

double two_sided_pvalue(double x) {
    double u = 2.0 * Phi_upper(std::fabs(x));
    return std::clamp(u, std::numeric_limits<double>::min(), 1.0 - 0x1.0p-53);
}

struct TnConstants {
    double lower;  // Phi(-M)
    double z0;
    double z1;
};

TnConstants tn_constants(const TruncatedNormal& m) {
    TnConstants c;
    c.lower = Phi(-m.M);
    c.z0 = Phi(m.M) - c.lower;
    c.z1 = Phi(m.M - m.theta) - Phi(-m.M - m.theta);
    return c;
}

// x = Phi^{-1}(Phi(-M) + u Z0), computed from whichever tail keeps precision.
double tn_statistic(const TnConstants& c, double u) {
    if (u <= 0.5) return Phi_inv(c.lower + u * c.z0);
    return -Phi_inv(c.lower + (1.0 - u) * c.z0);
}

double t_log_ratio(double df, double x) {
    const double ln_t = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                        0.5 * std::log(df * std::numbers::pi) -
                        0.5 * (df + 1.0) * std::log1p(x * x / df);
    const double ln_phi = -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
    return ln_t - ln_phi;
}

std::size_t tab_segment(const Tabulated& t, double u) {
    auto it = std::upper_bound(t.u.begin(), t.u.end(), u);
    return static_cast<std::size_t>(it - t.u.begin()) - 1;
}

double tab_eval(const Tabulated& t, double u) {
    if (u <= t.u.front()) return t.g.front();
    if (u >= t.u.back()) return t.g.back();
    const std::size_t k = tab_segment(t, u);
    const double w = (u - t.u[k]) / (t.u[k + 1] - t.u[k]);
    const double la = std::log(t.g[k]);
    const double lb = std::log(t.g[k + 1]);
    return std::exp(la + w * (lb - la));
}

// Integral of the log-linear piece on [a, x] with x inside segment k.
double tab_piece(const Tabulated& t, std::size_t k, double x) {
    const double a = t.u[k];
    const double slope = (std::log(t.g[k + 1]) - std::log(t.g[k])) / (t.u[k + 1] - a);
    const double d = x - a;
    if (std::fabs(slope * d) < 1e-12) return t.g[k] * d * (1.0 + 0.5 * slope * d);
    return t.g[k] * std::expm1(slope * d) / slope;
}

double tab_cdf(const Tabulated& t, double x) {
    if (x <= t.u.front()) return t.g.front() * x;
    double acc = t.g.front() * t.u.front();
    const std::size_t last = t.u.size() - 1;
    for (std::size_t k = 0; k < last; ++k) {
        if (x <= t.u[k + 1]) return acc + tab_piece(t, k, x);
        acc += tab_piece(t, k, t.u[k + 1]);
    }
    return acc + t.g.back() * (x - t.u.back());
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void check_parameters(const DensityModel& model) {
    std::visit(overloaded{
                   [](const TruncatedNormal& m) {
                       if (!finite(m.theta)) throw DensityParameterError("truncated_normal: theta must be finite");
                       if (!finite(m.M) || m.M <= 0.0) throw DensityParameterError("truncated_normal: M must be > 0");
                   },
                   [](const MixtureNormal& m) {
                       if (!finite(m.theta)) throw DensityParameterError("mixture_normal: theta must be finite");
                   },
                   [](const StudentT& m) {
                       if (!finite(m.df) || m.df <= 0.0) throw DensityParameterError("student_t: df must be > 0");
                   },
                   [](const BetaModel& m) {
                       if (!(m.theta > 0.0 && m.theta <= 1.0))
                           throw DensityParameterError("beta: theta must lie in (0,1]");
                   },
                   [](const Uniform&) {},
                   [](const Tabulated& t) {
                       if (t.u.empty() || t.u.size() != t.g.size())
                           throw DensityParameterError("tabulated: need matching, non-empty u and g columns");
                       for (std::size_t k = 0; k < t.u.size(); ++k) {
                           if (!(t.u[k] >= 0.0 && t.u[k] <= 1.0))
                               throw DensityParameterError("tabulated: knot u outside [0,1]");
                           if (!(t.g[k] > 0.0) || !finite(t.g[k]))
                               throw DensityParameterError("tabulated: values must be finite and > 0");
                           if (k > 0 && !(t.u[k] > t.u[k - 1]))
                               throw DensityParameterError("tabulated: u must be strictly increasing");
                       }
                   },
               },
               model);
}

bool unbounded_at_zero(const DensityModel& model) {
    return std::visit(overloaded{
                          [](const MixtureNormal& m) { return m.theta != 0.0; },
                          [](const StudentT&) { return true; },
                          [](const BetaModel& m) { return m.theta < 1.0; },
                          [](const auto&) { return false; },
                      },
                      model);
}

std::string model_name(const DensityModel& model) {
    return std::visit(overloaded{
                          [](const TruncatedNormal&) { return std::string("truncated_normal"); },
                          [](const MixtureNormal&) { return std::string("mixture_normal"); },
                          [](const StudentT&) { return std::string("student_t"); },
                          [](const BetaModel&) { return std::string("beta"); },
                          [](const Uniform&) { return std::string("uniform"); },
                          [](const Tabulated&) { return std::string("tabulated"); },
                      },
                      model);
}

double model_parameter(const DensityModel& model) {
    return std::visit(overloaded{
                          [](const TruncatedNormal& m) { return m.theta; },
                          [](const MixtureNormal& m) { return m.theta; },
                          [](const StudentT& m) { return m.df; },
                          [](const BetaModel& m) { return m.theta; },
                          [](const auto&) { return 0.0; },
                      },
                      model);
}

double eval_g(const DensityModel& model, double u) {
    if (!(u >= 0.0 && u <= 1.0)) {
        std::ostringstream os;
        os << "p-value " << u << " outside [0,1]";
        throw DensityDomainError(os.str());
    }
    if (!std::holds_alternative<Tabulated>(model)) check_parameters(model);
    if (u == 0.0 && unbounded_at_zero(model))
        throw DensityDomainError(model_name(model) + ": g is unbounded at u=0");
    return std::visit(overloaded{
                          [u](const TruncatedNormal& m) {
                              const TnConstants c = tn_constants(m);
                              const double x = tn_statistic(c, u);
                              return c.z0 / c.z1 * std::exp(m.theta * x - 0.5 * m.theta * m.theta);
                          },
                          [u](const MixtureNormal& m) {
                              const double x = two_sided_stat(u);
                              const double h = -0.5 * m.theta * m.theta;
                              return 0.5 * (std::exp(h + m.theta * x) + std::exp(h - m.theta * x));
                          },
                          [u](const StudentT& m) { return std::exp(t_log_ratio(m.df, two_sided_stat(u))); },
                          [u](const BetaModel& m) { return m.theta * std::pow(u, m.theta - 1.0); },
                          [](const Uniform&) { return 1.0; },
                          [u](const Tabulated& t) { return tab_eval(t, u); },
                      },
                      model);
}

double alternative_cdf(const DensityModel& model, double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) t = 1.0;
    return std::visit(overloaded{
                          [t](const TruncatedNormal& m) {
                              const TnConstants c = tn_constants(m);
                              const double x = tn_statistic(c, t);
                              if (x - m.theta > 0.0)
                                  return 1.0 - (Phi_upper(x - m.theta) - Phi_upper(m.M - m.theta)) / c.z1;
                              return (Phi(x - m.theta) - Phi(-m.M - m.theta)) / c.z1;
                          },
                          [t](const MixtureNormal& m) {
                              const double x = two_sided_stat(t);
                              return Phi_upper(x + m.theta) + Phi_upper(x - m.theta);
                          },
                          [t](const StudentT& m) {
                              const boost::math::students_t dist(m.df);
                              const double x = two_sided_stat(t);
                              return 2.0 * boost::math::cdf(boost::math::complement(dist, x));
                          },
                          [t](const BetaModel& m) { return std::pow(t, m.theta); },
                          [t](const Uniform&) { return t; },
                          [t](const Tabulated& tab) { return tab_cdf(tab, t); },
                      },
                      model);
}

double sample_alternative(const DensityModel& model, RngStream& rng) {
    return std::visit(overloaded{
                          [&rng](const TruncatedNormal& m) {
                              const TnConstants c = tn_constants(m);
                              const double v = rng.uniform();
                              // Inverse CDF of N(theta,1) restricted to [-M, M].
                              const double lo = Phi(-m.M - m.theta);
                              const double x = m.theta + Phi_inv(lo + v * c.z1);
                              double u;
                              if (x > 0.0)
                                  u = 1.0 - (Phi_upper(x) - Phi_upper(m.M)) / c.z0;
                              else
                                  u = (Phi(x) - c.lower) / c.z0;
                              return std::clamp(u, std::numeric_limits<double>::min(), 1.0 - 0x1.0p-53);
                          },
                          [&rng](const MixtureNormal& m) {
                              const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
                              const double x = sign * m.theta + Phi_inv(rng.uniform());
                              return two_sided_pvalue(x);
                          },
                          [&rng](const StudentT& m) {
                              const boost::math::students_t dist(m.df);
                              return two_sided_pvalue(boost::math::quantile(dist, rng.uniform()));
                          },
                          [&rng](const BetaModel& m) {
                              const double u = std::pow(rng.uniform(), 1.0 / m.theta);
                              return std::max(u, std::numeric_limits<double>::min());
                          },
                          [&rng](const Uniform&) { return rng.uniform(); },
                          [](const Tabulated&) -> double {
                              throw UnsupportedVariantError("sampling is not available for tabulated densities");
                          },
                      },
                      model);
}

DensityValidationReport validate_density(const DensityModel& model, int grid_size) {
    if (grid_size < 2) throw std::invalid_argument("validate_density: grid_size must be >= 2");
    check_parameters(model);

    DensityValidationReport rep;
    rep.grid_size = grid_size;
    rep.interior_offset = kInteriorOffset;

    // Log-spaced interior grid on [eps0, 1]; tabulated knots are merged in so
    // no knot-level feature falls between grid points.
    const double lo = std::log(kInteriorOffset);
    std::vector<double> pts(static_cast<std::size_t>(grid_size));
    for (int i = 0; i < grid_size; ++i) pts[i] = std::exp(lo * (1.0 - static_cast<double>(i) / (grid_size - 1)));
    pts.back() = 1.0;
    if (const auto* t = std::get_if<Tabulated>(&model)) {
        for (double k : t->u)
            if (k >= kInteriorOffset) pts.push_back(k);
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    }

    std::vector<double> g(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) g[i] = eval_g(model, pts[i]);
    rep.min_value = *std::min_element(g.begin(), g.end());
    rep.max_value = *std::max_element(g.begin(), g.end());

    // A violation is a maximal run of adjacent increases.
    bool rising = false;
    double lip = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < g.size(); ++i) {
        const bool up = g[i] > g[i - 1];
        if (up && !rising) ++rep.monotone_violations;
        rising = up;
        lip = std::min(lip, std::fabs(g[i] - g[i - 1]) / (pts[i] - pts[i - 1]));
    }
    rep.lipschitz_lower_estimate = lip;

    // Composite Simpson in log u over [eps0, 1], plus the exact mass below eps0.
    const int intervals = 10000;
    const double h = -lo / intervals;
    double acc = 0.0;
    for (int i = 0; i <= intervals; ++i) {
        const double s = lo + i * h;
        const double u = (i == intervals) ? 1.0 : std::exp(s);
        const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * eval_g(model, u) * u;
    }
    rep.mass = acc * h / 3.0 + alternative_cdf(model, kInteriorOffset);
    rep.mass_tolerance = 1e-6;
    return rep;
}

Tabulated make_tabulated(std::vector<double> u, std::vector<double> g) {
    Tabulated t{std::move(u), std::move(g)};
    check_parameters(t);
    return t;
}

}  // namespace optmht
