#include "optmht/simplex_integration.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "optmht/compensated.hpp"
#include "optmht/parallel.hpp"
#include "optmht/rng.hpp"

namespace optmht {

namespace {

// Solves (u + G(u))/2 = s for u by bisection on log u.
double graded_inverse(const DensityModel& model, double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    double lo = std::log(1e-300);
    double hi = 0.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double u = std::exp(mid);
        if (0.5 * (u + alternative_cdf(model, u)) < s)
            lo = mid;
        else
            hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

void finish_axis(AxisGrid& a, const DensityModel* model) {
    const int n = a.n;
    std::vector<double> G(static_cast<std::size_t>(n) + 1);
    for (int c = 0; c <= n; ++c) G[c] = model ? alternative_cdf(*model, a.edge[c]) : a.edge[c];
    G[0] = 0.0;
    G[n] = 1.0;
    a.null_mass.resize(n);
    a.alt_mass.resize(n);
    a.gbar.resize(n);
    a.inv_gbar.resize(n);
    for (int c = 0; c < n; ++c) {
        a.null_mass[c] = a.edge[c + 1] - a.edge[c];
        a.alt_mass[c] = G[c + 1] - G[c];
        if (!(a.null_mass[c] > 0.0) || !(a.alt_mass[c] > 0.0)) {
            std::ostringstream os;
            os << "degenerate grid cell " << c << " of " << n << " at u=" << a.edge[c];
            throw IntegrationError(os.str(), SimplexPoint{a.edge[c], a.edge[c], a.edge[c]});
        }
        a.gbar[c] = a.alt_mass[c] / a.null_mass[c];
        a.inv_gbar[c] = 1.0 / a.gbar[c];
    }
}

}  // namespace

void check_config(const IntegrationConfig& config) {
    if (config.method == IntegrationConfig::Method::Grid && config.n < 8)
        throw std::invalid_argument("integration: grid needs n >= 8 points per axis");
    if (config.method == IntegrationConfig::Method::MonteCarlo && config.n < 1000)
        throw std::invalid_argument("integration: Monte Carlo needs n >= 1000 samples");
    if (config.threads < 1) throw std::invalid_argument("integration: threads must be >= 1");
}

AxisGrid uniform_axis(int n, const DensityModel* model) {
    if (n < 1) throw std::invalid_argument("uniform_axis: n must be positive");
    AxisGrid a;
    a.n = n;
    a.edge.resize(static_cast<std::size_t>(n) + 1);
    a.node.resize(n);
    for (int c = 0; c <= n; ++c) a.edge[c] = static_cast<double>(c) / n;
    for (int c = 0; c < n; ++c) a.node[c] = (c + 0.5) / n;
    finish_axis(a, model);
    return a;
}

AxisGrid graded_axis(const DensityModel& model, int n) {
    if (n < 1) throw std::invalid_argument("graded_axis: n must be positive");
    check_parameters(model);
    AxisGrid a;
    a.n = n;
    a.edge.resize(static_cast<std::size_t>(n) + 1);
    a.node.resize(n);
    a.edge[0] = 0.0;
    a.edge[n] = 1.0;
    for (int c = 1; c < n; ++c) a.edge[c] = graded_inverse(model, static_cast<double>(c) / n);
    for (int c = 0; c < n; ++c) a.node[c] = graded_inverse(model, (c + 0.5) / n);
    finish_axis(a, &model);
    return a;
}

double sum_on_grid(const Integrand& f, const AxisGrid& axis, int threads) {
    const int n = axis.n;
    std::vector<double> partial(static_cast<std::size_t>(n), 0.0);
    parallel_for(n, threads, [&](int i) {
        CompensatedSum acc;
        const double ui = axis.node[i];
        for (int j = i; j < n; ++j) {
            const double wij = axis.null_mass[i] * axis.null_mass[j];
            for (int k = j; k < n; ++k) {
                const double v = f(ui, axis.node[j], axis.node[k]);
                if (!std::isfinite(v)) {
                    std::ostringstream os;
                    os << "non-finite integrand at (" << ui << ", " << axis.node[j] << ", " << axis.node[k] << ")";
                    throw IntegrationError(os.str(), SimplexPoint{ui, axis.node[j], axis.node[k]});
                }
                acc.add(tie_weight(i, j, k) * wij * axis.null_mass[k] * v);
            }
        }
        partial[i] = acc.value();
    });
    CompensatedSum total;
    for (double p : partial) total.add(p);
    return total.value();
}

std::vector<SimplexPoint> sorted_uniform_triples(int n, std::uint64_t seed) {
    std::vector<SimplexPoint> pts(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
        RngStream rng = RngStream::derive(seed, static_cast<std::uint64_t>(r));
        double v[3] = {rng.uniform(), rng.uniform(), rng.uniform()};
        std::sort(v, v + 3);
        pts[r] = SimplexPoint{v[0], v[1], v[2]};
    }
    return pts;
}

IntegralEstimate integrate_on_Q(const Integrand& f, const IntegrationConfig& config, const DensityModel* grading) {
    check_config(config);
    if (config.method == IntegrationConfig::Method::Grid) {
        auto make = [&](int n) { return grading ? graded_axis(*grading, n) : uniform_axis(n); };
        const double fine = sum_on_grid(f, make(config.n), config.threads);
        const double coarse = sum_on_grid(f, make(config.n / 2), config.threads);
        return IntegralEstimate{fine, 0.5 * std::fabs(fine - coarse)};
    }
    const auto pts = sorted_uniform_triples(config.n, config.seed);
    CompensatedSum s1, s2;
    for (const auto& p : pts) {
        const double v = f(p.u1, p.u2, p.u3);
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "non-finite integrand at (" << p.u1 << ", " << p.u2 << ", " << p.u3 << ")";
            throw IntegrationError(os.str(), p);
        }
        s1.add(v);
        s2.add(v * v);
    }
    const double n = static_cast<double>(config.n);
    const double mean = s1.value() / n;
    const double var = std::max(0.0, (s2.value() / n - mean * mean) * n / (n - 1.0));
    return IntegralEstimate{mean / 6.0, std::sqrt(var / n) / 6.0};
}

}  // namespace optmht
