#pragma once

// Reference computations written without the library's residual, kernel or
// procedure code, so tests compare two independent routes to the same number.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "optmht/density.hpp"
#include "optmht/simplex_integration.hpp"
#include "optmht/types.hpp"

namespace oracle {

// Pointwise Lagrangian of rejecting the c smallest of a sorted triple with
// alternative density values g1, g2, g3, written from the primal error terms.
inline std::array<double, 4> pointwise_values(double g1, double g2, double g3, const optmht::Multipliers& mu) {
    std::array<double, 4> v{};
    const double prod = g1 * g2 * g3;
    for (int c = 1; c <= 3; ++c) {
        const double d1 = 1.0, d2 = c >= 2 ? 1.0 : 0.0, d3 = c >= 3 ? 1.0 : 0.0;
        const double power = 2.0 * prod * (d1 + d2 + d3);
        const double e0 = 6.0 * d1;
        const double e1 = 2.0 * (g1 * d2 + (g2 + g3) * d1);
        const double e2 = 2.0 * (g2 * g3 * d1 + g1 * g3 * d2 + g1 * g2 * d3);
        v[c] = power - mu.mu0 * e0 - mu.mu1 * e1 - mu.mu2 * e2;
    }
    return v;
}

inline int best_count(const std::array<double, 4>& v) {
    int c = 0;
    for (int k = 1; k <= 3; ++k)
        if (v[k] > v[c]) c = k;
    return c;
}

struct Functionals {
    double fwer0 = 0, fwer1 = 0, fwer2 = 0, pi3 = 0, pi_any = 0;
};

// Triple loop over ordered cells of an axis; each cell decides with its
// cell-average densities and contributes its exact null/alternative masses.
inline Functionals brute_force_functionals(const optmht::AxisGrid& a, const optmht::Multipliers& mu) {
    Functionals f;
    const int n = a.n;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int k = j; k < n; ++k) {
                const double tw = optmht::tie_weight(i, j, k);
                const int c = best_count(pointwise_values(a.gbar[i], a.gbar[j], a.gbar[k], mu));
                if (c == 0) continue;
                const double n1 = a.null_mass[i], n2 = a.null_mass[j], n3 = a.null_mass[k];
                const double w1 = a.alt_mass[i], w2 = a.alt_mass[j], w3 = a.alt_mass[k];
                const double d2 = c >= 2, d3 = c >= 3;
                f.fwer0 += tw * 6.0 * n1 * n2 * n3;
                f.fwer1 += tw * 2.0 * (w1 * n2 * n3 * d2 + n1 * w2 * n3 + n1 * n2 * w3);
                f.fwer2 += tw * 2.0 * (n1 * w2 * w3 + w1 * n2 * w3 * d2 + w1 * w2 * n3 * d3);
                f.pi3 += tw * 2.0 * w1 * w2 * w3 * (1.0 + d2 + d3);
                f.pi_any += tw * 6.0 * w1 * w2 * w3;
            }
    return f;
}

// Lagrangian alpha*sum(mu) + max over policies of (power - sum mu_l FWER_l)
// on the cells of `a`, evaluated for a whole line of mu0 values at once.
// For fixed (mu1, mu2) every cell's best value is 6*m*max(0, t - mu0) with t
// independent of mu0, so bucketing t against the mu0 line gives all values
// from one pass over the cells.
class LagrangianGrid {
public:
    explicit LagrangianGrid(const optmht::AxisGrid& a) {
        const int n = a.n;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                for (int k = j; k < n; ++k) {
                    cells_.push_back(Cell{a.gbar[i], a.gbar[j], a.gbar[k],
                                          optmht::tie_weight(i, j, k) * a.null_mass[i] * a.null_mass[j] * a.null_mass[k]});
                }
    }

    // Values at mu0 = mu0_lo + h*q, q = 0..count-1.
    std::vector<double> line(double mu1, double mu2, double mu0_lo, double h, int count, double alpha) const {
        std::vector<double> W(count + 1, 0.0), WT(count + 1, 0.0);
        const optmht::Multipliers no_mu0{0.0, mu1, mu2};
        for (const Cell& c : cells_) {
            const auto v = pointwise_values(c.g1, c.g2, c.g3, no_mu0);
            const double best = std::max({v[1], v[2], v[3]});
            const double t = best / 6.0;  // break-even mu0 of the cell
            if (t <= mu0_lo) continue;
            const double qf = std::floor((t - mu0_lo) / h);
            const int b = qf >= count ? count : static_cast<int>(qf);
            W[b] += c.m;
            WT[b] += c.m * t;
        }
        std::vector<double> out(count);
        double sw = W[count], swt = WT[count];
        for (int q = count - 1; q >= 0; --q) {
            // cells in bucket q have t in [mu0_q, mu0_q + h) and contribute when t > mu0_q
            sw += W[q];
            swt += WT[q];
            const double mu0 = mu0_lo + h * q;
            out[q] = alpha * (mu0 + mu1 + mu2) + 6.0 * (swt - mu0 * sw);
        }
        return out;
    }

    double value(const optmht::Multipliers& mu, double alpha) const {
        double s = 0.0;
        for (const Cell& c : cells_) {
            const auto v = pointwise_values(c.g1, c.g2, c.g3, mu);
            s += c.m * std::max({0.0, v[1], v[2], v[3]});
        }
        return alpha * (mu.mu0 + mu.mu1 + mu.mu2) + s;
    }

private:
    struct Cell {
        double g1, g2, g3, m;
    };
    std::vector<Cell> cells_;
};

// Monte Carlo of the error rates and powers of the pointwise-optimal policy,
// sampling p-values directly. Alternative draws use inverse CDF for
// Beta(theta, 1); Uniform draws are plain uniforms.
struct McResult {
    std::array<double, 3> fwer{};
    double pi3 = 0, pi_any = 0;
};

inline double beta_draw(double theta, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double v;
    do v = U(rng);
    while (v <= 0.0);
    return std::pow(v, 1.0 / theta);
}

inline McResult mc_policy_beta(double theta, const optmht::Multipliers& mu, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto g = [theta](double u) { return theta * std::pow(u, theta - 1.0); };
    McResult r;
    for (int l = 0; l <= 3; ++l) {
        double errs = 0, pw = 0, any = 0;
        for (int rep = 0; rep < n; ++rep) {
            std::array<std::pair<double, bool>, 3> p;  // (p-value, is alternative)
            for (int k = 0; k < 3; ++k) {
                const bool alt = k < l;
                p[k] = {alt ? beta_draw(theta, rng) : U(rng), alt};
            }
            std::sort(p.begin(), p.end());
            const int c = best_count(pointwise_values(g(p[0].first), g(p[1].first), g(p[2].first), mu));
            bool false_rej = false;
            int true_rej = 0;
            for (int k = 0; k < c; ++k) {
                if (p[k].second)
                    ++true_rej;
                else
                    false_rej = true;
            }
            errs += false_rej;
            if (l == 3) {
                pw += true_rej / 3.0;
                any += c > 0;
            }
        }
        if (l < 3)
            r.fwer[l] = errs / n;
        else {
            r.pi3 = pw / n;
            r.pi_any = any / n;
        }
    }
    return r;
}

// Hommel by brute-force closed testing: H_i is rejected when the Simes test
// rejects every intersection containing i.
inline std::array<bool, 3> hommel_closed_testing(const std::array<double, 3>& p, double alpha) {
    auto simes = [&](unsigned mask) {
        std::vector<double> q;
        for (int k = 0; k < 3; ++k)
            if (mask & (1u << k)) q.push_back(p[k]);
        std::sort(q.begin(), q.end());
        const double m = static_cast<double>(q.size());
        bool any = false;
        for (std::size_t j = 0; j < q.size(); ++j) any = any || q[j] <= static_cast<double>(j + 1) * alpha / m;
        return any;
    };
    std::array<bool, 3> rej{true, true, true};
    for (unsigned mask = 1; mask < 8; ++mask) {
        if (simes(mask)) continue;
        for (int k = 0; k < 3; ++k)
            if (mask & (1u << k)) rej[k] = false;
    }
    return rej;
}

}  // namespace oracle
