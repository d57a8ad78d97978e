#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "optmht/density.hpp"
#include "optmht/types.hpp"

namespace optmht {

struct IntegrationConfig {
    enum class Method { Grid, MonteCarlo };
    Method method = Method::Grid;
    int n = 64;
    std::uint64_t seed = 0;
    int threads = 1;
};

void check_config(const IntegrationConfig& config);

struct IntegralEstimate {
    double value = 0.0;
    double error_estimate = 0.0;
};

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, SimplexPoint node) : std::runtime_error(what), node_(node) {}
    const SimplexPoint& node() const { return node_; }

private:
    SimplexPoint node_;
};

// One axis of a tensor grid on [0,1]. Cell c spans [edge[c], edge[c+1]];
// null_mass is its length, alt_mass its probability under the alternative,
// gbar = alt_mass / null_mass is the cell-average density, node the point
// where generic integrands are evaluated.
struct AxisGrid {
    int n = 0;
    std::vector<double> edge;
    std::vector<double> node;
    std::vector<double> null_mass;
    std::vector<double> alt_mass;
    std::vector<double> gbar;
    std::vector<double> inv_gbar;
};

// Equal cells on [0,1]; alt masses use `model` when given, otherwise equal the null masses.
AxisGrid uniform_axis(int n, const DensityModel* model = nullptr);

// Cells equally spaced in s = (u + G(u))/2, so both the null and the
// alternative mass of every cell are at most 2/n.
AxisGrid graded_axis(const DensityModel& model, int n);

// Ordered-cell weight for index triple i <= j <= k: 1, 1/2 or 1/6 depending on ties.
inline double tie_weight(int i, int j, int k) {
    if (i == j && j == k) return 1.0 / 6.0;
    if (i == j || j == k) return 0.5;
    return 1.0;
}

using Integrand = std::function<double(double, double, double)>;

// Sorted-triple midpoint rule on the given axis.
double sum_on_grid(const Integrand& f, const AxisGrid& axis, int threads = 1);

// Grid: uniform sorted-triple midpoint rule (density-graded when `grading` is
// given); the error estimate is half the difference to the rule at n/2.
// MonteCarlo: n sorted uniform triples times the simplex volume.
IntegralEstimate integrate_on_Q(const Integrand& f, const IntegrationConfig& config,
                                const DensityModel* grading = nullptr);

// Sorted uniform triples for Monte Carlo integration.
std::vector<SimplexPoint> sorted_uniform_triples(int n, std::uint64_t seed);

}  // namespace optmht
