#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "optmht/rng.hpp"

namespace optmht {

// Interior offset for densities that blow up at u = 0.
inline constexpr double kInteriorOffset = 1e-8;

struct TruncatedNormal {
    double theta = -2.0;
    double M = 6.0;
};
struct MixtureNormal {
    double theta = -2.0;
};
struct StudentT {
    double df = 4.0;
};
struct BetaModel {
    double theta = 0.2;
};
struct Uniform {};
struct Tabulated {
    std::vector<double> u;
    std::vector<double> g;
};

using DensityModel = std::variant<TruncatedNormal, MixtureNormal, StudentT, BetaModel, Uniform, Tabulated>;

class DensityParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DensityDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class UnsupportedVariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct DensityValidationReport {
    double min_value = 0.0;
    double max_value = 0.0;
    int monotone_violations = 0;
    double mass = 0.0;
    double lipschitz_lower_estimate = 0.0;
    double mass_tolerance = 0.0;
    double interior_offset = 0.0;
    int grid_size = 0;
};

// Throws DensityParameterError when the parameters are out of range.
void check_parameters(const DensityModel& model);

// True when g(0) is infinite (the grid must then stay away from 0).
bool unbounded_at_zero(const DensityModel& model);

std::string model_name(const DensityModel& model);
// Value of the model's scalar parameter (theta or df); 0 for parameterless variants.
double model_parameter(const DensityModel& model);

double eval_g(const DensityModel& model, double u);

// Alternative CDF, G(t) = integral of g over [0, t].
double alternative_cdf(const DensityModel& model, double t);

double sample_alternative(const DensityModel& model, RngStream& rng);

DensityValidationReport validate_density(const DensityModel& model, int grid_size);

// Builds a Tabulated model from knots; u strictly increasing in [0,1], g > 0.
Tabulated make_tabulated(std::vector<double> u, std::vector<double> g);

}  // namespace optmht
