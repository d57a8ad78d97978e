#pragma once

#include <array>

namespace optmht {

struct Multipliers {
    double mu0 = 0.0;
    double mu1 = 0.0;
    double mu2 = 0.0;

    double operator[](int l) const { return l == 0 ? mu0 : (l == 1 ? mu1 : mu2); }
    double& operator[](int l) { return l == 0 ? mu0 : (l == 1 ? mu1 : mu2); }
    bool valid() const { return mu0 >= 0.0 && mu1 >= 0.0 && mu2 >= 0.0; }
};

// A point of the ordered simplex, u1 <= u2 <= u3.
struct SimplexPoint {
    double u1 = 0.0;
    double u2 = 0.0;
    double u3 = 0.0;
};

}  // namespace optmht
