#pragma once

#include <cmath>
#include <stdexcept>

namespace wblab {

// Problem parameters (p, a) with the derived soliton amplitude kappa0.
// kappa0^(p-1) = 2(p+1)/(p-1)^2.
struct Params {
    double p;
    double a;
    double kappa0;

    Params(double p_, double a_) : p(p_), a(a_) {
        if (!(p > 1.0)) throw std::invalid_argument("Params: requires p > 1");
        if (!(a > 1.0)) throw std::invalid_argument("Params: requires a > 1");
        kappa0 = std::pow(2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0)), 1.0 / (p - 1.0));
    }

    // Exponent of the weight rho(y) = (1-y^2)^beta.
    double beta() const { return 2.0 / (p - 1.0); }
    // (p+1)/(p-1), the coefficient in the expanded degenerate operator.
    double m() const { return (p + 1.0) / (p - 1.0); }
};

} // namespace wblab
