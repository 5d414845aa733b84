#pragma once

#include <cmath>

#include "wblab/params.hpp"

namespace wblab {

// kappa(d,y) = kappa0 (1-d^2)^{1/(p-1)} (1+dy)^{-2/(p-1)}
inline double kappa_scalar(double d, double y, const Params& pr) {
    double e = 1.0 / (pr.p - 1.0);
    return pr.kappa0 * std::pow(1.0 - d * d, e) * std::pow(1.0 + d * y, -2.0 * e);
}

// d-derivative of kappa: -(2 kappa / (p-1)) (y+d) / ((1-d^2)(1+dy))
inline double dkappa_dd_scalar(double d, double y, const Params& pr) {
    double k = kappa_scalar(d, y, pr);
    return -2.0 * k * (y + d) / ((pr.p - 1.0) * (1.0 - d * d) * (1.0 + d * y));
}

// psi(d,y) = p kappa^{p-1} - 2(p+1)/(p-1)^2
inline double psi_scalar(double d, double y, const Params& pr) {
    double k = kappa_scalar(d, y, pr);
    return pr.p * std::pow(k, pr.p - 1.0) -
           2.0 * (pr.p + 1.0) / ((pr.p - 1.0) * (pr.p - 1.0));
}

} // namespace wblab
