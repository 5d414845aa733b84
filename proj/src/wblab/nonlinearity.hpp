#pragma once

#include <vector>

#include "wblab/params.hpp"

namespace wblab {

// The perturbation f(v) = |v|^{p-1} v / log^a(2+v^2), its derivative, its
// antiderivative F, and the exponentially rescaled combinations that appear in
// the similarity-variable equation. The rescaled forms are evaluated through
// L(x,s) = log(2 + e^{4s/(p-1)} x^2), computed in shifted form so that no
// intermediate exponential overflows for any s.
//
// F is tabulated eagerly on a geometric grid at construction: cached cumulative
// values at the cell boundaries, closed by a fixed Gauss panel on the residual
// subinterval of the query. Immutable after construction.
class Nonlinearity {
public:
    explicit Nonlinearity(const Params& params);

    const Params& params() const { return params_; }

    double f(double v) const;
    double fprime(double v) const;

    // F(u) = integral of f from 0 to u (even in u)
    double F(double u) const;

    // log(2 + e^{4s/(p-1)} x^2), overflow-safe
    double L(double x, double s) const;

    // e^{-2ps/(p-1)} f(e^{2s/(p-1)} w)  ==  |w|^{p-1} w / L(w,s)^a
    double fterm_scaled(double w, double s) const;

    // e^{-2s} f'(e^{2s/(p-1)} w)
    double fprime_scaled(double w, double s) const;

    // e^{-2(p+1)s/(p-1)} F(e^{2s/(p-1)} phi)  ==  integral of x^p/L(x,s)^a, 0..phi
    double G_scaled(double phi, double s) const;

    // quadratic remainder of the rescaled f around wbar
    double fhat(double wbar, double q1, double s) const;

    // cubic remainder of the rescaled F around wbar: integral of fhat in q1
    double Fhat(double wbar, double q1, double s) const;

    // |wbar+q|^{p-1}(wbar+q) - wbar^p - p wbar^{p-1} q
    double h_remainder(double wbar, double q1) const;

    // |wbar+q|^{p+1}/(p+1) - wbar^{p+1}/(p+1) - wbar^p q - (p/2) wbar^{p-1} q^2
    double H_remainder(double wbar, double q1) const;

    // sign(x) |x|^r
    static double odd_pow(double x, double r);

private:
    Params params_;
    std::vector<double> cache_u_; // geometric abscissae
    std::vector<double> cache_F_; // cumulative F at the abscissae
    double direct_F(double lo, double hi) const;
};

// One-off evaluation of the antiderivative (the cached table lives in
// Nonlinearity for repeated use).
double antiderivative_F(double u, const Params& params);

} // namespace wblab
