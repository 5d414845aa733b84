#include "wblab/nonlinearity.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

#include "wblab/errors.hpp"

namespace wblab {

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

double Nonlinearity::odd_pow(double x, double r) {
    if (x == 0.0) return 0.0;
    return x > 0.0 ? std::pow(x, r) : -std::pow(-x, r);
}

Nonlinearity::Nonlinearity(const Params& params) : params_(params) {
    // Geometric table from u0 to u_max; F below u0 is integrated directly.
    const double u0 = 1e-6, u_max = 1e10, ratio = 1.25;
    double u = u0;
    cache_u_.push_back(u);
    cache_F_.push_back(direct_F(0.0, u));
    while (u < u_max) {
        double next = u * ratio;
        cache_F_.push_back(cache_F_.back() + direct_F(u, next));
        cache_u_.push_back(next);
        u = next;
    }
}

double Nonlinearity::f(double v) const {
    if (v == 0.0) return 0.0;
    double lg = std::log(2.0 + v * v);
    return odd_pow(v, params_.p) / std::pow(lg, params_.a);
}

double Nonlinearity::fprime(double v) const {
    if (v == 0.0) return 0.0;
    double p = params_.p, a = params_.a;
    double lg = std::log(2.0 + v * v);
    double ap = std::pow(std::abs(v), p - 1.0);
    return ap * (p / std::pow(lg, a) -
                 2.0 * a * v * v / ((2.0 + v * v) * std::pow(lg, a + 1.0)));
}

double Nonlinearity::direct_F(double lo, double hi) const {
    return gauss<double, 31>::integrate([this](double v) { return f(v); }, lo, hi);
}

double Nonlinearity::F(double u) const {
    double x = std::abs(u); // F is even
    if (x == 0.0) return 0.0;
    if (x <= cache_u_.front()) return direct_F(0.0, x);
    if (x > cache_u_.back()) {
        double err = 0.0;
        double tail = gauss_kronrod<double, 31>::integrate(
            [this](double v) { return f(v); }, cache_u_.back(), x, 12, 1e-12, &err);
        return cache_F_.back() + tail;
    }
    auto it = std::upper_bound(cache_u_.begin(), cache_u_.end(), x);
    std::size_t k = static_cast<std::size_t>(it - cache_u_.begin()) - 1;
    return cache_F_[k] + direct_F(cache_u_[k], x);
}

double Nonlinearity::L(double x, double s) const {
    double e = 4.0 * s / (params_.p - 1.0);
    // z = log(e^e x^2); the two branches cover e^e x^2 >> 2 and the rest
    double z = e + 2.0 * std::log(std::abs(x));
    if (z > 40.0) return z + std::log1p(2.0 * std::exp(-z));
    return std::log(2.0 + std::exp(z));
}

double Nonlinearity::fterm_scaled(double w, double s) const {
    if (w == 0.0) return 0.0;
    return odd_pow(w, params_.p) / std::pow(L(w, s), params_.a);
}

double Nonlinearity::fprime_scaled(double w, double s) const {
    if (w == 0.0) return 0.0;
    double p = params_.p, a = params_.a;
    double lg = L(w, s);
    double te = 2.0 * std::exp(-4.0 * s / (p - 1.0));
    double frac = w * w / (w * w + te);
    return std::pow(std::abs(w), p - 1.0) *
           (p / std::pow(lg, a) - 2.0 * a * frac / std::pow(lg, a + 1.0));
}

double Nonlinearity::G_scaled(double phi, double s) const {
    double x = std::abs(phi); // even in phi
    if (x == 0.0) return 0.0;
    double err = 0.0;
    double v = gauss_kronrod<double, 31>::integrate(
        [this, s](double t) {
            return std::pow(t, params_.p) / std::pow(L(t, s), params_.a);
        },
        0.0, x, 12, 1e-13, &err);
    if (!std::isfinite(v)) throw numeric_error("G_scaled: quadrature failure");
    return v;
}

double Nonlinearity::fhat(double wbar, double q1, double s) const {
    return fterm_scaled(wbar + q1, s) - fterm_scaled(wbar, s) - q1 * fprime_scaled(wbar, s);
}

double Nonlinearity::Fhat(double wbar, double q1, double s) const {
    if (q1 == 0.0) return 0.0;
    return q1 * gauss<double, 16>::integrate(
                    [&](double u) { return fhat(wbar, q1 * u, s); }, 0.0, 1.0);
}

double Nonlinearity::h_remainder(double wbar, double q1) const {
    double p = params_.p;
    return odd_pow(wbar + q1, p) - odd_pow(wbar, p) -
           p * odd_pow(wbar, p - 1.0) * q1;
}

double Nonlinearity::H_remainder(double wbar, double q1) const {
    double p = params_.p;
    return std::pow(std::abs(wbar + q1), p + 1.0) / (p + 1.0) -
           std::pow(std::abs(wbar), p + 1.0) / (p + 1.0) - odd_pow(wbar, p) * q1 -
           0.5 * p * odd_pow(wbar, p - 1.0) * q1 * q1;
}

double antiderivative_F(double u, const Params& params) {
    if (!std::isfinite(u)) throw std::invalid_argument("antiderivative_F: non-finite input");
    return Nonlinearity(params).F(u);
}

} // namespace wblab
