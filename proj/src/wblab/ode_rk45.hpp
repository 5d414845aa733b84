#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "wblab/errors.hpp"

namespace wblab {

// Dormand-Prince 5(4) embedded pair with PI step-size control.
// State dimension fixed at compile time; the driver records every accepted
// step and stops when `stop` returns true or the end of the interval is hit.
template <int N>
struct Rk45 {
    using State = std::array<double, N>;
    using Rhs = std::function<State(double, const State&)>;
    using Stop = std::function<bool(double, const State&)>;

    struct Sample {
        double x;
        State y;
        State dy;
    };

    struct Result {
        std::vector<Sample> samples;
        bool stopped = false; // true if `stop` fired before reaching x_end
        std::size_t n_accepted = 0;
        std::size_t n_rejected = 0;
    };

    double rtol = 1e-12;
    double atol = 1e-14;
    double h_init = 1e-4;
    double h_max = std::numeric_limits<double>::infinity();
    double h_min_rel = 1e-15; // step underflow guard relative to |x|

    static State axpy(const State& y, double h, const State& k) {
        State out;
        for (int i = 0; i < N; ++i) out[i] = y[i] + h * k[i];
        return out;
    }

    Result integrate(const Rhs& rhs, double x0, double x_end, State y0,
                     const Stop& stop = nullptr) const {
        static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                                a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                                a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

        const double dir = (x_end >= x0) ? 1.0 : -1.0;
        double x = x0;
        State y = y0;
        State k1 = rhs(x, y);

        Result res;
        res.samples.push_back({x, y, k1});
        if (stop && stop(x, y)) {
            res.stopped = true;
            return res;
        }

        double h = std::min(h_init, std::abs(x_end - x0));
        double err_prev = 1.0;
        const double safety = 0.9, beta_pi = 0.08, alpha_pi = 0.7 / 5.0;

        while (dir * (x_end - x) > 0.0) {
            h = std::min(h, std::abs(x_end - x));
            if (h < h_min_rel * std::max(1.0, std::abs(x)))
                throw numeric_error("rk45: step size underflow");
            double hs = dir * h;

            State k2 = rhs(x + c2 * hs, axpy(y, hs * a21, k1));
            State y3;
            for (int i = 0; i < N; ++i) y3[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
            State k3 = rhs(x + c3 * hs, y3);
            State y4;
            for (int i = 0; i < N; ++i)
                y4[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            State k4 = rhs(x + c4 * hs, y4);
            State y5;
            for (int i = 0; i < N; ++i)
                y5[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            State k5 = rhs(x + c5 * hs, y5);
            State y6;
            for (int i = 0; i < N; ++i)
                y6[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                     a64 * k4[i] + a65 * k5[i]);
            State k6 = rhs(x + hs, y6);
            State ynew;
            for (int i = 0; i < N; ++i)
                ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                       b5 * k5[i] + b6 * k6[i]);
            State k7 = rhs(x + hs, ynew);

            double err = 0.0;
            bool finite = true;
            for (int i = 0; i < N; ++i) {
                double ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                  e6 * k6[i] + e7 * k7[i]);
                double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                finite = finite && std::isfinite(ynew[i]);
                err = std::max(err, std::abs(ei) / sc);
            }
            if (!finite) {
                h *= 0.25;
                ++res.n_rejected;
                continue;
            }

            if (err <= 1.0) {
                x += hs;
                y = ynew;
                k1 = k7; // FSAL
                res.samples.push_back({x, y, k1});
                ++res.n_accepted;
                double fac = safety * std::pow(std::max(err, 1e-10), -alpha_pi) *
                             std::pow(err_prev, beta_pi);
                err_prev = std::max(err, 1e-10);
                h = std::min(h * std::min(5.0, std::max(0.2, fac)), h_max);
                if (stop && stop(x, y)) {
                    res.stopped = true;
                    break;
                }
            } else {
                ++res.n_rejected;
                h *= std::min(1.0, std::max(0.1, safety * std::pow(err, -0.2)));
            }
        }
        return res;
    }
};

// Quintic Hermite interpolation through (x0,f0,f0',f0'') and (x1,f1,f1',f1'').
struct QuinticHermite {
    static double eval(double x, double x0, double x1, double f0, double d0, double s0,
                       double f1, double d1, double s1) {
        double h = x1 - x0;
        double t = (x - x0) / h;
        // basis in the monomial form of the scaled problem
        double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
        double H0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
        double H1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
        double H2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
        double H3 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
        double H4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
        double H5 = 0.5 * t3 - t4 + 0.5 * t5;
        return H0 * f0 + H1 * h * d0 + H2 * h * h * s0 + H3 * f1 + H4 * h * d1 +
               H5 * h * h * s1;
    }

    static double eval_derivative(double x, double x0, double x1, double f0, double d0,
                                  double s0, double f1, double d1, double s1) {
        double h = x1 - x0;
        double t = (x - x0) / h;
        double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
        double dH0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
        double dH1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
        double dH2 = t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4;
        double dH3 = 30.0 * t2 - 60.0 * t3 + 30.0 * t4;
        double dH4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
        double dH5 = 1.5 * t2 - 4.0 * t3 + 2.5 * t4;
        return (dH0 * f0 + dH3 * f1) / h + dH1 * d0 + dH4 * d1 +
               h * (dH2 * s0 + dH5 * s1);
    }
};

} // namespace wblab
