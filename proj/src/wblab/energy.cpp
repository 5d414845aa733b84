#include "wblab/energy.hpp"

#include <cmath>
#include <stdexcept>

#include "wblab/errors.hpp"
#include "wblab/quadrature.hpp"

namespace wblab {

double E0(const StateField& q, const WeightedGrid& grid, const Params& params) {
    Field wp = grid.derivative(q.w1);
    double p = params.p;
    double c = (p + 1.0) / ((p - 1.0) * (p - 1.0));
    double acc = 0.0;
    for (int j = 0; j < grid.size(); ++j) {
        double y = grid.nodes()[j];
        double w = q.w1[j];
        acc += grid.rho_weights()[j] *
               (0.5 * q.w2[j] * q.w2[j] + 0.5 * wp[j] * wp[j] * (1.0 - y * y) +
                c * w * w - std::pow(std::abs(w), p + 1.0) / (p + 1.0));
    }
    return acc;
}

EnergyParts E_full(const StateField& q, double s, const WeightedGrid& grid,
                   const Params& params, const Nonlinearity& nl) {
    if (!(s > 0.0)) throw std::invalid_argument("E_full: s > 0 required");
    EnergyParts parts;
    parts.E0 = E0(q, grid, params);
    double acc_i = 0.0, acc_j = 0.0;
    for (int j = 0; j < grid.size(); ++j) {
        acc_i += grid.rho_weights()[j] * nl.G_scaled(q.w1[j], s);
        acc_j += grid.rho_weights()[j] * q.w1[j] * q.w2[j];
    }
    parts.I = -acc_i;
    parts.J = -acc_j / std::pow(s, 0.5 * (params.a + 1.0));
    parts.E = parts.E0 + parts.I + parts.J;
    return parts;
}

double lyapunov_H(const StateField& q, double s, double theta_H,
                  const WeightedGrid& grid, const Params& params,
                  const Nonlinearity& nl) {
    if (!(params.a > 1.0)) throw std::invalid_argument("lyapunov_H: a > 1 required");
    if (!(theta_H > 0.0)) throw std::invalid_argument("lyapunov_H: theta_H > 0 required");
    EnergyParts parts = E_full(q, s, grid, params, nl);
    double expo = (params.p + 3.0) / ((params.a - 1.0) * std::pow(s, 0.5 * (params.a - 1.0)));
    return std::exp(expo) * parts.E +
           theta_H * std::exp(-(params.p + 1.0) * s / (params.p - 1.0));
}

EnergyTrace energy_trace(const Trajectory& traj, const WeightedGrid& grid,
                         const Params& params, double theta_H) {
    Nonlinearity nl(params);
    EnergyTrace tr;
    for (std::size_t k = 0; k < traj.s.size(); ++k) {
        double s = traj.s[k];
        EnergyParts parts = E_full(traj.states[k], s, grid, params, nl);
        tr.s.push_back(s);
        tr.E0.push_back(parts.E0);
        tr.I.push_back(parts.I);
        tr.J.push_back(parts.J);
        tr.E.push_back(parts.E);
        double expo =
            (params.p + 3.0) / ((params.a - 1.0) * std::pow(s, 0.5 * (params.a - 1.0)));
        tr.H.push_back(std::exp(expo) * parts.E +
                       theta_H * std::exp(-(params.p + 1.0) * s / (params.p - 1.0)));
    }
    return tr;
}

MonotonicityReport monotonicity_audit(const Trajectory& traj, const WeightedGrid& grid,
                                      const Params& params,
                                      const std::vector<double>& theta_scan) {
    if (traj.s.size() < 2)
        throw std::invalid_argument("monotonicity_audit: need at least two samples");
    Nonlinearity nl(params);
    std::vector<EnergyParts> parts;
    parts.reserve(traj.s.size());
    for (std::size_t k = 0; k < traj.s.size(); ++k)
        parts.push_back(E_full(traj.states[k], traj.s[k], grid, params, nl));

    MonotonicityReport rep;
    for (double theta : theta_scan) {
        std::size_t ok = 0;
        double h_prev = 0.0;
        for (std::size_t k = 0; k < traj.s.size(); ++k) {
            double s = traj.s[k];
            double expo = (params.p + 3.0) /
                          ((params.a - 1.0) * std::pow(s, 0.5 * (params.a - 1.0)));
            double h = std::exp(expo) * parts[k].E +
                       theta * std::exp(-(params.p + 1.0) * s / (params.p - 1.0));
            if (k > 0 && h <= h_prev + 1e-9 * (1.0 + std::abs(h_prev))) ++ok;
            h_prev = h;
        }
        double frac = static_cast<double>(ok) / static_cast<double>(traj.s.size() - 1);
        rep.theta_values.push_back(theta);
        rep.noninc_fraction.push_back(frac);
        if (frac > rep.best_fraction + 1e-12) {
            rep.best_fraction = frac;
            rep.best_theta = theta;
        }
    }
    return rep;
}

BoundWindow bound_window(const Trajectory& traj, const WeightedGrid& grid) {
    if (traj.s.empty()) throw std::invalid_argument("bound_window: empty trajectory");
    // flat-weight rule of matching size on the same interval
    GaussRule flat = make_gauss_rule(grid.size(), 0.0);
    Eigen::MatrixXd R = grid.resample_matrix(flat.nodes);

    BoundWindow win;
    win.min_value = 1e300;
    for (const auto& q : traj.states) {
        Eigen::VectorXd w = R * q.w1;
        Eigen::VectorXd wp = R * grid.derivative(q.w1);
        Eigen::VectorXd v = R * q.w2;
        double h1 = 0.0, l2 = 0.0;
        for (int j = 0; j < flat.nodes.size(); ++j) {
            h1 += flat.weights[j] * (w[j] * w[j] + wp[j] * wp[j]);
            l2 += flat.weights[j] * v[j] * v[j];
        }
        double val = std::sqrt(h1) + std::sqrt(l2);
        win.min_value = std::min(win.min_value, val);
        win.max_value = std::max(win.max_value, val);
    }
    win.positive = win.min_value > 0.0;
    return win;
}

} // namespace wblab
