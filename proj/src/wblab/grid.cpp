#include "wblab/grid.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <stdexcept>

#include "wblab/errors.hpp"

namespace wblab {

WeightedGrid::WeightedGrid(int n, const Params& params) {
    if (n < 4) throw std::invalid_argument("WeightedGrid: n >= 4 required");
    n_ = n;
    beta_ = params.beta();
    rule_ = make_gauss_rule(n, beta_);
    bary_ = barycentric_weights(rule_.nodes);
    D_ = differentiation_matrix(rule_.nodes, bary_);
    D2_ = D_ * D_;
    P_ = orthonormal_poly_values(beta_, n, rule_.nodes);

    int n_aux = n + 40;
    aux_ = make_gauss_rule(n_aux, beta_ - 1.0);
    R_aux_ = interpolation_matrix(rule_.nodes, bary_, aux_.nodes);
    P_aux_ = orthonormal_poly_values(beta_, n, aux_.nodes);

    ext_ = make_gauss_rule(n + 40, beta_);
    P_ext_ = orthonormal_poly_values(beta_, n, ext_.nodes);
}

WeightedGrid make_grid(int n, const Params& params) { return WeightedGrid(n, params); }

double WeightedGrid::integrate_singular(const Field& f) const {
    Eigen::VectorXd fa = R_aux_ * f;
    return aux_.weights.dot(fa);
}

Field WeightedGrid::apply_L(const Field& f, const Params& params) const {
    Field fp = D_ * f;
    Field fpp = D2_ * f;
    const auto& y = rule_.nodes;
    Field out(n_);
    double m = params.m();
    for (int j = 0; j < n_; ++j)
        out[j] = (1.0 - y[j] * y[j]) * fpp[j] - 2.0 * m * y[j] * fp[j];
    return out;
}

Field WeightedGrid::apply_L_divergence(const Field& f, const Params& params) const {
    // (1/rho) d/dy( rho (1-y^2) f' ) with rho (1-y^2) = (1-y^2)^(beta+1);
    // the outer derivative acts on the interpolant of the bracketed product.
    const auto& y = rule_.nodes;
    double b1 = params.beta() + 1.0;
    Field fp = D_ * f;
    Field g(n_);
    for (int j = 0; j < n_; ++j) g[j] = std::pow(1.0 - y[j] * y[j], b1) * fp[j];
    Field dg = D_ * g;
    Field out(n_);
    for (int j = 0; j < n_; ++j) out[j] = dg[j] / std::pow(1.0 - y[j] * y[j], params.beta());
    return out;
}

Eigen::VectorXd WeightedGrid::to_coeffs(const Field& f) const {
    return P_.transpose() * rule_.weights.cwiseProduct(f).matrix();
}

Field WeightedGrid::from_coeffs(const Eigen::VectorXd& c) const { return P_ * c; }

static void require_finite(const Field& f, const char* who) {
    if (!f.allFinite()) throw numeric_error(std::string(who) + ": non-finite field values");
}

double norm_L2rho(const Field& f, const WeightedGrid& grid) {
    require_finite(f, "norm_L2rho");
    return std::sqrt(grid.rho_weights().dot(f.cwiseProduct(f)));
}

double norm_H0(const Field& f, const WeightedGrid& grid) {
    require_finite(f, "norm_H0");
    Field fp = grid.derivative(f);
    const auto& y = grid.nodes();
    double acc = 0.0;
    for (int j = 0; j < grid.size(); ++j) {
        double onemy2 = 1.0 - y[j] * y[j];
        acc += grid.rho_weights()[j] * (fp[j] * fp[j] * onemy2 + f[j] * f[j]);
    }
    return std::sqrt(acc);
}

double norm_H(const StateField& q, const WeightedGrid& grid) {
    require_finite(q.w1, "norm_H");
    require_finite(q.w2, "norm_H");
    Field fp = grid.derivative(q.w1);
    const auto& y = grid.nodes();
    double acc = 0.0;
    for (int j = 0; j < grid.size(); ++j) {
        double onemy2 = 1.0 - y[j] * y[j];
        acc += grid.rho_weights()[j] *
               (q.w2[j] * q.w2[j] + fp[j] * fp[j] * onemy2 + q.w1[j] * q.w1[j]);
    }
    return std::sqrt(acc);
}

double norm_Lp1rho(const Field& f, const WeightedGrid& grid, const Params& params) {
    require_finite(f, "norm_Lp1rho");
    double acc = 0.0;
    for (int j = 0; j < grid.size(); ++j)
        acc += grid.rho_weights()[j] * std::pow(std::abs(f[j]), params.p + 1.0);
    return std::pow(acc, 1.0 / (params.p + 1.0));
}

IntegralTable integral_table(double alpha, double beta, double d) {
    if (!(alpha > -1.0)) throw std::invalid_argument("integral_table: alpha > -1 required");
    if (!(std::abs(d) < 1.0)) throw std::invalid_argument("integral_table: |d| < 1 required");

    boost::math::quadrature::tanh_sinh<double> integrator(12);
    auto integrand = [&](double y) {
        return std::pow(1.0 - y * y, alpha) * std::pow(1.0 + d * y, -beta);
    };
    double err = 0.0, l1 = 0.0;
    double value = integrator.integrate(integrand, -1.0, 1.0, 1e-12, &err, &l1);
    if (!std::isfinite(value) || (l1 > 0 && err > 1e-6 * l1))
        throw numeric_error("integral_table: quadrature did not converge");

    IntegralTable out;
    out.value = value;
    double sgn = alpha + 1.0 - beta;
    if (std::abs(sgn) < 1e-12) {
        out.regime = 2;
        out.scaled = value;
    } else if (sgn > 0.0) {
        out.regime = 1;
        out.scaled = value;
    } else {
        out.regime = 3;
        out.scaled = value * std::pow(1.0 - d * d, beta - alpha - 1.0);
    }
    return out;
}

LorentzResult lorentz_transform(const StateField& q, double d, const WeightedGrid& grid,
                                const Params& params) {
    if (!(std::abs(d) < 1.0)) throw std::invalid_argument("lorentz_transform: |d| < 1 required");
    const auto& Y = grid.nodes();
    const int n = grid.size();
    double e = 1.0 / (params.p - 1.0);
    double pref0 = std::pow(1.0 - d * d, e);
    double half_log = 0.5 * std::log(1.0 - d * d);

    Eigen::VectorXd ys(n);
    for (int j = 0; j < n; ++j) ys[j] = (Y[j] + d) / (1.0 + d * Y[j]);
    Eigen::MatrixXd R = grid.resample_matrix(ys);

    LorentzResult out;
    out.field.w1 = R * q.w1;
    out.field.w2 = R * q.w2;
    out.s_offsets.resize(n);
    for (int j = 0; j < n; ++j) {
        double pref = pref0 * std::pow(1.0 + d * Y[j], -2.0 * e);
        out.field.w1[j] *= pref;
        out.field.w2[j] *= pref;
        out.s_offsets[j] = -(std::log(1.0 + d * Y[j]) - half_log);
    }
    return out;
}

SimilarityPoint similarity_map(double x0, double T0, double x, double t) {
    if (!(t < T0)) throw std::invalid_argument("similarity_map: t < T0 required");
    SimilarityPoint sp;
    sp.y = (x - x0) / (T0 - t);
    sp.s = -std::log(T0 - t);
    return sp;
}

void similarity_inverse(double x0, double T0, double y, double s, double* x, double* t) {
    double dt = std::exp(-s);
    *t = T0 - dt;
    *x = x0 + y * dt;
}

double scale_u_to_w(double u, double T0, double t, const Params& params) {
    if (!(t < T0)) throw std::invalid_argument("scale_u_to_w: t < T0 required");
    return std::pow(T0 - t, 2.0 / (params.p - 1.0)) * u;
}

HardySobolevReport hardy_sobolev_audit(const Field& f, const WeightedGrid& grid,
                                       const Params& params) {
    HardySobolevReport rep;
    rep.h0_norm = norm_H0(f, grid);
    if (rep.h0_norm == 0.0)
        throw numeric_error("hardy_sobolev_audit: zero H0 norm, ratios undefined");

    double l2sing = std::sqrt(grid.integrate_singular(f.cwiseProduct(f)));
    double lp1 = norm_Lp1rho(f, grid, params);
    double e = 1.0 / (params.p - 1.0);
    double linf = 0.0;
    for (int j = 0; j < grid.size(); ++j) {
        double y = grid.nodes()[j];
        linf = std::max(linf, std::abs(f[j]) * std::pow(1.0 - y * y, e));
    }
    rep.ratio_L2_singular = l2sing / rep.h0_norm;
    rep.ratio_Lp1 = lp1 / rep.h0_norm;
    rep.ratio_Linf_decay = linf / rep.h0_norm;
    return rep;
}

} // namespace wblab
