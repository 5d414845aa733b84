#include "wblab/spectral.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "wblab/errors.hpp"
#include "wblab/soliton.hpp"

namespace wblab {

Field kappa_d(double d, const WeightedGrid& grid, const Params& params) {
    if (!(std::abs(d) < 1.0)) throw std::invalid_argument("kappa_d: |d| < 1 required");
    Field out(grid.size());
    for (int j = 0; j < grid.size(); ++j) out[j] = kappa_scalar(d, grid.nodes()[j], params);
    return out;
}

Field psi_d(double d, const WeightedGrid& grid, const Params& params) {
    if (!(std::abs(d) < 1.0)) throw std::invalid_argument("psi_d: |d| < 1 required");
    Field out(grid.size());
    for (int j = 0; j < grid.size(); ++j) out[j] = psi_scalar(d, grid.nodes()[j], params);
    return out;
}

namespace {

double F1_scalar(double d, double y, const Params& pr) {
    return std::pow(1.0 - d * d, pr.p / (pr.p - 1.0)) * std::pow(1.0 + d * y, -pr.m());
}
double F0_scalar(double d, double y, const Params& pr) {
    return std::pow(1.0 - d * d, 1.0 / (pr.p - 1.0)) * (y + d) *
           std::pow(1.0 + d * y, -pr.m());
}
double W1_2_scalar(double d, double y, const Params& pr) {
    return (1.0 - y * y) * std::pow(1.0 + d * y, -pr.m());
}
double W0_2_scalar(double d, double y, const Params& pr) {
    return (y + d) * std::pow(1.0 + d * y, -pr.m());
}

// Galerkin solve of -L r + r = RHS_lambda for the adjoint first component,
// RHS_lambda = (lambda - (p+3)/(p-1)) r2 - 2 y r2' + (8/(p-1)) r2/(1-y^2),
// with r2 the closed-form adjoint second component of unit constant.
Field solve_adjoint_first(double d, int lambda, const WeightedGrid& grid,
                          const Params& pr) {
    const int n = grid.size();
    const double m = pr.m();
    const double beta = pr.beta();
    const double c_lin = static_cast<double>(lambda) - (pr.p + 3.0) / (pr.p - 1.0);

    // analytic part of the right side, projected with the extended rule
    const auto& ext = grid.ext_rule();
    Eigen::VectorXd smooth(ext.nodes.size());
    for (int i = 0; i < ext.nodes.size(); ++i) {
        double y = ext.nodes[i];
        double u = std::pow(1.0 + d * y, -m);
        double up = -m * d * std::pow(1.0 + d * y, -m - 1.0);
        double r2, r2p;
        if (lambda == 1) {
            r2 = (1.0 - y * y) * u;
            r2p = -2.0 * y * u + (1.0 - y * y) * up;
        } else {
            r2 = (y + d) * u;
            r2p = u + (y + d) * up;
        }
        smooth[i] = c_lin * r2 - 2.0 * y * r2p;
    }
    Eigen::VectorXd b = grid.ext_poly_values().transpose() *
                        ext.weights.cwiseProduct(smooth).matrix();

    // singular part 4(m-1) r2/(1-y^2), projected with the (beta-1) rule
    const auto& aux = grid.aux_rule();
    Eigen::VectorXd sing(aux.nodes.size());
    for (int i = 0; i < aux.nodes.size(); ++i) {
        double y = aux.nodes[i];
        double u = std::pow(1.0 + d * y, -m);
        sing[i] = 4.0 * (m - 1.0) * (lambda == 1 ? (1.0 - y * y) * u : (y + d) * u);
    }
    b += grid.aux_poly_values().transpose() * aux.weights.cwiseProduct(sing).matrix();

    // -L is diagonal on the orthonormal basis with eigenvalue k(k+2*beta+1)
    Eigen::VectorXd coeffs(n);
    for (int k = 0; k < n; ++k) {
        double mu = static_cast<double>(k) * (k + 2.0 * beta + 1.0) + 1.0;
        coeffs[k] = b[k] / mu;
    }
    return grid.from_coeffs(coeffs);
}

} // namespace

SpectralPack build_spectral_pack(double d, const WeightedGrid& grid,
                                 const Params& params, bool w0_only) {
    if (!(std::abs(d) < 1.0))
        throw std::invalid_argument("build_spectral_pack: |d| < 1 required");
    const int n = grid.size();
    SpectralPack pack;
    pack.d = d;
    pack.kappa = kappa_d(d, grid, params);
    pack.psi = psi_d(d, grid, params);

    pack.F1.w1.resize(n);
    pack.F1.w2.resize(n);
    pack.F0.w1.resize(n);
    pack.F0.w2 = Field::Zero(n);
    Field w1_2(n), w0_2(n);
    for (int j = 0; j < n; ++j) {
        double y = grid.nodes()[j];
        pack.F1.w1[j] = F1_scalar(d, y, params);
        pack.F1.w2[j] = pack.F1.w1[j];
        pack.F0.w1[j] = F0_scalar(d, y, params);
        w1_2[j] = W1_2_scalar(d, y, params);
        w0_2[j] = W0_2_scalar(d, y, params);
    }

    pack.W0 = StateField{solve_adjoint_first(d, 0, grid, params), w0_2};
    pack.c0 = 1.0 / inner_upsilon(pack.W0, pack.F0, grid);
    if (!std::isfinite(pack.c0))
        throw numeric_error("build_spectral_pack: degenerate lambda=0 normalization");
    pack.W0.w1 *= pack.c0;
    pack.W0.w2 *= pack.c0;

    if (!w0_only) {
        pack.W1 = StateField{solve_adjoint_first(d, 1, grid, params), w1_2};
        pack.c1 = 1.0 / inner_upsilon(pack.W1, pack.F1, grid);
        if (!std::isfinite(pack.c1))
            throw numeric_error("build_spectral_pack: degenerate lambda=1 normalization");
        pack.W1.w1 *= pack.c1;
        pack.W1.w2 *= pack.c1;
    }
    return pack;
}

StateField apply_Ld(const StateField& q, const SpectralPack& pack,
                    const WeightedGrid& grid, const Params& params) {
    const int n = grid.size();
    StateField out;
    out.w1 = q.w2;
    Field Lq1 = grid.apply_L(q.w1, params);
    Field dq2 = grid.derivative(q.w2);
    out.w2.resize(n);
    double c = (params.p + 3.0) / (params.p - 1.0);
    for (int j = 0; j < n; ++j) {
        double y = grid.nodes()[j];
        out.w2[j] = Lq1[j] + pack.psi[j] * q.w1[j] - c * q.w2[j] - 2.0 * y * dq2[j];
    }
    return out;
}

StateField apply_Ld(const StateField& q, double d, const WeightedGrid& grid,
                    const Params& params) {
    SpectralPack pack;
    pack.psi = psi_d(d, grid, params);
    return apply_Ld(q, pack, grid, params);
}

double inner_upsilon(const StateField& q, const StateField& r, const WeightedGrid& grid) {
    Field qp = grid.derivative(q.w1);
    Field rp = grid.derivative(r.w1);
    double acc = 0.0;
    for (int j = 0; j < grid.size(); ++j) {
        double y = grid.nodes()[j];
        acc += grid.rho_weights()[j] *
               (qp[j] * rp[j] * (1.0 - y * y) + q.w1[j] * r.w1[j] + q.w2[j] * r.w2[j]);
    }
    return acc;
}

double inner_upsilon_operator_form(const StateField& q, const StateField& r,
                                   const WeightedGrid& grid, const Params& params) {
    Field Lr1 = grid.apply_L(r.w1, params);
    double acc = 0.0;
    for (int j = 0; j < grid.size(); ++j)
        acc += grid.rho_weights()[j] *
               (q.w1[j] * (-Lr1[j] + r.w1[j]) + q.w2[j] * r.w2[j]);
    return acc;
}

double bilinear_phi(const StateField& q, const StateField& r, const SpectralPack& pack,
                    const WeightedGrid& grid) {
    Field qp = grid.derivative(q.w1);
    Field rp = grid.derivative(r.w1);
    double acc = 0.0;
    for (int j = 0; j < grid.size(); ++j) {
        double y = grid.nodes()[j];
        acc += grid.rho_weights()[j] *
               (-pack.psi[j] * q.w1[j] * r.w1[j] + qp[j] * rp[j] * (1.0 - y * y) +
                q.w2[j] * r.w2[j]);
    }
    return acc;
}

double bilinear_phi_operator_form(const StateField& q, const StateField& r,
                                  const SpectralPack& pack, const WeightedGrid& grid,
                                  const Params& params) {
    Field Lr1 = grid.apply_L(r.w1, params);
    double acc = 0.0;
    for (int j = 0; j < grid.size(); ++j)
        acc += grid.rho_weights()[j] *
               (-q.w1[j] * (Lr1[j] + pack.psi[j] * r.w1[j]) + q.w2[j] * r.w2[j]);
    return acc;
}

double clamped_alpha_minus(double form_value, double q_minus_norm_sq,
                           double assembly_scale) {
    // the relative slack covers quadrature round-off; the absolute floor covers
    // cancellation when the remainder itself is tiny against the input
    double threshold = -1e-8 * std::max(q_minus_norm_sq, 1e-300) -
                       1e-13 * assembly_scale;
    if (form_value < threshold)
        throw coercivity_error("alpha_minus: quadratic form negative on the remainder");
    return std::sqrt(std::max(form_value, 0.0));
}

Decomposition project(const StateField& q, const SpectralPack& pack,
                      const WeightedGrid& grid) {
    Decomposition dec;
    dec.alpha1 = inner_upsilon(pack.W1, q, grid);
    dec.alpha0 = inner_upsilon(pack.W0, q, grid);
    dec.q_minus = q - dec.alpha1 * pack.F1 - dec.alpha0 * pack.F0;
    double form = bilinear_phi(dec.q_minus, dec.q_minus, pack, grid);
    double nrm = norm_H(dec.q_minus, grid);
    double nq = norm_H(q, grid);
    dec.alpha_minus = clamped_alpha_minus(form, nrm * nrm, nq * nq);
    return dec;
}

NormEquivalenceReport norm_equivalence_audit(const SpectralPack& pack,
                                             const WeightedGrid& grid,
                                             const Params& params, int n_samples,
                                             std::uint64_t seed) {
    if (n_samples < 10)
        throw std::invalid_argument("norm_equivalence_audit: n_samples >= 10 required");
    (void)params;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const int n = grid.size();
    const int modes = std::min(n, 12);

    NormEquivalenceReport rep;
    rep.raw_low = rep.raw1_low = 1e300;
    for (int it = 0; it < n_samples; ++it) {
        Eigen::VectorXd c1 = Eigen::VectorXd::Zero(n), c2 = Eigen::VectorXd::Zero(n);
        for (int k = 0; k < modes; ++k) {
            double decay = 1.0 / (1.0 + k * k);
            c1[k] = unif(rng) * decay;
            c2[k] = unif(rng) * decay;
        }
        StateField q{grid.from_coeffs(c1), grid.from_coeffs(c2)};
        double nq = norm_H(q, grid);
        if (nq < 1e-14) {
            ++rep.skipped;
            continue;
        }
        auto dec = project(q, pack, grid);
        double nqm = norm_H(dec.q_minus, grid);
        if (dec.alpha_minus > 1e-14) {
            double r = nqm / dec.alpha_minus;
            rep.raw_low = std::min(rep.raw_low, r);
            rep.raw_high = std::max(rep.raw_high, r);
        }
        double denom = std::abs(dec.alpha1) + dec.alpha_minus;
        if (denom > 1e-14) {
            double r = nq / denom;
            rep.raw1_low = std::min(rep.raw1_low, r);
            rep.raw1_high = std::max(rep.raw1_high, r);
        }
        ++rep.used;
    }
    return rep;
}

} // namespace wblab
