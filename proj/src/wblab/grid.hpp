#pragma once

#include <Eigen/Dense>

#include "wblab/field.hpp"
#include "wblab/params.hpp"
#include "wblab/quadrature.hpp"

namespace wblab {

// Collocation geometry for the measure rho(y) dy = (1-y^2)^beta dy on (-1,1):
// Gauss nodes and weights of the rho-weighted rule, barycentric interpolation
// and differentiation on those nodes, plus an auxiliary rule of weight
// (1-y^2)^(beta-1) for integrands carrying a 1/(1-y^2) factor.
//
// Immutable after construction; all member queries are const and pure.
class WeightedGrid {
public:
    WeightedGrid(int n, const Params& params);

    int size() const { return n_; }
    double beta() const { return beta_; }
    const Eigen::VectorXd& nodes() const { return rule_.nodes; }
    const Eigen::VectorXd& rho_weights() const { return rule_.weights; }
    const Eigen::MatrixXd& diff() const { return D_; }
    const Eigen::MatrixXd& diff2() const { return D2_; }
    const Eigen::VectorXd& bary() const { return bary_; }

    // integral of f rho dy from nodal values
    double integrate(const Field& f) const { return rule_.weights.dot(f); }

    // integral of f rho/(1-y^2) dy, exact for polynomial f of degree <= 2*aux-1
    double integrate_singular(const Field& f) const;

    // nodal derivative of the grid interpolant
    Field derivative(const Field& f) const { return D_ * f; }

    // expanded degenerate operator: (1-y^2) f'' - 2 m y f'
    Field apply_L(const Field& f, const Params& params) const;

    // divergence form (1/rho) d/dy( rho (1-y^2) f' ), kept as a cross-check path
    Field apply_L_divergence(const Field& f, const Params& params) const;

    // interpolant evaluation off the grid
    double eval(const Field& f, double x) const {
        return barycentric_eval(rule_.nodes, bary_, f, x);
    }
    Eigen::MatrixXd resample_matrix(const Eigen::VectorXd& xs) const {
        return interpolation_matrix(rule_.nodes, bary_, xs);
    }

    // transforms between nodal values and orthonormal-polynomial coefficients
    Eigen::VectorXd to_coeffs(const Field& f) const;
    Field from_coeffs(const Eigen::VectorXd& c) const;
    // p_k(y_j) value matrix on the main nodes
    const Eigen::MatrixXd& poly_values() const { return P_; }

    // auxiliary rule data (weight exponent beta-1)
    const GaussRule& aux_rule() const { return aux_; }
    const Eigen::MatrixXd& aux_resample() const { return R_aux_; }
    // p_k values at auxiliary nodes, k < size()
    const Eigen::MatrixXd& aux_poly_values() const { return P_aux_; }

    // extended rule of the main weight, for projecting analytic integrands
    const GaussRule& ext_rule() const { return ext_; }
    const Eigen::MatrixXd& ext_poly_values() const { return P_ext_; }

private:
    int n_;
    double beta_;
    GaussRule rule_;
    Eigen::VectorXd bary_;
    Eigen::MatrixXd D_, D2_;
    Eigen::MatrixXd P_;
    GaussRule aux_;
    Eigen::MatrixXd R_aux_;
    Eigen::MatrixXd P_aux_;
    GaussRule ext_;
    Eigen::MatrixXd P_ext_;
};

WeightedGrid make_grid(int n, const Params& params);

// Weighted norms. All throw numeric_error on non-finite values.
double norm_L2rho(const Field& f, const WeightedGrid& grid);
double norm_H0(const Field& f, const WeightedGrid& grid);
double norm_H(const StateField& q, const WeightedGrid& grid);
double norm_Lp1rho(const Field& f, const WeightedGrid& grid, const Params& params);

// I(d) = integral of (1-y^2)^alpha / (1+dy)^beta over (-1,1), with the regime
// classification by the sign of alpha+1-beta.
struct IntegralTable {
    double value;
    int regime;    // 1: bounded, 2: logarithmic, 3: algebraic blow-up
    double scaled; // value * (1-d^2)^(beta-alpha-1) in regime 3, value otherwise
};
IntegralTable integral_table(double alpha, double beta, double d);

// Boost of a state at a fixed slice: mapped nodes y = (Y+d)/(1+dY), common
// prefactor (1-d^2)^(1/(p-1)) (1+dY)^(-2/(p-1)) on both components, and the
// per-node time offset -log((1+dY)/sqrt(1-d^2)) that a space-time application
// would feed into the source slice.
struct LorentzResult {
    StateField field;
    Eigen::VectorXd s_offsets;
};
LorentzResult lorentz_transform(const StateField& q, double d, const WeightedGrid& grid,
                                const Params& params);

// (x,t) <-> (y,s) maps and the amplitude scaling u -> w.
struct SimilarityPoint {
    double y;
    double s;
};
SimilarityPoint similarity_map(double x0, double T0, double x, double t);
void similarity_inverse(double x0, double T0, double y, double s, double* x, double* t);
double scale_u_to_w(double u, double T0, double t, const Params& params);

// Ratios of the three embedding norms to |f|_H0.
struct HardySobolevReport {
    double h0_norm;
    double ratio_L2_singular; // |f|_{L^2 of rho/(1-y^2)} / |f|_H0
    double ratio_Lp1;         // |f|_{L^{p+1}_rho} / |f|_H0
    double ratio_Linf_decay;  // max |f| (1-y^2)^{1/(p-1)} / |f|_H0
};
HardySobolevReport hardy_sobolev_audit(const Field& f, const WeightedGrid& grid,
                                       const Params& params);

} // namespace wblab
