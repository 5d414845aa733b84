#pragma once

#include <Eigen/Dense>

namespace wblab {

// n-point Gauss rule for the symmetric Jacobi weight (1-y^2)^lambda on (-1,1).
struct GaussRule {
    Eigen::VectorXd nodes;   // strictly increasing, interior
    Eigen::VectorXd weights; // positive
    double lambda;
};

// Golub-Welsch on the Gegenbauer recurrence. Requires lambda > -1, n >= 1.
GaussRule make_gauss_rule(int n, double lambda);

// First moment of the weight: integral of (1-y^2)^lambda over (-1,1).
double weight_mass(double lambda);

// Barycentric interpolation weights for an arbitrary node set.
Eigen::VectorXd barycentric_weights(const Eigen::VectorXd& nodes);

// Barycentric differentiation matrix (negative-sum diagonal).
Eigen::MatrixXd differentiation_matrix(const Eigen::VectorXd& nodes,
                                       const Eigen::VectorXd& bary);

// Evaluate the interpolant of nodal values f at a single point x.
double barycentric_eval(const Eigen::VectorXd& nodes, const Eigen::VectorXd& bary,
                        const Eigen::VectorXd& f, double x);

// Row-interpolation matrix mapping nodal values onto the points xs.
Eigen::MatrixXd interpolation_matrix(const Eigen::VectorXd& nodes,
                                     const Eigen::VectorXd& bary,
                                     const Eigen::VectorXd& xs);

// Values of the first ncols orthonormal polynomials of weight (1-y^2)^lambda
// at the given points: P(i,k) = p_k(x_i).
Eigen::MatrixXd orthonormal_poly_values(double lambda, int ncols,
                                        const Eigen::VectorXd& xs);

} // namespace wblab
