#include "wblab/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace wblab {

double weight_mass(double lambda) {
    // 2^(2*lambda+1) * B(lambda+1, lambda+1)
    double lg = 2.0 * std::lgamma(lambda + 1.0) - std::lgamma(2.0 * lambda + 2.0);
    return std::exp((2.0 * lambda + 1.0) * std::log(2.0) + lg);
}

// Monic recurrence coefficient b_k for the symmetric Jacobi weight,
// b_k = k (k + 2 lambda) / (4 (k + lambda)^2 - 1). The a_k vanish by symmetry.
static double recurrence_b(int k, double lambda) {
    double kk = static_cast<double>(k);
    double denom = 4.0 * (kk + lambda) * (kk + lambda) - 1.0;
    return kk * (kk + 2.0 * lambda) / denom;
}

GaussRule make_gauss_rule(int n, double lambda) {
    if (n < 1) throw std::invalid_argument("make_gauss_rule: n >= 1 required");
    if (!(lambda > -1.0)) throw std::invalid_argument("make_gauss_rule: lambda > -1 required");

    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n - 1 > 0 ? n - 1 : 0);
    for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(recurrence_b(k, lambda));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("make_gauss_rule: tridiagonal eigensolve failed");

    GaussRule rule;
    rule.lambda = lambda;
    rule.nodes = es.eigenvalues();
    rule.weights.resize(n);
    double mu0 = weight_mass(lambda);
    for (int j = 0; j < n; ++j) {
        double v0 = es.eigenvectors()(0, j);
        rule.weights[j] = mu0 * v0 * v0;
    }
    return rule;
}

Eigen::VectorXd barycentric_weights(const Eigen::VectorXd& nodes) {
    const int n = static_cast<int>(nodes.size());
    Eigen::VectorXd w(n);
    for (int j = 0; j < n; ++j) {
        double prod = 1.0;
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            prod *= 2.0 * (nodes[j] - nodes[k]); // capacity scaling keeps the product O(1)
        }
        w[j] = 1.0 / prod;
    }
    w /= w.cwiseAbs().maxCoeff();
    return w;
}

Eigen::MatrixXd differentiation_matrix(const Eigen::VectorXd& nodes,
                                       const Eigen::VectorXd& bary) {
    const int n = static_cast<int>(nodes.size());
    Eigen::MatrixXd D(n, n);
    for (int i = 0; i < n; ++i) {
        double rowsum = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double v = (bary[j] / bary[i]) / (nodes[i] - nodes[j]);
            D(i, j) = v;
            rowsum += v;
        }
        D(i, i) = -rowsum;
    }
    return D;
}

double barycentric_eval(const Eigen::VectorXd& nodes, const Eigen::VectorXd& bary,
                        const Eigen::VectorXd& f, double x) {
    const int n = static_cast<int>(nodes.size());
    double num = 0.0, den = 0.0;
    for (int j = 0; j < n; ++j) {
        double dx = x - nodes[j];
        if (dx == 0.0) return f[j];
        double t = bary[j] / dx;
        num += t * f[j];
        den += t;
    }
    return num / den;
}

Eigen::MatrixXd interpolation_matrix(const Eigen::VectorXd& nodes,
                                     const Eigen::VectorXd& bary,
                                     const Eigen::VectorXd& xs) {
    const int n = static_cast<int>(nodes.size());
    const int m = static_cast<int>(xs.size());
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(m, n);
    for (int i = 0; i < m; ++i) {
        double den = 0.0;
        int hit = -1;
        for (int j = 0; j < n; ++j) {
            double dx = xs[i] - nodes[j];
            if (dx == 0.0) {
                hit = j;
                break;
            }
            den += bary[j] / dx;
        }
        if (hit >= 0) {
            R(i, hit) = 1.0;
            continue;
        }
        for (int j = 0; j < n; ++j) R(i, j) = (bary[j] / (xs[i] - nodes[j])) / den;
    }
    return R;
}

Eigen::MatrixXd orthonormal_poly_values(double lambda, int ncols,
                                        const Eigen::VectorXd& xs) {
    const int m = static_cast<int>(xs.size());
    Eigen::MatrixXd P(m, ncols);
    double p0 = 1.0 / std::sqrt(weight_mass(lambda));
    for (int i = 0; i < m; ++i) P(i, 0) = p0;
    if (ncols == 1) return P;
    double sb1 = std::sqrt(recurrence_b(1, lambda));
    for (int i = 0; i < m; ++i) P(i, 1) = xs[i] * P(i, 0) / sb1;
    double sb_k = sb1;
    for (int k = 2; k < ncols; ++k) {
        double sb_k1 = std::sqrt(recurrence_b(k, lambda));
        for (int i = 0; i < m; ++i)
            P(i, k) = (xs[i] * P(i, k - 1) - sb_k * P(i, k - 2)) / sb_k1;
        sb_k = sb_k1;
    }
    return P;
}

} // namespace wblab
