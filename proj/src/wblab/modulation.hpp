#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "wblab/evolve.hpp"
#include "wblab/field.hpp"
#include "wblab/grid.hpp"
#include "wblab/params.hpp"
#include "wblab/profile.hpp"
#include "wblab/spectral.hpp"

namespace wblab {

struct ModulationOptions {
    double tol = 1e-11;      // root tolerance on the orthogonality functional
    double eps_gate = 0.5;   // admissible |state - wbar(d_init)|_H
    double theta_cap = 4.951; // atanh(0.9999)
    int max_iter = 80;
};

struct ModulationDiag {
    int iterations = 0;
    double dphi_dtheta = 0.0; // sampled transversality slope at the root
    bool bisection_fallback = false;
};

// Orthogonality functional Phi(v,d,s) paired against the lambda=0 adjoint.
double modulation_functional(const StateField& state, double s, double d,
                             std::shared_ptr<const PhiProfile> profile,
                             const WeightedGrid& grid, const Params& params);

// Root of Phi in theta = atanh(d): safeguarded Newton with finite-difference
// slope and bracket bisection fallback, warm-started from d_init.
double solve_modulation(const StateField& state, double s,
                        std::shared_ptr<const PhiProfile> profile, double d_init,
                        const WeightedGrid& grid, const Params& params,
                        const ModulationOptions& opts = {},
                        ModulationDiag* diag = nullptr);

struct ModulationPoint {
    double s = 0.0;
    double d = 0.0;
    double theta = 0.0;
    double alpha1 = 0.0;
    double alpha0 = 0.0;
    double alpha_minus = 0.0;
    double A = 0.0;        // alpha1^2
    double B = 0.0;        // alpha_-^2 + 2 R_-
    double R_minus = 0.0;
    double f0 = 0.0;       // B + eta1 int q1 q2 rho
    double q_norm_H = 0.0;
    int newton_iters = 0;
};

ModulationPoint decompose_point(const StateField& state, double s, double d,
                                std::shared_ptr<const PhiProfile> profile,
                                const WeightedGrid& grid, const Params& params,
                                double eta1);

// Sequential d(s) tracking along a trajectory with warm starts.
std::vector<ModulationPoint> track_modulation(const Trajectory& traj,
                                              std::shared_ptr<const PhiProfile> profile,
                                              double d_init, const WeightedGrid& grid,
                                              const Params& params, double eta1,
                                              const ModulationOptions& opts = {});

// Fit-on-half/validate-on-half protocol for the differential inequalities, plus
// literal late-time checks with the fixed constants.
struct InequalityCheck {
    double fitted_C = 0.0;
    double worst_ratio = 0.0; // max lhs/(C_fit * envelope) on the validation half
    bool pass = false;
};
struct AuditReport {
    InequalityCheck dprime;      // |d'|/(1-d^2) vs alpha envelope
    InequalityCheck alpha1_ode;  // |alpha1' - alpha1| vs alpha envelope
    InequalityCheck barrier;     // alpha1^2 vs alpha_-^2 + s^{-(a+1)/2}
    bool tail_quarter = false;   // A <= B/4 on the tail
    bool tail_f0_bracket = false; // f0/2 <= B <= 2 f0 on the tail
    double tail_start = 0.0;
    int tail_points = 0;
};
AuditReport audit_inequalities(const std::vector<ModulationPoint>& trace,
                               const Params& params, double s_tail);

enum class RateKind { exponential, polynomial_bound };
struct RateFit {
    RateKind kind = RateKind::exponential;
    double exponent = 0.0;   // mu-hat for exponential, (a+1)/4 for polynomial
    double prefactor = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    double residual = 0.0;   // rms of the log fit relative to the log drop
    double sup_scaled = 0.0; // polynomial mode: sup of s^{(a+1)/4} |q|
    bool envelope_noninc = false;
};
RateFit fit_decay(const std::vector<ModulationPoint>& trace, RateKind kind,
                  const Params& params, double window_lo, double window_hi);

struct ThetaConvergence {
    double theta_inf = 0.0;
    double d_inf = 0.0;
    double tail_sup_scaled = 0.0; // sup |theta-theta_inf| e^{mu (s-s_end)/2} or s^{(a+1)/2}
};
ThetaConvergence theta_convergence(const std::vector<ModulationPoint>& trace,
                                   const Params& params,
                                   std::optional<double> mu_hat = std::nullopt);

} // namespace wblab
