#pragma once

#include <memory>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "wblab/field.hpp"
#include "wblab/grid.hpp"
#include "wblab/nonlinearity.hpp"
#include "wblab/params.hpp"

namespace wblab {

// Solution of phi'' = phi^p + f(phi) integrated to the blow-up threshold,
// with dense quintic-Hermite data at the accepted steps.
struct OdeTrajectory {
    Params params{3.0, 2.0};
    bool f_enabled = true;
    double A = 0.0, B = 0.0;
    double M0 = 0.0;       // first-integral constant
    double T_blowup = 0.0; // extrapolated
    std::vector<double> t, phi, dphi, ddphi;

    double t_first() const { return t.front(); }
    double t_last() const { return t.back(); }
    double phi0(double tq) const;
    double dphi0(double tq) const;
};

// Admissible default data: A = max(10 kappa0, smallest A with |f| <= xi^p/2
// for xi >= A), B chosen so the first integral vanishes.
void default_initial_data(const Params& params, bool f_enabled, double* A, double* B);

OdeTrajectory solve_ode(double A, double B, const Params& params, bool f_enabled,
                        double tol = 1e-12);

// The similarity profile phi(s) = e^{-2s/(p-1)} phi0(T - e^{-s}).
//
// Two representations are stitched: the time trajectory anchors the low-s part,
// and for s beyond the range where T - e^{-s} is representable the first-order
// similarity equation is integrated backward in s from asymptotic data (the
// contraction of the backward flow locks onto the unique bounded solution).
class PhiProfile {
public:
    static PhiProfile build(const OdeTrajectory& traj, double s_max = 520.0);

    double s_min() const { return s_min_; }
    double s_max() const { return s_max_; }
    double kappa0() const { return params_.kappa0; }
    const Params& params() const { return params_; }
    bool f_enabled() const { return f_enabled_; }
    double T_blowup() const { return T_; }
    double M0() const { return M0_; }
    double join_point() const { return s_join_; }
    double join_mismatch() const { return join_mismatch_; }

    double phi(double s) const;
    // first derivative from the first-order similarity equation
    double dphi(double s) const;
    // second derivative from the second-order similarity equation
    double ddphi(double s) const;
    // derivative of the dense interpolant itself (cross-check path)
    double dphi_interpolant(double s) const;

    // right side of the first-order similarity equation at (value, s)
    double similarity_rhs(double value, double s) const;

    nlohmann::json to_json() const;
    static PhiProfile from_json(const nlohmann::json& j);

private:
    PhiProfile(const Params& params, bool f_enabled);
    void check_domain(double s) const;
    double phi_tbranch(double s) const;

    Params params_;
    bool f_enabled_;
    std::shared_ptr<const Nonlinearity> nl_;
    double T_ = 0.0, M0_ = 0.0;
    double s_min_ = 0.0, s_join_ = 0.0, s_max_ = 0.0;
    // t-branch dense data
    std::vector<double> tt_, tphi_, tdphi_, tddphi_;
    // s-branch dense data (ascending in s)
    std::vector<double> ss_, sphi_, sdphi_, sddphi_;
    double join_mismatch_ = 0.0;
};

PhiProfile phi_profile(const OdeTrajectory& traj, double s_max = 520.0);

struct AsymptoticFit {
    double slope;       // fitted exponent of log(kappa0 - phi) vs log s
    double prefactor;   // exp(intercept)
    double c_paper;     // kappa0 (p-1)^{a-1} / 4^a
    double dphi_bound;  // max over window of |phi'(s)| s^a
    double fit_residual;
};
AsymptoticFit asymptotic_fit(const PhiProfile& profile, double s_lo, double s_hi);

// The boosted exact solution wbar(d,y,s) and its closed-form derivatives.
class TiltedProfile {
public:
    TiltedProfile(std::shared_ptr<const PhiProfile> profile, double d);

    double d() const { return d_; }
    const PhiProfile& profile() const { return *prof_; }

    double shift(double y) const; // log((1+dy)/sqrt(1-d^2))
    double w1(double y, double s) const;
    double w2(double y, double s) const;
    double ds_w1(double y, double s) const { return w2(y, s); }
    double ds_w2(double y, double s) const;
    double dd_w1(double y, double s) const;
    double dd_w2(double y, double s) const;
    double phitilde(double y, double s) const;

    Field w1_field(const WeightedGrid& grid, double s) const;
    StateField state(const WeightedGrid& grid, double s) const;
    StateField dd_state(const WeightedGrid& grid, double s) const;

private:
    std::shared_ptr<const PhiProfile> prof_;
    double d_;
};

TiltedProfile tilted_profile(std::shared_ptr<const PhiProfile> profile, double d);

struct DerivativeBoundReport {
    std::vector<double> s;
    std::vector<double> ds_ratio;  // sup_y |ds w1| s^a / kappa
    std::vector<double> dd_scaled; // (1-d^2) sup_y |dd w1|
    double ds_ratio_spread;        // max/min over s (0 when identically zero)
    // spread of the s^{a+1}-scaled ratio; constant-rate version of the bound
    double ds_sharp_spread;
    bool bounded;      // sup of ds_ratio finite
    bool decreasing;   // ds_ratio non-increasing within 10 percent slack
};
DerivativeBoundReport derivative_bound_audit(const TiltedProfile& tp,
                                             const WeightedGrid& grid,
                                             const std::vector<double>& s_list);

} // namespace wblab
