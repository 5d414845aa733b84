#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "wblab/field.hpp"
#include "wblab/grid.hpp"
#include "wblab/nonlinearity.hpp"
#include "wblab/params.hpp"
#include "wblab/profile.hpp"

namespace wblab {

struct EvolveConfig {
    double ds = 0.0;        // 0 selects the stability default c_stab/n^2
    double s0 = 0.0;
    double s_end = 0.0;
    bool f_enabled = true;
    int sample_stride = 16; // record every k-th step
    double divergence_threshold = 1e6;
    double filter_strength = 0.0; // exponential modal filter, 0 = off
};

// default step restriction for the explicit scheme
double stable_ds(int n);

struct Trajectory {
    std::vector<double> s;
    std::vector<StateField> states;
    double ds = 0.0;
    std::size_t steps = 0;
};

// Right side of the first-order system: (v, L w - 2(p+1)/(p-1)^2 w + |w|^{p-1}w
// - (p+3)/(p-1) v - 2 y v' + rescaled f term).
StateField evolve_rhs(const StateField& q, double s, const WeightedGrid& grid,
                      const Params& params, bool f_enabled, const Nonlinearity& nl);

// Classical fourth-order step loop. Throws divergence_error past the norm
// threshold (carrying the last recorded sample) and numeric_error on NaN.
Trajectory evolve(const StateField& initial, const EvolveConfig& config,
                  const WeightedGrid& grid, const Params& params);

// Same loop with a per-step callback; returning false stops the run cleanly.
Trajectory evolve_with_monitor(const StateField& initial, const EvolveConfig& config,
                               const WeightedGrid& grid, const Params& params,
                               const std::function<bool(double, const StateField&)>& keep_going);

// Nodal perturbative fields of the deviation equation around wbar(d,.,s).
struct PerturbationTerms {
    Field h;       // power-nonlinearity remainder
    Field H;       // its antiderivative in q1
    Field f_hat;   // rescaled-f remainder
    Field F_hat;   // its antiderivative in q1
    Field psi_bar; // p wbar^{p-1} - 2(p+1)/(p-1)^2
    Field V_bar;   // p kappa^{p-1} (phitilde^{p-1} - 1) + e^{-2s} f'(e^{2s/(p-1)} wbar)
};
PerturbationTerms eval_perturbation_terms(const Field& q1, const TiltedProfile& tp,
                                          double s, const WeightedGrid& grid,
                                          const Params& params, const Nonlinearity& nl);

// |d/ds q - RHS| in the H norm at the interior samples of a trajectory, where
// q(s) = w(s) - wbar(d(s),.,s) and d' comes from centered differences.
// Dropping the V_bar q1 term (ablate flag) shows the term is required.
std::vector<double> q_equation_residual(const Trajectory& traj,
                                        const std::vector<double>& d_trace,
                                        std::shared_ptr<const PhiProfile> profile,
                                        const WeightedGrid& grid, const Params& params,
                                        bool drop_vbar = false);

} // namespace wblab
