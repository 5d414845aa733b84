#pragma once

#include <vector>

#include "wblab/evolve.hpp"
#include "wblab/field.hpp"
#include "wblab/grid.hpp"
#include "wblab/nonlinearity.hpp"
#include "wblab/params.hpp"

namespace wblab {

// Conserved-type functional of the unperturbed flow:
// E0 = int( v^2/2 + (w')^2 (1-y^2)/2 + (p+1)/(p-1)^2 w^2 - |w|^{p+1}/(p+1) ) rho dy.
double E0(const StateField& q, const WeightedGrid& grid, const Params& params);

// Full functional E = E0 + I + J with the rescaled-antiderivative correction I
// and the time-weighted cross term J.
struct EnergyParts {
    double E0 = 0.0;
    double I = 0.0;
    double J = 0.0;
    double E = 0.0;
};
EnergyParts E_full(const StateField& q, double s, const WeightedGrid& grid,
                   const Params& params, const Nonlinearity& nl);

// H(w,s) = exp((p+3)/((a-1) s^{(a-1)/2})) E(w,s) + theta_H e^{-(p+1)s/(p-1)}
double lyapunov_H(const StateField& q, double s, double theta_H,
                  const WeightedGrid& grid, const Params& params,
                  const Nonlinearity& nl);

struct EnergyTrace {
    std::vector<double> s, E0, I, J, E, H;
};
EnergyTrace energy_trace(const Trajectory& traj, const WeightedGrid& grid,
                         const Params& params, double theta_H);

struct MonotonicityReport {
    std::vector<double> theta_values;
    std::vector<double> noninc_fraction; // fraction of non-increasing H steps
    double best_theta = 0.0;             // smallest theta with the best fraction
    double best_fraction = 0.0;
};
MonotonicityReport monotonicity_audit(const Trajectory& traj, const WeightedGrid& grid,
                                      const Params& params,
                                      const std::vector<double>& theta_scan);

// Window of the unweighted H^1 x L^2 size of the states, evaluated on a
// flat-weight rule after interpolation.
struct BoundWindow {
    double min_value = 0.0;
    double max_value = 0.0;
    bool positive = false;
};
BoundWindow bound_window(const Trajectory& traj, const WeightedGrid& grid);

} // namespace wblab
