#pragma once

#include <cstdint>

#include "wblab/field.hpp"
#include "wblab/grid.hpp"
#include "wblab/params.hpp"

namespace wblab {

// Eigenfields of the linearized operator L_d, its adjoint eigenfields with the
// pairing normalization, and the soliton/potential fields, all at one d.
//
// The adjoint first components solve -Lr + r = RHS in the orthonormal basis of
// the weight rho, where -L is diagonal with eigenvalues k(k+2*beta+1); the
// right side, including its 1/(1-y^2) part, is projected with the auxiliary
// Gauss rule of weight (1-y^2)^(beta-1), so the nodal adjoints are the Galerkin
// solution restricted to the grid space. Construction is pure per d.
struct SpectralPack {
    double d = 0.0;
    Field kappa;
    Field psi;
    StateField F1, F0;
    StateField W1, W0;
    double c1 = 0.0, c0 = 0.0;
};

Field kappa_d(double d, const WeightedGrid& grid, const Params& params);
Field psi_d(double d, const WeightedGrid& grid, const Params& params);

SpectralPack build_spectral_pack(double d, const WeightedGrid& grid,
                                 const Params& params, bool w0_only = false);

// L_d q = (q2, L q1 + psi q1 - (p+3)/(p-1) q2 - 2 y dy q2)
StateField apply_Ld(const StateField& q, double d, const WeightedGrid& grid,
                    const Params& params);
StateField apply_Ld(const StateField& q, const SpectralPack& pack,
                    const WeightedGrid& grid, const Params& params);

// Natural inner product of H in the integrated-by-parts (symmetric) form.
double inner_upsilon(const StateField& q, const StateField& r,
                     const WeightedGrid& grid);
// Cross-check path through the operator form q1 (-L r1 + r1) + q2 r2.
double inner_upsilon_operator_form(const StateField& q, const StateField& r,
                                   const WeightedGrid& grid, const Params& params);

// Energy quadratic form in the derivative form of its definition.
double bilinear_phi(const StateField& q, const StateField& r, const SpectralPack& pack,
                    const WeightedGrid& grid);
double bilinear_phi_operator_form(const StateField& q, const StateField& r,
                                  const SpectralPack& pack, const WeightedGrid& grid,
                                  const Params& params);

// sqrt of the form value with the round-off clamp; throws coercivity_error when
// the form is negative beyond -1e-8 relative to the squared remainder norm
// (plus an absolute floor proportional to the assembly scale of the form).
double clamped_alpha_minus(double form_value, double q_minus_norm_sq,
                           double assembly_scale = 0.0);

struct Decomposition {
    double alpha1 = 0.0;
    double alpha0 = 0.0;
    StateField q_minus;
    double alpha_minus = 0.0;
};
Decomposition project(const StateField& q, const SpectralPack& pack,
                      const WeightedGrid& grid);

struct NormEquivalenceReport {
    double raw_low = 0.0, raw_high = 0.0;   // |q_-|_H / alpha_-
    double raw1_low = 0.0, raw1_high = 0.0; // |q|_H / (|alpha_1| + alpha_-)
    int skipped = 0;
    int used = 0;
};
NormEquivalenceReport norm_equivalence_audit(const SpectralPack& pack,
                                             const WeightedGrid& grid,
                                             const Params& params, int n_samples,
                                             std::uint64_t seed = 42);

} // namespace wblab
