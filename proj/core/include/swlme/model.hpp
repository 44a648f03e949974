#pragma once

#include <Eigen/Dense>
#include <utility>

#include "swlme/state.hpp"

// Pure algebra of the shallow water linearized moment system: fluxes,
// quasilinear matrices, eigenvalues, variable transforms, the equilibrium
// quartic and its root branches, and the vertical velocity basis.
//
// Everything in this header is a pure function of its arguments and safe
// for concurrent use.

namespace swlme {

//-----------------------------------------------------------------------------
// Fluxes and wave speeds
//-----------------------------------------------------------------------------

/// Flux of the extended system in conservative variables,
/// (m_a, h u^2 + g h^2/2 + sum_i h a_i^2/(2i+1), 2 m_a a_1, ..., 2 m_a a_N, 0).
StateVec physical_flux(const ConservativeState& u, double g);

/// Flux of the surface-variable form, with the depth taken as H - b.
StateVec surface_flux(const SurfaceState& w, double b, double g);

/// Analytic wave speeds u_m -/+ sqrt(g h + sum_i 3 a_i^2/(2i+1)) and u_m with
/// multiplicity N, returned in ascending order (size N+2).
StateVec eigenvalues(const ConservativeState& u, double g);

/// |u_m| + sqrt(g h + sum_i 3 a_i^2/(2i+1)); upper bound on all wave speeds.
double max_wave_speed(const ConservativeState& u, double g);
double max_wave_speed(const SurfaceState& w, double b, double g);

//-----------------------------------------------------------------------------
// Quasilinear matrices
//-----------------------------------------------------------------------------

/// Jacobian of the non-extended system, size (N+2) x (N+2).
Eigen::MatrixXd jacobian(const ConservativeState& u, double g);

/// Jacobian plus non-conservative matrix of the extended system (b included),
/// size (N+3) x (N+3). Rows 1 and N+3 are zero apart from the Jacobian block.
Eigen::MatrixXd extended_jacobian(const ConservativeState& u, double g);

/// Non-conservative matrix of the extended system: -u_m on the moment
/// diagonal, g h at (2, N+3), zero rows first and last.
Eigen::MatrixXd nonconservative_extended(const ConservativeState& u, double g);

/// Non-conservative matrix of the surface form: -g b at (2,1), -u_m on the
/// moment diagonal.
Eigen::MatrixXd nonconservative_surface(const SurfaceState& w, double b, double g);

/// The matrix relating equilibrium-variable gradients to the combined flux
/// gradient and non-conservative product: f(u)_x + G(u) u_x = L(u) vtilde_x,
/// where vtilde zeroes the topography component. Size (N+3) x (N+3).
Eigen::MatrixXd coupling_matrix(const ConservativeState& u);

/// L(u) * x without forming the matrix (hot path of the moving scheme).
StateVec apply_coupling_matrix(const ConservativeState& u, const StateVec& x);

/// L * x with the primitives (h, u_m, a_1..a_N) supplied directly; used where
/// the primitives are interpolated rather than stored as a state.
StateVec apply_coupling_primitives(double h, double um, const double* alpha,
                                   int n_moments, const StateVec& x);

/// G(w) * wx of the surface form, with pointwise topography value b.
StateVec apply_surface_coupling(const SurfaceState& w, double b, double g,
                                const StateVec& wx);

//-----------------------------------------------------------------------------
// Variable transforms and the equilibrium quartic
//-----------------------------------------------------------------------------

enum class FlowBranch {
  subcritical,   ///< largest positive root of the quartic
  supercritical, ///< smallest positive root (below the critical height)
  critical       ///< the double-root height where dq/dh = 0
};

/// Conservative -> equilibrium variables (always well defined for h > 0).
EquilibriumState to_equilibrium(const ConservativeState& u, double g);

/// Residual and derivative of the height quartic
///   q(h) = [3/2 sum_i r_i^2/(2i+1)] h^4 + g h^3 + (g b - E) h^2 + m_a^2/2.
std::pair<double, double> quartic_residual(double h, const EquilibriumState& v,
                                           double g);

/// Height separating the supercritical and subcritical root branches
/// (the positive stationary point of q). Throws RootError if E <= g b.
double critical_height(const EquilibriumState& v, double g);

/// Positive root of q on the requested branch. Newton with bisection
/// safeguard inside an analytic bracket; RootError when no root exists.
double recover_height(const EquilibriumState& v, double g, FlowBranch branch);

/// Positive root on the branch containing the seed (continuation): seeds at
/// or above the critical height resolve subcritical, below supercritical.
double recover_height_seeded(const EquilibriumState& v, double g, double seed);

/// Equilibrium -> conservative variables on the requested branch.
ConservativeState to_conservative(const EquilibriumState& v, double g,
                                  FlowBranch branch);
ConservativeState to_conservative_seeded(const EquilibriumState& v, double g,
                                         double seed);
/// Assemble the conservative state from an already-recovered height.
ConservativeState assemble_conservative(const EquilibriumState& v, double h);

/// Gradient of the recovered height with respect to (E, m_a, r_1..r_N, b)
/// via the implicit function theorem. Throws SonicStateError when
/// |dq/dh| < 1e-8 g h^2.
StateVec height_gradient(const EquilibriumState& v, double h, double g);

//-----------------------------------------------------------------------------
// Vertical velocity basis
//-----------------------------------------------------------------------------

/// phi_i(zeta) = (1/i!) d^i/dzeta^i (zeta - zeta^2)^i for 1 <= i <= kMaxMoments,
/// evaluated from precomputed integer coefficients; phi_0 = 1.
double vertical_basis_value(int i, double zeta);

/// Horizontal velocity at scaled depth zeta: u_m + sum_i a_i phi_i(zeta).
double velocity_profile(const ConservativeState& u, double zeta);

}  // namespace swlme
