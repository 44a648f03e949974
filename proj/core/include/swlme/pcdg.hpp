#pragma once

#include <functional>
#include <vector>

#include "swlme/mesh.hpp"
#include "swlme/modal.hpp"
#include "swlme/model.hpp"
#include "swlme/quadrature.hpp"

// Spatial discretization operators of the two path-conservative DG schemes:
// numerical fluxes, explicit linear-path integrals of the non-conservative
// products, and right-hand-side assembly.

namespace swlme {

enum class BoundaryKind { free, periodic };

//-----------------------------------------------------------------------------
// Interface-level building blocks
//-----------------------------------------------------------------------------

/// Monotone Lax-Friedrichs flux of the surface form,
/// (f(w-) + f(w+))/2 - alpha/2 (w+ - w-).
StateVec lax_friedrichs_flux(const SurfaceState& wl, const SurfaceState& wr,
                             double bl, double br, double g, double alpha);

/// Hydrostatic reconstruction at an interface: both sides re-solve their own
/// height quartic against the shared topography b* = min(b-, b+). The side
/// whose topography equals b* keeps its trace exactly; the other side's
/// Newton is seeded from that unchanged height so both sides select the same
/// root branch across equilibrium interfaces.
struct Reconstruction {
  ConservativeState left;
  ConservativeState right;
  double b_star = 0.0;
};
Reconstruction hydrostatic_reconstruct(const ConservativeState& ul,
                                       const ConservativeState& ur, double g);
Reconstruction hydrostatic_reconstruct(const ConservativeState& ul,
                                       const EquilibriumState& vl,
                                       const ConservativeState& ur,
                                       const EquilibriumState& vr, double g);

/// Lax-Friedrichs flux with the dissipation evaluated on the reconstructed
/// interface states, (f(u-) + f(u+))/2 - alpha/2 (u*+ - u*-).
StateVec modified_lf_flux(const ConservativeState& ul, const ConservativeState& ur,
                          double g, double alpha);
StateVec modified_lf_flux(const ConservativeState& ul, const ConservativeState& ur,
                          const Reconstruction& recon, double g, double alpha);

/// Path integral of the non-conservative products of the surface form along
/// the linear segment path; each component is the exact integral.
/// Component 1 is zero, component 2 is -g (b-+b+)/2 (H+-H-), the moment
/// components are -(u- + u+)/2 (m_i+ - m_i-).
StateVec path_correction_still(const SurfaceState& wl, const SurfaceState& wr,
                               double bl, double br, double g);

/// Path integral of the extended system through the coupling-matrix identity:
/// g_phi = (int_0^1 L(Phi(s)) ds)(vtilde+ - vtilde-) - f(u+) + f(u-),
/// with h, u_m, a_i interpolated linearly in s so every entry of L is a
/// polynomial of degree <= 3 in s; Simpson's rule integrates it exactly.
StateVec path_correction_moving(const ConservativeState& ul,
                                const ConservativeState& ur, double g);
StateVec path_correction_moving(const ConservativeState& ul,
                                const EquilibriumState& vl,
                                const ConservativeState& ur,
                                const EquilibriumState& vr, double g);

//-----------------------------------------------------------------------------
// Still-water scheme
//-----------------------------------------------------------------------------

/// DG operator for the surface-variable form (unknown w = (H, m_a, m_i));
/// the topography is a static modal field of the same degree.
class StillScheme {
 public:
  StillScheme(const Mesh& mesh, int n_moments, int degree, double g,
              BoundaryKind bc);

  void set_topography(ModalField b);
  const ModalField& topography() const { return b_field_; }
  const Mesh& mesh() const { return mesh_; }
  const GaussRule& volume_rule() const { return rule_; }
  int n_moments() const { return n_moments_; }
  int ncomp() const { return n_moments_ + 2; }
  int degree() const { return degree_; }
  double gravity() const { return g_; }
  BoundaryKind boundary() const { return bc_; }

  /// Global maximum wave speed over volume nodes and traces.
  double max_speed(const ModalField& w) const;

  /// Right-hand-side moments of the weak form; the semi-discrete system is
  /// d/dt coeff = (2/dx) rhs.
  ModalField rhs(const ModalField& w, double alpha) const;

  /// Pointwise topography value at a volume node / trace of a cell.
  double bottom_at(int j, int q) const { return b_nodes_[j * rule_.size() + q]; }
  double bottom_trace(int j, int side) const {
    return side == 0 ? b_trace_l_[j] : b_trace_r_[j];
  }

 private:
  Mesh mesh_;
  int n_moments_;
  int degree_;
  double g_;
  BoundaryKind bc_;
  GaussRule rule_;
  ModalField b_field_;
  std::vector<double> b_nodes_;    // [cell][node]
  std::vector<double> b_trace_l_;  // b at xi = -1 per cell
  std::vector<double> b_trace_r_;  // b at xi = +1 per cell
  std::vector<double> phi_, dphi_; // basis tables at volume nodes
  std::vector<double> phi_l_, phi_r_;
};

//-----------------------------------------------------------------------------
// Moving-water scheme
//-----------------------------------------------------------------------------

/// DG operator in equilibrium variables v = (E, m_a, a_i/h, b). Conservative
/// values at quadrature nodes are recovered through the height quartic; each
/// node caches its last accepted height so the root branch continues through
/// transcritical regions. The first evaluation at a node seeds from the
/// scenario's declared flow type.
class MovingScheme {
 public:
  MovingScheme(const Mesh& mesh, int n_moments, int degree, double g,
               BoundaryKind bc);

  void set_branch_map(std::function<FlowBranch(double)> map);

  const Mesh& mesh() const { return mesh_; }
  const GaussRule& volume_rule() const { return rule_; }
  int n_moments() const { return n_moments_; }
  int ncomp() const { return n_moments_ + 3; }
  int degree() const { return degree_; }
  double gravity() const { return g_; }
  BoundaryKind boundary() const { return bc_; }

  double max_speed(const ModalField& v);

  /// Strong-form interior assembly -int L(u(v)) vtilde_x phi plus the
  /// interface terms (f(u-) - fmod - g_phi/2) phi- and
  /// (fmod - f(u+) - g_phi/2) phi+.
  ModalField rhs(const ModalField& v, double alpha);

  /// Moments int u(v) phi of the conservative variables, same shape as v.
  ModalField conservative_moments(const ModalField& v);

  /// Conservative state at a volume node (0 <= q < volume_rule().size()) or
  /// at a trace (q = volume_rule().size() for xi=-1, +1 more for xi=+1).
  ConservativeState node_state(const ModalField& v, int j, int q);

  /// Height cache access (volume nodes first, then the two traces).
  double cached_height(int j, int q) const { return heights_[j * nodes_per_cell() + q]; }
  int nodes_per_cell() const { return rule_.size() + 2; }

  /// Recover the conservative state for an arbitrary equilibrium state using
  /// the cell-node cache slot (used by the stage solver).
  ConservativeState recover_at(const EquilibriumState& v, int j, int q);

 private:
  double node_xi(int q) const;

  Mesh mesh_;
  int n_moments_;
  int degree_;
  double g_;
  BoundaryKind bc_;
  GaussRule rule_;
  std::function<FlowBranch(double)> branch_map_;
  std::vector<double> heights_;  // [cell][volume nodes..., trace-, trace+]
  std::vector<double> phi_, dphi_;
  std::vector<double> phi_l_, phi_r_;
};

}  // namespace swlme
