#include "swlme/pcdg.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace swlme {

namespace {

// M_bar * x where M_bar = int_0^1 L(Phi(s)) ds along the linear interpolation
// of the primitives (h, u_m, a_i). Every entry of L is a polynomial of degree
// at most 3 in s, so the Simpson weights (1/6, 4/6, 1/6) integrate exactly.
StateVec coupling_path_average(const ConservativeState& ul,
                               const ConservativeState& ur, const StateVec& x) {
  const int n = ul.n_moments();
  double al[kMaxMoments], ar[kMaxMoments], am[kMaxMoments];
  const double hl = ul.h(), hr = ur.h();
  const double uml = ul.velocity(), umr = ur.velocity();
  for (int i = 1; i <= n; ++i) {
    al[i - 1] = ul.alpha(i);
    ar[i - 1] = ur.alpha(i);
    am[i - 1] = 0.5 * (al[i - 1] + ar[i - 1]);
  }
  StateVec acc = apply_coupling_primitives(hl, uml, al, n, x);
  acc += apply_coupling_primitives(hr, umr, ar, n, x);
  StateVec mid = apply_coupling_primitives(0.5 * (hl + hr), 0.5 * (uml + umr), am, n, x);
  mid *= 4.0;
  acc += mid;
  acc *= 1.0 / 6.0;
  return acc;
}

StateVec moving_path_correction(const ConservativeState& ul, const EquilibriumState& vl,
                                const ConservativeState& ur, const EquilibriumState& vr,
                                const StateVec& flux_l, const StateVec& flux_r) {
  const int n = ul.n_moments();
  StateVec dv(n + 3);
  bool same = true;
  for (int c = 0; c < n + 2; ++c) {
    dv[c] = vr.q[c] - vl.q[c];
    same = same && (dv[c] == 0.0);
  }
  dv[n + 2] = 0.0;  // the topography component of vtilde is zeroed

  StateVec out(n + 3);
  if (!same) out = coupling_path_average(ul, ur, dv);
  out += flux_l;
  out -= flux_r;
  // The mass and topography rows cancel identically: row 1 of L is the
  // discharge selector and f_1 = m_a, row N+3 pairs a zeroed component with a
  // zero flux. Pin them against rounding in the convex combination.
  out[0] = 0.0;
  out[n + 2] = 0.0;
  return out;
}

}  // namespace

//-----------------------------------------------------------------------------
// Interface-level building blocks
//-----------------------------------------------------------------------------

StateVec lax_friedrichs_flux(const SurfaceState& wl, const SurfaceState& wr,
                             double bl, double br, double g, double alpha) {
  StateVec f = surface_flux(wl, bl, g);
  f += surface_flux(wr, br, g);
  f *= 0.5;
  for (int c = 0; c < f.size(); ++c) {
    f[c] -= 0.5 * alpha * (wr.q[c] - wl.q[c]);
  }
  return f;
}

Reconstruction hydrostatic_reconstruct(const ConservativeState& ul,
                                       const EquilibriumState& vl,
                                       const ConservativeState& ur,
                                       const EquilibriumState& vr, double g) {
  Reconstruction rec{ul, ur, std::min(ul.bottom(), ur.bottom())};
  if (ul.bottom() == ur.bottom()) return rec;  // no jump: traces unchanged

  EquilibriumState vls = vl;
  EquilibriumState vrs = vr;
  vls.bottom() = rec.b_star;
  vrs.bottom() = rec.b_star;

  // The side sitting on b* keeps its own height (it already solves the
  // modified quartic); the other side continues from that root so both sides
  // select the same branch across equilibrium interfaces.
  if (ul.bottom() < ur.bottom()) {
    const double hl = recover_height_seeded(vls, g, ul.h());
    const double hr = recover_height_seeded(vrs, g, hl);
    if (hl != ul.h() || ul.bottom() != rec.b_star) rec.left = assemble_conservative(vls, hl);
    rec.right = assemble_conservative(vrs, hr);
  } else {
    const double hr = recover_height_seeded(vrs, g, ur.h());
    const double hl = recover_height_seeded(vls, g, hr);
    if (hr != ur.h() || ur.bottom() != rec.b_star) rec.right = assemble_conservative(vrs, hr);
    rec.left = assemble_conservative(vls, hl);
  }
  return rec;
}

Reconstruction hydrostatic_reconstruct(const ConservativeState& ul,
                                       const ConservativeState& ur, double g) {
  return hydrostatic_reconstruct(ul, to_equilibrium(ul, g), ur, to_equilibrium(ur, g), g);
}

StateVec modified_lf_flux(const ConservativeState& ul, const ConservativeState& ur,
                          const Reconstruction& recon, double g, double alpha) {
  StateVec f = physical_flux(ul, g);
  f += physical_flux(ur, g);
  f *= 0.5;
  for (int c = 0; c < f.size(); ++c) {
    f[c] -= 0.5 * alpha * (recon.right.q[c] - recon.left.q[c]);
  }
  return f;
}

StateVec modified_lf_flux(const ConservativeState& ul, const ConservativeState& ur,
                          double g, double alpha) {
  return modified_lf_flux(ul, ur, hydrostatic_reconstruct(ul, ur, g), g, alpha);
}

StateVec path_correction_still(const SurfaceState& wl, const SurfaceState& wr,
                               double bl, double br, double g) {
  const int n = wl.n_moments();
  const double hl = wl.depth(bl);
  const double hr = wr.depth(br);
  if (!(hl > 0.0) || !(hr > 0.0)) {
    throw AdmissibilityError("path_correction_still: dry trace state");
  }
  const double uml = wl.discharge() / hl;
  const double umr = wr.discharge() / hr;
  StateVec out(n + 2);
  out[0] = 0.0;
  out[1] = -0.5 * g * (bl + br) * (wr.surface() - wl.surface());
  for (int i = 1; i <= n; ++i) {
    out[1 + i] = -0.5 * (uml + umr) * (wr.moment(i) - wl.moment(i));
  }
  return out;
}

StateVec path_correction_moving(const ConservativeState& ul,
                                const EquilibriumState& vl,
                                const ConservativeState& ur,
                                const EquilibriumState& vr, double g) {
  return moving_path_correction(ul, vl, ur, vr, physical_flux(ul, g),
                                physical_flux(ur, g));
}

StateVec path_correction_moving(const ConservativeState& ul,
                                const ConservativeState& ur, double g) {
  return path_correction_moving(ul, to_equilibrium(ul, g), ur,
                                to_equilibrium(ur, g), g);
}

//-----------------------------------------------------------------------------
// Shared assembly helpers
//-----------------------------------------------------------------------------

namespace {

StateVec eval_table(const ModalField& f, int j, const double* phi) {
  const int km = f.modes();
  StateVec out(f.ncomp());
  const double* cell = f.cell_data(j);
  for (int c = 0; c < f.ncomp(); ++c) {
    double acc = 0.0;
    const double* coeffs = cell + c * km;
    for (int m = 0; m < km; ++m) acc += coeffs[m] * phi[m];
    out[c] = acc;
  }
  return out;
}

StateVec eval_table_derivative(const ModalField& f, int j, const double* dphi,
                               double dx) {
  const int km = f.modes();
  const double scale = 2.0 / dx;
  StateVec out(f.ncomp());
  const double* cell = f.cell_data(j);
  for (int c = 0; c < f.ncomp(); ++c) {
    double acc = 0.0;
    const double* coeffs = cell + c * km;
    for (int m = 1; m < km; ++m) acc += coeffs[m] * dphi[m];
    out[c] = acc * scale;
  }
  return out;
}

void build_basis_tables(const GaussRule& rule, int degree, std::vector<double>& phi,
                        std::vector<double>& dphi, std::vector<double>& phi_l,
                        std::vector<double>& phi_r) {
  const int km = degree + 1;
  phi.resize(static_cast<std::size_t>(rule.size()) * km);
  dphi.resize(phi.size());
  phi_l.resize(km);
  phi_r.resize(km);
  for (int q = 0; q < rule.size(); ++q) {
    basis::values(degree, rule.node(q), &phi[q * km]);
    basis::derivatives(degree, rule.node(q), &dphi[q * km]);
  }
  basis::values(degree, -1.0, phi_l.data());
  basis::values(degree, 1.0, phi_r.data());
}

[[noreturn]] void rethrow_with_cell(const std::exception& e, int j, double x) {
  std::ostringstream os;
  os << e.what() << " (cell " << j << ", x = " << x << ")";
  if (dynamic_cast<const AdmissibilityError*>(&e)) throw AdmissibilityError(os.str());
  if (auto* re = dynamic_cast<const RootError*>(&e)) {
    throw RootError(os.str(), re->q_at_critical, re->h_critical);
  }
  throw SolverError(os.str());
}

}  // namespace

//-----------------------------------------------------------------------------
// StillScheme
//-----------------------------------------------------------------------------

StillScheme::StillScheme(const Mesh& mesh, int n_moments, int degree, double g,
                         BoundaryKind bc)
    : mesh_(mesh), n_moments_(n_moments), degree_(degree), g_(g), bc_(bc),
      rule_(degree + 2) {
  build_basis_tables(rule_, degree_, phi_, dphi_, phi_l_, phi_r_);
}

void StillScheme::set_topography(ModalField b) {
  if (b.nx() != mesh_.nx || b.ncomp() != 1) {
    throw std::invalid_argument("StillScheme: topography field shape mismatch");
  }
  b_field_ = std::move(b);
  const int nq = rule_.size();
  b_nodes_.assign(static_cast<std::size_t>(mesh_.nx) * nq, 0.0);
  b_trace_l_.assign(mesh_.nx, 0.0);
  b_trace_r_.assign(mesh_.nx, 0.0);
  for (int j = 0; j < mesh_.nx; ++j) {
    for (int q = 0; q < nq; ++q) {
      b_nodes_[j * nq + q] = b_field_.evaluate(j, 0, rule_.node(q));
    }
    b_trace_l_[j] = b_field_.evaluate(j, 0, -1.0);
    b_trace_r_[j] = b_field_.evaluate(j, 0, 1.0);
  }
}

double StillScheme::max_speed(const ModalField& w) const {
  const int nq = rule_.size();
  double speed = 0.0;
  for (int j = 0; j < mesh_.nx; ++j) {
    try {
      for (int q = 0; q < nq; ++q) {
        SurfaceState wp(eval_table(w, j, &phi_[q * (degree_ + 1)]));
        speed = std::max(speed, max_wave_speed(wp, b_nodes_[j * nq + q], g_));
      }
      SurfaceState wl(eval_table(w, j, phi_l_.data()));
      SurfaceState wr(eval_table(w, j, phi_r_.data()));
      speed = std::max(speed, max_wave_speed(wl, b_trace_l_[j], g_));
      speed = std::max(speed, max_wave_speed(wr, b_trace_r_[j], g_));
    } catch (const std::exception& e) {
      rethrow_with_cell(e, j, mesh_.center(j));
    }
  }
  return speed;
}

ModalField StillScheme::rhs(const ModalField& w, double alpha) const {
  const int nq = rule_.size();
  const int km = degree_ + 1;
  const int nc = ncomp();
  ModalField out(mesh_.nx, nc, degree_);

  // Volume terms: int f(w) phi_x - int G(w) w_x phi.
  for (int j = 0; j < mesh_.nx; ++j) {
    try {
      for (int q = 0; q < nq; ++q) {
        const double* phi = &phi_[q * km];
        const double* dphi = &dphi_[q * km];
        SurfaceState wp(eval_table(w, j, phi));
        const StateVec wx = eval_table_derivative(w, j, dphi, mesh_.dx);
        const double b = b_nodes_[j * nq + q];
        const StateVec f = surface_flux(wp, b, g_);
        const StateVec gw = apply_surface_coupling(wp, b, g_, wx);
        const double wq = rule_.weight(q);
        double* cell = out.cell_data(j);
        for (int c = 0; c < nc; ++c) {
          const double f_c = wq * f[c];
          const double g_c = wq * 0.5 * mesh_.dx * gw[c];
          double* row = cell + c * km;
          for (int m = 0; m < km; ++m) row[m] += f_c * dphi[m] - g_c * phi[m];
        }
      }
    } catch (const std::exception& e) {
      rethrow_with_cell(e, j, mesh_.center(j));
    }
  }

  // Interface terms: Lax-Friedrichs flux and half-weighted path corrections.
  // Free boundaries use a constant ghost cell carrying the boundary cell's
  // averages: a ghost built from the trace itself would leave the boundary
  // interface without dissipation and let rounding noise pool in the edge
  // cell over long equilibrium runs.
  auto cell_average_state = [&](int j, double& b_out) {
    StateVec avg(nc);
    for (int c = 0; c < nc; ++c) avg[c] = w.cell_average(j, c);
    b_out = b_field_.cell_average(j, 0);
    return SurfaceState(avg);
  };
  for (int i = 0; i <= mesh_.nx; ++i) {
    SurfaceState wl, wr;
    double bl, br;
    if (i > 0) {
      wl = SurfaceState(eval_table(w, i - 1, phi_r_.data()));
      bl = b_trace_r_[i - 1];
    } else if (bc_ == BoundaryKind::periodic) {
      wl = SurfaceState(eval_table(w, mesh_.nx - 1, phi_r_.data()));
      bl = b_trace_r_[mesh_.nx - 1];
    } else {
      wl = cell_average_state(0, bl);
    }
    if (i < mesh_.nx) {
      wr = SurfaceState(eval_table(w, i, phi_l_.data()));
      br = b_trace_l_[i];
    } else if (bc_ == BoundaryKind::periodic) {
      wr = SurfaceState(eval_table(w, 0, phi_l_.data()));
      br = b_trace_l_[0];
    } else {
      wr = cell_average_state(mesh_.nx - 1, br);
    }

    StateVec flux, gphi;
    try {
      flux = lax_friedrichs_flux(wl, wr, bl, br, g_, alpha);
      gphi = path_correction_still(wl, wr, bl, br, g_);
    } catch (const std::exception& e) {
      rethrow_with_cell(e, std::min(i, mesh_.nx - 1), mesh_.interface(i));
    }

    if (i > 0) {
      double* cell = out.cell_data(i - 1);
      for (int c = 0; c < nc; ++c) {
        const double a = -flux[c] - 0.5 * gphi[c];
        double* row = cell + c * km;
        for (int m = 0; m < km; ++m) row[m] += a * phi_r_[m];
      }
    }
    if (i < mesh_.nx) {
      double* cell = out.cell_data(i);
      for (int c = 0; c < nc; ++c) {
        const double a = flux[c] - 0.5 * gphi[c];
        double* row = cell + c * km;
        for (int m = 0; m < km; ++m) row[m] += a * phi_l_[m];
      }
    }
  }
  return out;
}

//-----------------------------------------------------------------------------
// MovingScheme
//-----------------------------------------------------------------------------

MovingScheme::MovingScheme(const Mesh& mesh, int n_moments, int degree, double g,
                           BoundaryKind bc)
    : mesh_(mesh), n_moments_(n_moments), degree_(degree), g_(g), bc_(bc),
      rule_(degree + 2),
      branch_map_([](double) { return FlowBranch::subcritical; }) {
  build_basis_tables(rule_, degree_, phi_, dphi_, phi_l_, phi_r_);
  heights_.assign(static_cast<std::size_t>(mesh_.nx) * nodes_per_cell(),
                  std::numeric_limits<double>::quiet_NaN());
}

void MovingScheme::set_branch_map(std::function<FlowBranch(double)> map) {
  branch_map_ = std::move(map);
  std::fill(heights_.begin(), heights_.end(),
            std::numeric_limits<double>::quiet_NaN());
}

double MovingScheme::node_xi(int q) const {
  if (q < rule_.size()) return rule_.node(q);
  return q == rule_.size() ? -1.0 : 1.0;
}

ConservativeState MovingScheme::recover_at(const EquilibriumState& v, int j, int q) {
  double& slot = heights_[j * nodes_per_cell() + q];
  double h;
  try {
    if (std::isnan(slot)) {
      h = recover_height(v, g_, branch_map_(mesh_.to_x(j, node_xi(q))));
    } else {
      h = recover_height_seeded(v, g_, slot);
    }
  } catch (const std::exception& e) {
    rethrow_with_cell(e, j, mesh_.to_x(j, node_xi(q)));
  }
  slot = h;
  return assemble_conservative(v, h);
}

ConservativeState MovingScheme::node_state(const ModalField& v, int j, int q) {
  const int km = degree_ + 1;
  const double* phi = q < rule_.size() ? &phi_[q * km]
                     : (q == rule_.size() ? phi_l_.data() : phi_r_.data());
  EquilibriumState vp(eval_table(v, j, phi));
  return recover_at(vp, j, q);
}

double MovingScheme::max_speed(const ModalField& v) {
  double speed = 0.0;
  for (int j = 0; j < mesh_.nx; ++j) {
    for (int q = 0; q < nodes_per_cell(); ++q) {
      speed = std::max(speed, max_wave_speed(node_state(v, j, q), g_));
    }
  }
  return speed;
}

ModalField MovingScheme::conservative_moments(const ModalField& v) {
  const int nq = rule_.size();
  const int km = degree_ + 1;
  const int nc = ncomp();
  ModalField out(mesh_.nx, nc, degree_);
  for (int j = 0; j < mesh_.nx; ++j) {
    for (int q = 0; q < nq; ++q) {
      const ConservativeState u = node_state(v, j, q);
      const double* phi = &phi_[q * km];
      const double wq = rule_.weight(q) * 0.5 * mesh_.dx;
      double* cell = out.cell_data(j);
      for (int c = 0; c < nc; ++c) {
        const double uc = wq * u.q[c];
        double* row = cell + c * km;
        for (int m = 0; m < km; ++m) row[m] += uc * phi[m];
      }
    }
  }
  return out;
}

ModalField MovingScheme::rhs(const ModalField& v, double alpha) {
  const int nq = rule_.size();
  const int km = degree_ + 1;
  const int nc = ncomp();
  ModalField out(mesh_.nx, nc, degree_);

  // Interior: -int L(u(v)) vtilde_x phi, with vtilde_x from exact modal
  // derivatives and the topography component zeroed. At an equilibrium the
  // integrand vanishes pointwise at every node, independent of quadrature.
  double alpha_loc[kMaxMoments];
  for (int j = 0; j < mesh_.nx; ++j) {
    for (int q = 0; q < nq; ++q) {
      const ConservativeState u = node_state(v, j, q);
      StateVec vtx = eval_table_derivative(v, j, &dphi_[q * km], mesh_.dx);
      vtx[nc - 1] = 0.0;
      for (int i = 1; i <= n_moments_; ++i) alpha_loc[i - 1] = u.alpha(i);
      const StateVec lv =
          apply_coupling_primitives(u.h(), u.velocity(), alpha_loc, n_moments_, vtx);
      const double wq = rule_.weight(q) * 0.5 * mesh_.dx;
      const double* phi = &phi_[q * km];
      double* cell = out.cell_data(j);
      for (int c = 0; c < nc; ++c) {
        const double a = -wq * lv[c];
        double* row = cell + c * km;
        for (int m = 0; m < km; ++m) row[m] += a * phi[m];
      }
    }
  }

  // Interfaces: modified flux and path correction. Free boundaries use a
  // constant ghost cell built from the boundary cell's averages (see the
  // still scheme for the rationale); its height continues from the adjacent
  // cached trace height.
  const int last = mesh_.nx - 1;
  auto ghost_state = [&](int j, int trace_slot, EquilibriumState& vg) {
    StateVec avg(nc);
    for (int c = 0; c < nc; ++c) avg[c] = v.cell_average(j, c);
    vg = EquilibriumState(avg);
    const double seed = heights_[j * nodes_per_cell() + trace_slot];
    double h;
    try {
      h = std::isnan(seed)
              ? recover_height(vg, g_, branch_map_(mesh_.center(j)))
              : recover_height_seeded(vg, g_, seed);
    } catch (const std::exception& e) {
      rethrow_with_cell(e, j, mesh_.center(j));
    }
    return assemble_conservative(vg, h);
  };
  for (int i = 0; i <= mesh_.nx; ++i) {
    EquilibriumState vl, vr;
    ConservativeState ul, ur;
    if (i > 0) {
      vl = EquilibriumState(eval_table(v, i - 1, phi_r_.data()));
      ul = recover_at(vl, i - 1, nq + 1);
    } else if (bc_ == BoundaryKind::periodic) {
      vl = EquilibriumState(eval_table(v, last, phi_r_.data()));
      ul = recover_at(vl, last, nq + 1);
    } else {
      ul = ghost_state(0, nq, vl);
    }
    if (i < mesh_.nx) {
      vr = EquilibriumState(eval_table(v, i, phi_l_.data()));
      ur = recover_at(vr, i, nq);
    } else if (bc_ == BoundaryKind::periodic) {
      vr = EquilibriumState(eval_table(v, 0, phi_l_.data()));
      ur = recover_at(vr, 0, nq);
    } else {
      ur = ghost_state(last, nq + 1, vr);
    }

    StateVec flux_l, flux_r, fmod, gphi;
    try {
      flux_l = physical_flux(ul, g_);
      flux_r = physical_flux(ur, g_);
      const Reconstruction recon = hydrostatic_reconstruct(ul, vl, ur, vr, g_);
      fmod = flux_l;
      fmod += flux_r;
      fmod *= 0.5;
      for (int c = 0; c < nc; ++c) {
        fmod[c] -= 0.5 * alpha * (recon.right.q[c] - recon.left.q[c]);
      }
      gphi = moving_path_correction(ul, vl, ur, vr, flux_l, flux_r);
    } catch (const std::exception& e) {
      rethrow_with_cell(e, std::min(i, last), mesh_.interface(i));
    }

    if (i > 0) {
      double* cell = out.cell_data(i - 1);
      for (int c = 0; c < nc; ++c) {
        const double a = flux_l[c] - fmod[c] - 0.5 * gphi[c];
        double* row = cell + c * km;
        for (int m = 0; m < km; ++m) row[m] += a * phi_r_[m];
      }
    }
    if (i < mesh_.nx) {
      double* cell = out.cell_data(i);
      for (int c = 0; c < nc; ++c) {
        const double a = fmod[c] - flux_r[c] - 0.5 * gphi[c];
        double* row = cell + c * km;
        for (int m = 0; m < km; ++m) row[m] += a * phi_l_[m];
      }
    }
  }

  // The topography row is identically zero: b is time-independent.
  for (int j = 0; j < mesh_.nx; ++j) {
    double* row = out.cell_data(j) + (nc - 1) * km;
    for (int m = 0; m < km; ++m) row[m] = 0.0;
  }
  return out;
}

}  // namespace swlme
