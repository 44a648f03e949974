#include "swlme/model.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

namespace swlme {

namespace {

void require_depth(double h, const char* where) {
  if (!(h > 0.0)) {
    std::ostringstream os;
    os << where << ": non-positive water depth h = " << h;
    throw AdmissibilityError(os.str());
  }
}

// Squared celerity g h + sum_i 3 a_i^2/(2i+1).
double celerity_sq(const ConservativeState& u, double g) {
  double c2 = g * u.h();
  for (int i = 1; i <= u.n_moments(); ++i) {
    const double a = u.alpha(i);
    c2 += 3.0 * a * a / (2.0 * i + 1.0);
  }
  return c2;
}

// The height quartic q(h) = c4 h^4 + g h^3 + (g b - E) h^2 + m_a^2/2.
struct HeightQuartic {
  double c4, c3, c2, c0;

  static HeightQuartic from(const EquilibriumState& v, double g) {
    double c4 = 0.0;
    for (int i = 1; i <= v.n_moments(); ++i) {
      const double r = v.scaled_moment(i);
      c4 += 1.5 * r * r / (2.0 * i + 1.0);
    }
    const double ma = v.discharge();
    return {c4, g, g * v.bottom() - v.energy(), 0.5 * ma * ma};
  }

  double value(double h) const {
    return ((c4 * h + c3) * h + c2) * h * h + c0;
  }
  double derivative(double h) const {
    return ((4.0 * c4 * h + 3.0 * c3) * h + 2.0 * c2) * h;
  }
  // Magnitude of the terms at h; tolerance reference for residual checks.
  double scale(double h) const {
    const double h2 = h * h;
    return std::abs(c4) * h2 * h2 + c3 * h2 * h + std::abs(c2) * h2 + c0;
  }
  // Positive stationary point of q; branches meet here. Requires c2 < 0.
  double critical() const {
    const double d = -c2;  // E - g b > 0
    return 4.0 * d / (3.0 * c3 + std::sqrt(9.0 * c3 * c3 + 32.0 * c4 * d));
  }
};

// Safeguarded Newton inside a sign-change bracket [xlo, xhi], warm-started
// at x0. Falls back to bisection whenever the Newton step leaves the bracket
// or fails to shrink.
double solve_bracketed(const HeightQuartic& q, double xlo, double xhi, double x0) {
  double flo = q.value(xlo);
  double fhi = q.value(xhi);
  if (flo == 0.0) return xlo;
  if (fhi == 0.0) return xhi;

  double xl = xlo, xh = xhi;
  if (flo > 0.0) std::swap(xl, xh);  // orient so q(xl) < 0 < q(xh)

  double rts = std::clamp(x0, std::min(xlo, xhi), std::max(xlo, xhi));
  double dxold = std::abs(xhi - xlo);
  double dx = dxold;
  double f = q.value(rts);
  double df = q.derivative(rts);

  for (int it = 0; it < 200; ++it) {
    if (std::abs(f) <= 1e-15 * q.scale(rts)) return rts;
    const bool newton_bad =
        (((rts - xh) * df - f) * ((rts - xl) * df - f) > 0.0) ||
        (std::abs(2.0 * f) > std::abs(dxold * df));
    if (newton_bad) {
      dxold = dx;
      dx = 0.5 * (xh - xl);
      rts = xl + dx;
      if (rts == xl) return rts;
    } else {
      dxold = dx;
      dx = f / df;
      const double prev = rts;
      rts -= dx;
      if (rts == prev) return rts;
    }
    f = q.value(rts);
    df = q.derivative(rts);
    if (f < 0.0) xl = rts;
    else xh = rts;
  }
  throw ConvergenceError("height recovery: bracketed Newton did not converge");
}

// Relative slack for accepting a grazing double root as sonic.
constexpr double kRootExistTol = 1e-11;

struct BranchLayout {
  double hc;       // critical height
  double qc;       // q(hc)
  double tol;      // existence tolerance at hc
};

BranchLayout analyze(const HeightQuartic& q, const EquilibriumState& v, double g) {
  if (!(v.energy() > g * v.bottom())) {
    std::ostringstream os;
    os << "equilibrium state inadmissible: E = " << v.energy()
       << " does not exceed g b = " << g * v.bottom();
    throw RootError(os.str(), q.value(0.0), 0.0);
  }
  const double hc = q.critical();
  return {hc, q.value(hc), kRootExistTol * q.scale(hc)};
}

double solve_subcritical(const HeightQuartic& q, const EquilibriumState& v,
                         double g, const BranchLayout& lay, double seed) {
  const double h_energy = (v.energy() - g * v.bottom()) / g;  // q >= 0 there
  return solve_bracketed(q, lay.hc, h_energy, seed);
}

double solve_supercritical(const HeightQuartic& q, const EquilibriumState& v,
                           double g, const BranchLayout& lay, double seed) {
  if (v.discharge() == 0.0) {
    throw RootError("supercritical branch degenerates to h = 0 for zero discharge",
                    lay.qc, lay.hc);
  }
  double hlo = 0.5 * lay.hc;
  int guard = 0;
  while (q.value(hlo) <= 0.0) {
    hlo *= 0.5;
    if (++guard > 2000) {
      throw ConvergenceError("height recovery: no positive bracket below critical height");
    }
  }
  if (seed <= 0.0) {
    seed = std::abs(v.discharge()) / std::sqrt(2.0 * (v.energy() - g * v.bottom()));
  }
  return solve_bracketed(q, hlo, lay.hc, seed);
}

}  // namespace

//-----------------------------------------------------------------------------
// Fluxes and wave speeds
//-----------------------------------------------------------------------------

StateVec physical_flux(const ConservativeState& u, double g) {
  require_depth(u.h(), "physical_flux");
  const int n = u.n_moments();
  const double um = u.velocity();
  StateVec f(n + 3);
  f[0] = u.discharge();
  double momentum = u.discharge() * um + 0.5 * g * u.h() * u.h();
  for (int i = 1; i <= n; ++i) {
    const double a = u.alpha(i);
    momentum += u.h() * a * a / (2.0 * i + 1.0);
    f[1 + i] = 2.0 * u.discharge() * a;
  }
  f[1] = momentum;
  f[n + 2] = 0.0;
  return f;
}

StateVec surface_flux(const SurfaceState& w, double b, double g) {
  const double h = w.depth(b);
  if (!(h > 0.0)) {
    std::ostringstream os;
    os << "surface_flux: dry state, H = " << w.surface() << " <= b = " << b;
    throw AdmissibilityError(os.str());
  }
  const int n = w.n_moments();
  StateVec f(n + 2);
  f[0] = w.discharge();
  double momentum = w.discharge() * w.discharge() / h + 0.5 * g * w.surface() * w.surface();
  for (int i = 1; i <= n; ++i) {
    const double mi = w.moment(i);
    momentum += mi * mi / ((2.0 * i + 1.0) * h);
    f[1 + i] = 2.0 * w.discharge() * mi / h;
  }
  f[1] = momentum;
  return f;
}

StateVec eigenvalues(const ConservativeState& u, double g) {
  require_depth(u.h(), "eigenvalues");
  const int n = u.n_moments();
  const double um = u.velocity();
  const double c = std::sqrt(celerity_sq(u, g));
  StateVec lam(n + 2);
  lam[0] = um - c;
  for (int i = 1; i <= n; ++i) lam[i] = um;
  lam[n + 1] = um + c;
  return lam;
}

double max_wave_speed(const ConservativeState& u, double g) {
  require_depth(u.h(), "max_wave_speed");
  return std::abs(u.velocity()) + std::sqrt(celerity_sq(u, g));
}

double max_wave_speed(const SurfaceState& w, double b, double g) {
  const double h = w.depth(b);
  if (!(h > 0.0)) throw AdmissibilityError("max_wave_speed: dry state");
  const double um = w.discharge() / h;
  double c2 = g * h;
  for (int i = 1; i <= w.n_moments(); ++i) {
    const double a = w.moment(i) / h;
    c2 += 3.0 * a * a / (2.0 * i + 1.0);
  }
  return std::abs(um) + std::sqrt(c2);
}

//-----------------------------------------------------------------------------
// Quasilinear matrices
//-----------------------------------------------------------------------------

Eigen::MatrixXd jacobian(const ConservativeState& u, double g) {
  require_depth(u.h(), "jacobian");
  const int n = u.n_moments();
  const double um = u.velocity();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 2, n + 2);
  a(0, 1) = 1.0;
  double a10 = g * u.h() - um * um;
  for (int i = 1; i <= n; ++i) {
    const double ai = u.alpha(i);
    a10 -= ai * ai / (2.0 * i + 1.0);
    a(1, 1 + i) = 2.0 * ai / (2.0 * i + 1.0);
    a(1 + i, 0) = -2.0 * um * ai;
    a(1 + i, 1) = 2.0 * ai;
    a(1 + i, 1 + i) = um;
  }
  a(1, 0) = a10;
  a(1, 1) = 2.0 * um;
  return a;
}

Eigen::MatrixXd extended_jacobian(const ConservativeState& u, double g) {
  const int n = u.n_moments();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 3, n + 3);
  a.topLeftCorner(n + 2, n + 2) = jacobian(u, g);
  a(1, n + 2) = g * u.h();
  return a;
}

Eigen::MatrixXd nonconservative_extended(const ConservativeState& u, double g) {
  const int n = u.n_moments();
  const double um = u.velocity();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 3, n + 3);
  m(1, n + 2) = g * u.h();
  for (int i = 1; i <= n; ++i) m(1 + i, 1 + i) = -um;
  return m;
}

Eigen::MatrixXd nonconservative_surface(const SurfaceState& w, double b, double g) {
  const int n = w.n_moments();
  const double um = w.discharge() / w.depth(b);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 2, n + 2);
  m(1, 0) = -g * b;
  for (int i = 1; i <= n; ++i) m(1 + i, 1 + i) = -um;
  return m;
}

Eigen::MatrixXd coupling_matrix(const ConservativeState& u) {
  require_depth(u.h(), "coupling_matrix");
  const int n = u.n_moments();
  const double h = u.h();
  const double um = u.velocity();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n + 3, n + 3);
  l(0, 1) = 1.0;
  l(1, 0) = h;
  l(1, 1) = um;
  for (int i = 1; i <= n; ++i) {
    const double ai = u.alpha(i);
    l(1, 1 + i) = -h * h * ai / (2.0 * i + 1.0);
    l(1 + i, 1) = 2.0 * ai;
    l(1 + i, 1 + i) = h * h * um;
  }
  l(n + 2, n + 2) = 1.0;
  return l;
}

StateVec apply_coupling_primitives(double h, double um, const double* alpha,
                                   int n_moments, const StateVec& x) {
  StateVec out(n_moments + 3);
  out[0] = x[1];
  double row1 = h * x[0] + um * x[1];
  const double h2 = h * h;
  for (int i = 1; i <= n_moments; ++i) {
    const double ai = alpha[i - 1];
    row1 -= h2 * ai / (2.0 * i + 1.0) * x[1 + i];
    out[1 + i] = 2.0 * ai * x[1] + h2 * um * x[1 + i];
  }
  out[1] = row1;
  out[n_moments + 2] = x[n_moments + 2];
  return out;
}

StateVec apply_coupling_matrix(const ConservativeState& u, const StateVec& x) {
  const int n = u.n_moments();
  double alpha[kMaxMoments];
  for (int i = 1; i <= n; ++i) alpha[i - 1] = u.alpha(i);
  return apply_coupling_primitives(u.h(), u.velocity(), alpha, n, x);
}

StateVec apply_surface_coupling(const SurfaceState& w, double b, double g,
                                const StateVec& wx) {
  const int n = w.n_moments();
  const double um = w.discharge() / w.depth(b);
  StateVec out(n + 2);
  out[0] = 0.0;
  out[1] = -g * b * wx[0];
  for (int i = 1; i <= n; ++i) out[1 + i] = -um * wx[1 + i];
  return out;
}

//-----------------------------------------------------------------------------
// Variable transforms and the equilibrium quartic
//-----------------------------------------------------------------------------

EquilibriumState to_equilibrium(const ConservativeState& u, double g) {
  require_depth(u.h(), "to_equilibrium");
  const int n = u.n_moments();
  const double um = u.velocity();
  EquilibriumState v(n);
  double energy = 0.5 * um * um + g * (u.h() + u.bottom());
  for (int i = 1; i <= n; ++i) {
    const double ai = u.alpha(i);
    energy += 1.5 * ai * ai / (2.0 * i + 1.0);
    v.scaled_moment(i) = u.moment(i) / (u.h() * u.h());
  }
  v.energy() = energy;
  v.discharge() = u.discharge();
  v.bottom() = u.bottom();
  return v;
}

std::pair<double, double> quartic_residual(double h, const EquilibriumState& v,
                                           double g) {
  const HeightQuartic q = HeightQuartic::from(v, g);
  return {q.value(h), q.derivative(h)};
}

double critical_height(const EquilibriumState& v, double g) {
  const HeightQuartic q = HeightQuartic::from(v, g);
  return analyze(q, v, g).hc;
}

double recover_height(const EquilibriumState& v, double g, FlowBranch branch) {
  const HeightQuartic q = HeightQuartic::from(v, g);
  const BranchLayout lay = analyze(q, v, g);
  if (lay.qc > 0.0) {
    if (lay.qc <= lay.tol) return lay.hc;  // grazing double root
    std::ostringstream os;
    os << "equilibrium state inadmissible: q(h) > 0 everywhere, min q = " << lay.qc;
    throw RootError(os.str(), lay.qc, lay.hc);
  }
  switch (branch) {
    case FlowBranch::critical:
      return lay.hc;
    case FlowBranch::subcritical:
      return solve_subcritical(q, v, g, lay, (v.energy() - g * v.bottom()) / g);
    case FlowBranch::supercritical:
      return solve_supercritical(q, v, g, lay, -1.0);
  }
  throw SolverError("recover_height: unreachable branch");
}

double recover_height_seeded(const EquilibriumState& v, double g, double seed) {
  const HeightQuartic q = HeightQuartic::from(v, g);
  // Fast path: the seed is already a root to solver tolerance.
  if (seed > 0.0 && std::abs(q.value(seed)) <= 1e-15 * q.scale(seed)) return seed;
  const BranchLayout lay = analyze(q, v, g);
  if (lay.qc > 0.0) {
    if (lay.qc <= lay.tol) return lay.hc;
    std::ostringstream os;
    os << "equilibrium state inadmissible: q(h) > 0 everywhere, min q = " << lay.qc;
    throw RootError(os.str(), lay.qc, lay.hc);
  }
  if (seed >= lay.hc) return solve_subcritical(q, v, g, lay, seed);
  return solve_supercritical(q, v, g, lay, seed);
}

ConservativeState assemble_conservative(const EquilibriumState& v, double h) {
  const int n = v.n_moments();
  ConservativeState u(n);
  u.h() = h;
  u.discharge() = v.discharge();
  for (int i = 1; i <= n; ++i) u.moment(i) = v.scaled_moment(i) * h * h;
  u.bottom() = v.bottom();
  return u;
}

ConservativeState to_conservative(const EquilibriumState& v, double g,
                                  FlowBranch branch) {
  return assemble_conservative(v, recover_height(v, g, branch));
}

ConservativeState to_conservative_seeded(const EquilibriumState& v, double g,
                                         double seed) {
  return assemble_conservative(v, recover_height_seeded(v, g, seed));
}

StateVec height_gradient(const EquilibriumState& v, double h, double g) {
  const HeightQuartic q = HeightQuartic::from(v, g);
  const double dq_dh = q.derivative(h);
  if (std::abs(dq_dh) < 1e-8 * g * h * h) {
    std::ostringstream os;
    os << "height_gradient: sonic state, |dq/dh| = " << std::abs(dq_dh)
       << " below threshold at h = " << h;
    throw SonicStateError(os.str());
  }
  const int n = v.n_moments();
  const double h2 = h * h;
  StateVec grad(n + 3);
  grad[0] = -(-h2) / dq_dh;             // d h / d E
  grad[1] = -v.discharge() / dq_dh;     // d h / d m_a
  for (int i = 1; i <= n; ++i) {
    grad[1 + i] = -(3.0 * v.scaled_moment(i) * h2 * h2 / (2.0 * i + 1.0)) / dq_dh;
  }
  grad[n + 2] = -(g * h2) / dq_dh;      // d h / d b
  return grad;
}

//-----------------------------------------------------------------------------
// Vertical velocity basis
//-----------------------------------------------------------------------------

// The repeated differentiation collapses to shifted Legendre polynomials:
// phi_i(z) = P_i(1 - 2z). The three-term recurrence keeps intermediate
// values O(1), unlike the monomial coefficients (which reach ~1e13 at
// i = 16 and lose half the mantissa to cancellation).
double vertical_basis_value(int i, double zeta) {
  if (i < 0 || i > kMaxMoments) {
    throw SolverError("vertical_basis_value: order out of range");
  }
  const double y = 1.0 - 2.0 * zeta;
  double p0 = 1.0, p1 = y;
  if (i == 0) return 1.0;
  for (int k = 2; k <= i; ++k) {
    const double p2 = ((2.0 * k - 1.0) * y * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double velocity_profile(const ConservativeState& u, double zeta) {
  require_depth(u.h(), "velocity_profile");
  double vel = u.velocity();
  for (int i = 1; i <= u.n_moments(); ++i) {
    vel += u.alpha(i) * vertical_basis_value(i, zeta);
  }
  return vel;
}

}  // namespace swlme
