#include "swlme/timeint.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <sstream>

namespace swlme {

double cfl_dt(double alpha, const Mesh& mesh, double cfl) {
  if (!(alpha > 0.0)) {
    throw SolverError("cfl_dt: degenerate global wave speed");
  }
  return cfl * mesh.dx / alpha;
}

void ssp_rk3_flat(std::vector<double>& y, double dt,
                  const std::function<std::vector<double>(const std::vector<double>&)>& f,
                  const std::function<void(std::vector<double>&)>& post_stage) {
  const std::size_t n = y.size();
  std::vector<double> y0 = y;

  std::vector<double> k = f(y);
  for (std::size_t i = 0; i < n; ++i) y[i] = y0[i] + dt * k[i];
  if (post_stage) post_stage(y);

  k = f(y);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = 0.75 * y0[i] + 0.25 * (y[i] + dt * k[i]);
  }
  if (post_stage) post_stage(y);

  k = f(y);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = y0[i] / 3.0 + 2.0 / 3.0 * (y[i] + dt * k[i]);
  }
  if (post_stage) post_stage(y);
}

void rk3_step_still(const StillScheme& scheme, ModalField& w, double dt,
                    const std::function<void(ModalField&)>& post_stage) {
  const double scale = 2.0 / scheme.mesh().dx;
  ModalField work(w.nx(), w.ncomp(), w.degree());

  auto f = [&](const std::vector<double>& y) {
    work.data() = y;
    const double alpha = scheme.max_speed(work);
    ModalField k = scheme.rhs(work, alpha);
    std::vector<double> out = std::move(k.data());
    for (double& v : out) v *= scale;
    return out;
  };
  std::function<void(std::vector<double>&)> post;
  if (post_stage) {
    post = [&](std::vector<double>& y) {
      work.data() = std::move(y);
      post_stage(work);
      y = std::move(work.data());
      work.data().resize(y.size());
    };
  }
  std::vector<double> y = std::move(w.data());
  ssp_rk3_flat(y, dt, f, post);
  w.data() = std::move(y);
}

//-----------------------------------------------------------------------------
// Moving-scheme stage solver
//-----------------------------------------------------------------------------

namespace {

// Per-step workspace for the nonlinear stage solves of one mesh/scheme.
class StageSolver {
 public:
  StageSolver(MovingScheme& scheme, const NewtonOptions& opts, NewtonStats* stats)
      : scheme_(scheme), opts_(opts), stats_(stats),
        rule_(scheme.volume_rule()), km_(scheme.degree() + 1),
        n_(scheme.n_moments()), unknowns_((n_ + 1) * km_) {
    phi_.resize(static_cast<std::size_t>(rule_.size()) * km_);
    for (int q = 0; q < rule_.size(); ++q) {
      basis::values(scheme.degree(), rule_.node(q), &phi_[q * km_]);
    }
    jac_.resize(unknowns_, unknowns_);
    res_.resize(unknowns_);
    x_.resize(unknowns_);
  }

  // Component index of unknown block ci (0 = energy, i = scaled moment i).
  int comp_of(int ci) const { return ci == 0 ? 0 : 1 + ci; }

  void solve_cell(int j, const ModalField& targets, ModalField& v) {
    load_unknowns(v, j);
    double res_norm = residual(j, targets, v);
    // The tolerance is relative to the cell's moment scale: the residual
    // lives in int u phi units, which shrink with dx, while the induced
    // coefficient error grows with 2/dx.
    const double scale_r = target_scale(j, targets);
    const double tol = opts_.tol * scale_r;
    const double accept = std::max(tol, 64.0 * kEps * scale_r);

    int growth = 0;
    bool restarted = false;
    double prev_norm = res_norm;
    int it = 0;
    for (; it < opts_.max_iter; ++it) {
      if (res_norm <= tol) break;
      assemble_jacobian(j, v);
      Eigen::VectorXd delta = jac_.partialPivLu().solve(res_);
      const double step = delta.lpNorm<Eigen::Infinity>();
      x_ -= delta;
      store_unknowns(v, j);
      res_norm = residual(j, targets, v);

      if (step <= 16.0 * kEps * (1.0 + x_.lpNorm<Eigen::Infinity>()) &&
          res_norm <= accept) {
        ++it;
        break;  // stalled at rounding level with an acceptable residual
      }
      if (res_norm > prev_norm) {
        if (++growth >= 3) {
          if (!restarted && initial_guess(scheme_, j, targets, v)) {
            restarted = true;
            if (stats_) ++stats_->restarts;
            load_unknowns(v, j);
            res_norm = residual(j, targets, v);
            growth = 0;
          } else {
            fail(j, "residual diverged");
          }
        }
      } else {
        growth = 0;
      }
      prev_norm = res_norm;
    }
    if (res_norm > tol && res_norm > accept) fail(j, "no convergence");
    if (stats_) stats_->record(it);
  }

 private:
  static constexpr double kEps = std::numeric_limits<double>::epsilon();

  void fail(int j, const char* why) {
    std::ostringstream os;
    os << "stage solve failed in cell " << j << ": " << why
       << " after " << opts_.max_iter << " iterations";
    throw ConvergenceError(os.str());
  }

  void load_unknowns(const ModalField& v, int j) {
    for (int ci = 0; ci <= n_; ++ci) {
      for (int m = 0; m < km_; ++m) x_[ci * km_ + m] = v.coeff(j, comp_of(ci), m);
    }
  }
  void store_unknowns(ModalField& v, int j) {
    for (int ci = 0; ci <= n_; ++ci) {
      for (int m = 0; m < km_; ++m) v.coeff(j, comp_of(ci), m) = x_[ci * km_ + m];
    }
  }

  double target_scale(int j, const ModalField& targets) const {
    double s = 0.0;
    for (int ci = 0; ci <= n_; ++ci) {
      for (int m = 0; m < km_; ++m) {
        s = std::max(s, std::abs(targets.coeff(j, comp_of(ci), m)));
      }
    }
    return std::max(s, 1e-30);
  }

  EquilibriumState eval_node(const ModalField& v, int j, const double* phi) const {
    StateVec out(v.ncomp());
    const double* cell = v.cell_data(j);
    for (int c = 0; c < v.ncomp(); ++c) {
      double acc = 0.0;
      const double* coeffs = cell + c * km_;
      for (int m = 0; m < km_; ++m) acc += coeffs[m] * phi[m];
      out[c] = acc;
    }
    return EquilibriumState(out);
  }

  // Residual int u(v) phi - R on the nonlinear rows; returns the max norm.
  double residual(int j, const ModalField& targets, const ModalField& v) {
    res_.setZero();
    const double wdx = 0.5 * scheme_.mesh().dx;
    for (int q = 0; q < rule_.size(); ++q) {
      const double* phi = &phi_[q * km_];
      EquilibriumState vp = eval_node(v, j, phi);
      const ConservativeState u = scheme_.recover_at(vp, j, q);
      const double wq = rule_.weight(q) * wdx;
      for (int ci = 0; ci <= n_; ++ci) {
        const double uc = wq * u.q[comp_of(ci)];
        for (int m = 0; m < km_; ++m) res_[ci * km_ + m] += uc * phi[m];
      }
    }
    for (int ci = 0; ci <= n_; ++ci) {
      for (int m = 0; m < km_; ++m) {
        res_[ci * km_ + m] -= targets.coeff(j, comp_of(ci), m);
      }
    }
    return res_.lpNorm<Eigen::Infinity>();
  }

  void assemble_jacobian(int j, const ModalField& v) {
    jac_.setZero();
    const double g = scheme_.gravity();
    const double wdx = 0.5 * scheme_.mesh().dx;
    for (int q = 0; q < rule_.size(); ++q) {
      const double* phi = &phi_[q * km_];
      EquilibriumState vp = eval_node(v, j, phi);
      const ConservativeState u = scheme_.recover_at(vp, j, q);
      StateVec grad;
      try {
        grad = height_gradient(vp, u.h(), g);
      } catch (const SonicStateError& e) {
        std::ostringstream os;
        os << e.what() << " (stage solve, cell " << j << ")";
        throw SonicStateError(os.str());
      }
      const double h = u.h();
      const double wq = rule_.weight(q) * wdx;
      // d u_row / d unknown-block at this node
      for (int ci = 0; ci <= n_; ++ci) {
        for (int cj = 0; cj <= n_; ++cj) {
          double d;
          const double dh = cj == 0 ? grad[0] : grad[1 + cj];
          if (ci == 0) {
            d = dh;  // u_row = h
          } else {
            const double ri = vp.scaled_moment(ci);
            d = 2.0 * ri * h * dh;  // u_row = r_i h^2
            if (cj == ci) d += h * h;
          }
          const double w = wq * d;
          for (int m = 0; m < km_; ++m) {
            for (int nmode = 0; nmode < km_; ++nmode) {
              jac_(ci * km_ + m, cj * km_ + nmode) += w * phi[m] * phi[nmode];
            }
          }
        }
      }
    }
  }

  MovingScheme& scheme_;
  const NewtonOptions& opts_;
  NewtonStats* stats_;
  const GaussRule& rule_;
  int km_;
  int n_;
  int unknowns_;
  std::vector<double> phi_;
  Eigen::MatrixXd jac_;
  Eigen::VectorXd res_;
  Eigen::VectorXd x_;
};

}  // namespace

bool initial_guess(MovingScheme& scheme, int cell, const ModalField& targets,
                   ModalField& v_guess) {
  const GaussRule& rule = scheme.volume_rule();
  const int km = scheme.degree() + 1;
  const int n = scheme.n_moments();
  const int nc = n + 3;
  const double g = scheme.gravity();
  const double inv_mass = 2.0 / scheme.mesh().dx;

  // Moment matching: the mass matrix is (dx/2) I, so the conservative modal
  // coefficients are read off the targets directly.
  std::vector<double> phi(km);
  std::vector<double> e_vals(rule.size()), r_vals(static_cast<std::size_t>(n) * rule.size());
  for (int q = 0; q < rule.size(); ++q) {
    basis::values(scheme.degree(), rule.node(q), phi.data());
    double uh = 0.0, uma = 0.0;
    StateVec umi(n > 0 ? n : 1);
    for (int m = 0; m < km; ++m) {
      uh += inv_mass * targets.coeff(cell, 0, m) * phi[m];
      uma += inv_mass * targets.coeff(cell, 1, m) * phi[m];
    }
    for (int i = 1; i <= n; ++i) {
      double acc = 0.0;
      for (int m = 0; m < km; ++m) acc += inv_mass * targets.coeff(cell, 1 + i, m) * phi[m];
      umi[i - 1] = acc;
    }
    double b = 0.0;
    for (int m = 0; m < km; ++m) b += v_guess.coeff(cell, nc - 1, m) * phi[m];
    if (!(uh > 0.0)) return false;

    double energy = 0.5 * (uma / uh) * (uma / uh) + g * (uh + b);
    for (int i = 1; i <= n; ++i) {
      const double ai = umi[i - 1] / uh;
      energy += 1.5 * ai * ai / (2.0 * i + 1.0);
      r_vals[(i - 1) * rule.size() + q] = umi[i - 1] / (uh * uh);
    }
    e_vals[q] = energy;
  }

  // L2-project the nodal equilibrium values back onto the modal space.
  for (int m = 0; m < km; ++m) {
    v_guess.coeff(cell, 0, m) = 0.0;
    for (int i = 1; i <= n; ++i) v_guess.coeff(cell, 1 + i, m) = 0.0;
  }
  for (int q = 0; q < rule.size(); ++q) {
    basis::values(scheme.degree(), rule.node(q), phi.data());
    for (int m = 0; m < km; ++m) {
      v_guess.coeff(cell, 0, m) += rule.weight(q) * e_vals[q] * phi[m];
      for (int i = 1; i <= n; ++i) {
        v_guess.coeff(cell, 1 + i, m) +=
            rule.weight(q) * r_vals[(i - 1) * rule.size() + q] * phi[m];
      }
    }
  }
  return true;
}

int newton_stage_solve(MovingScheme& scheme, int cell, const ModalField& targets,
                       ModalField& v_out, const NewtonOptions& opts,
                       NewtonStats* stats) {
  NewtonStats local;
  StageSolver solver(scheme, opts, &local);
  solver.solve_cell(cell, targets, v_out);
  if (stats) {
    stats->solves += local.solves;
    stats->total_iterations += local.total_iterations;
    stats->max_iterations = std::max(stats->max_iterations, local.max_iterations);
    stats->restarts += local.restarts;
  }
  return local.max_iterations;
}

void rk3_step_moving(MovingScheme& scheme, ModalField& v, double dt,
                     const NewtonOptions& opts, NewtonStats* stats,
                     const std::function<void(ModalField&)>& post_stage) {
  const Mesh& mesh = scheme.mesh();
  const int nc = scheme.ncomp();
  const int km = scheme.degree() + 1;
  const double inv_mass = 2.0 / mesh.dx;
  StageSolver solver(scheme, opts, stats);

  const ModalField u0 = scheme.conservative_moments(v);

  auto run_stage = [&](const ModalField& v_in, double a0, double a1,
                       ModalField& v_next) {
    const double alpha = scheme.max_speed(v_in);
    ModalField targets = scheme.rhs(v_in, alpha);
    // targets = a0 * U0 + a1 * (U(v_in) + dt * RHS(v_in))
    const ModalField u_in = scheme.conservative_moments(v_in);
    for (std::size_t i = 0; i < targets.data().size(); ++i) {
      targets.data()[i] = a0 * u0.data()[i] + a1 * (u_in.data()[i] + dt * targets.data()[i]);
    }
    v_next = v_in;  // Newton guess: previous stage; b row carried over
    for (int j = 0; j < mesh.nx; ++j) {
      for (int m = 0; m < km; ++m) {
        v_next.coeff(j, 1, m) = inv_mass * targets.coeff(j, 1, m);
      }
      solver.solve_cell(j, targets, v_next);
      // b is time-independent: keep the original coefficients bit-exactly.
      for (int m = 0; m < km; ++m) v_next.coeff(j, nc - 1, m) = v.coeff(j, nc - 1, m);
    }
    if (post_stage) post_stage(v_next);
  };

  ModalField v1(mesh.nx, nc, scheme.degree());
  ModalField v2(mesh.nx, nc, scheme.degree());
  ModalField v3(mesh.nx, nc, scheme.degree());
  run_stage(v, 0.0, 1.0, v1);
  run_stage(v1, 0.75, 0.25, v2);
  run_stage(v2, 1.0 / 3.0, 2.0 / 3.0, v3);
  v = std::move(v3);
}

}  // namespace swlme
