#pragma once

#include <functional>
#include <vector>

#include "swlme/pcdg.hpp"

// SSP-RK3 time stepping with CFL control, and the per-cell Newton solve that
// inverts the nonlinear modal map u(v) at each stage of the moving scheme.

namespace swlme {

struct NewtonOptions {
  /// Max-norm residual tolerance of the stage solve, relative to the cell's
  /// largest target moment.
  double tol = 1e-10;
  int max_iter = 50;
};

struct NewtonStats {
  long long solves = 0;
  long long total_iterations = 0;
  int max_iterations = 0;
  long long restarts = 0;

  void record(int iters) {
    ++solves;
    total_iterations += iters;
    if (iters > max_iterations) max_iterations = iters;
  }
};

/// dt = cfl dx / alpha. Throws on a degenerate (zero) wave speed.
double cfl_dt(double alpha, const Mesh& mesh, double cfl);

/// Generic SSP-RK3 update for y' = f(y) on a flat coefficient vector, the
/// Shu-Osher convex combination of three forward Euler steps. post_stage runs
/// after every stage (slope limiting).
void ssp_rk3_flat(std::vector<double>& y, double dt,
                  const std::function<std::vector<double>(const std::vector<double>&)>& f,
                  const std::function<void(std::vector<double>&)>& post_stage = {});

/// One SSP-RK3 step of the still scheme; stages are explicit modal updates.
void rk3_step_still(const StillScheme& scheme, ModalField& w, double dt,
                    const std::function<void(ModalField&)>& post_stage = {});

/// One SSP-RK3 step of the moving scheme. Each stage assembles the target
/// moments and inverts the modal map with a per-cell Newton solve; the
/// discharge row is read off directly and the topography row is copied
/// bit-exactly.
void rk3_step_moving(MovingScheme& scheme, ModalField& v, double dt,
                     const NewtonOptions& opts, NewtonStats* stats = nullptr,
                     const std::function<void(ModalField&)>& post_stage = {});

/// Moment-matching initial guess for the stage Newton iteration: solve
/// int u_tilde phi = R (a linear solve against the identity mass matrix), map
/// the nodal values through the equilibrium transform, and L2-project the
/// result. Writes the E and a_i/h rows of cell j in v_guess; returns false
/// (leaving v_guess untouched) when a nodal height is non-positive.
bool initial_guess(MovingScheme& scheme, int cell, const ModalField& targets,
                   ModalField& v_guess);

/// Solve int u(v) phi = R for one cell's modal coefficients of E and a_i/h,
/// with the discharge coefficients already placed in v_out and b untouched.
/// Returns the iteration count.
int newton_stage_solve(MovingScheme& scheme, int cell, const ModalField& targets,
                       ModalField& v_out, const NewtonOptions& opts,
                       NewtonStats* stats = nullptr);

}  // namespace swlme
