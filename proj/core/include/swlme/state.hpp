#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace swlme {

/// Hard cap on the moment order. Vertical basis polynomials are
/// precomputed up to this order, and StateVec sizes its inline storage
/// from it (components = N + 3 at most).
inline constexpr int kMaxMoments = 16;
inline constexpr int kMaxComponents = kMaxMoments + 3;

//-----------------------------------------------------------------------------
// Errors
//-----------------------------------------------------------------------------

/// Base class for all numerical failures raised by the solver.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A state violated a physical admissibility requirement (h <= 0, dry cell).
struct AdmissibilityError : SolverError {
  using SolverError::SolverError;
};

/// The equilibrium quartic has no positive root on the requested branch,
/// or the iteration failed to converge.
struct RootError : SolverError {
  RootError(const std::string& what, double q_at_critical, double h_critical)
      : SolverError(what), q_at_critical(q_at_critical), h_critical(h_critical) {}
  double q_at_critical = 0.0;  ///< residual at the branch-separating height
  double h_critical = 0.0;     ///< height where dq/dh = 0
};

/// dq/dh vanished where a derivative of the height recovery was required.
struct SonicStateError : SolverError {
  using SolverError::SolverError;
};

/// An iterative solve exceeded its iteration budget.
struct ConvergenceError : SolverError {
  using SolverError::SolverError;
};

/// Configuration file or parameter validation failure.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

//-----------------------------------------------------------------------------
// StateVec: fixed-capacity component vector for pointwise states
//-----------------------------------------------------------------------------

/// Small stack-allocated vector holding the components of a pointwise state
/// or flux. Sized for the largest supported system (N = 16 moments).
class StateVec {
 public:
  StateVec() = default;
  explicit StateVec(int n, double fill = 0.0) : size_(n) {
    assert(n >= 0 && n <= kMaxComponents);
    data_.fill(0.0);
    std::fill_n(data_.begin(), n, fill);
  }
  StateVec(std::initializer_list<double> init) : size_(static_cast<int>(init.size())) {
    assert(size_ <= kMaxComponents);
    data_.fill(0.0);
    std::copy(init.begin(), init.end(), data_.begin());
  }

  int size() const { return size_; }
  double& operator[](int i) {
    assert(i >= 0 && i < size_);
    return data_[static_cast<std::size_t>(i)];
  }
  double operator[](int i) const {
    assert(i >= 0 && i < size_);
    return data_[static_cast<std::size_t>(i)];
  }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double* begin() { return data_.data(); }
  double* end() { return data_.data() + size_; }
  const double* begin() const { return data_.data(); }
  const double* end() const { return data_.data() + size_; }

  StateVec& operator+=(const StateVec& o) {
    assert(size_ == o.size_);
    for (int i = 0; i < size_; ++i) data_[i] += o.data_[i];
    return *this;
  }
  StateVec& operator-=(const StateVec& o) {
    assert(size_ == o.size_);
    for (int i = 0; i < size_; ++i) data_[i] -= o.data_[i];
    return *this;
  }
  StateVec& operator*=(double s) {
    for (int i = 0; i < size_; ++i) data_[i] *= s;
    return *this;
  }

  friend StateVec operator+(StateVec a, const StateVec& b) { return a += b; }
  friend StateVec operator-(StateVec a, const StateVec& b) { return a -= b; }
  friend StateVec operator*(double s, StateVec a) { return a *= s; }
  friend StateVec operator*(StateVec a, double s) { return a *= s; }

 private:
  std::array<double, kMaxComponents> data_{};
  int size_ = 0;
};

//-----------------------------------------------------------------------------
// Pointwise states
//-----------------------------------------------------------------------------
//
// Component layouts (0-based):
//   ConservativeState: (h, h*u_m, h*a_1, ..., h*a_N, b)        size N+3
//   EquilibriumState:  (E, h*u_m, a_1/h, ..., a_N/h, b)        size N+3
//   SurfaceState:      (H, h*u_m, h*a_1, ..., h*a_N)           size N+2
//
// where a_i are the moment coefficients of the vertical velocity expansion.

/// Extended conservative state (h, hu_m, h a_1..h a_N, b).
struct ConservativeState {
  StateVec q;

  ConservativeState() = default;
  explicit ConservativeState(int n_moments) : q(n_moments + 3) {}
  explicit ConservativeState(StateVec v) : q(std::move(v)) { assert(q.size() >= 3); }

  int n_moments() const { return q.size() - 3; }
  double h() const { return q[0]; }
  double& h() { return q[0]; }
  double discharge() const { return q[1]; }
  double& discharge() { return q[1]; }
  double moment(int i) const { return q[1 + i]; }  // i in 1..N, h*a_i
  double& moment(int i) { return q[1 + i]; }
  double bottom() const { return q[q.size() - 1]; }
  double& bottom() { return q[q.size() - 1]; }

  double velocity() const { return q[1] / q[0]; }
  double alpha(int i) const { return q[1 + i] / q[0]; }
};

/// Equilibrium state (E, hu_m, a_1/h..a_N/h, b); the DG unknown of the
/// moving-water scheme.
struct EquilibriumState {
  StateVec q;

  EquilibriumState() = default;
  explicit EquilibriumState(int n_moments) : q(n_moments + 3) {}
  explicit EquilibriumState(StateVec v) : q(std::move(v)) { assert(q.size() >= 3); }

  int n_moments() const { return q.size() - 3; }
  double energy() const { return q[0]; }
  double& energy() { return q[0]; }
  double discharge() const { return q[1]; }
  double& discharge() { return q[1]; }
  double scaled_moment(int i) const { return q[1 + i]; }  // i in 1..N, a_i/h
  double& scaled_moment(int i) { return q[1 + i]; }
  double bottom() const { return q[q.size() - 1]; }
  double& bottom() { return q[q.size() - 1]; }
};

/// Surface state (H = h+b, hu_m, h a_1..h a_N); the DG unknown of the
/// still-water scheme. The topography is carried separately.
struct SurfaceState {
  StateVec q;

  SurfaceState() = default;
  explicit SurfaceState(int n_moments) : q(n_moments + 2) {}
  explicit SurfaceState(StateVec v) : q(std::move(v)) { assert(q.size() >= 2); }

  int n_moments() const { return q.size() - 2; }
  double surface() const { return q[0]; }
  double& surface() { return q[0]; }
  double discharge() const { return q[1]; }
  double& discharge() { return q[1]; }
  double moment(int i) const { return q[1 + i]; }
  double& moment(int i) { return q[1 + i]; }

  double depth(double b) const { return q[0] - b; }
};

}  // namespace swlme
