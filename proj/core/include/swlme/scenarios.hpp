#pragma once

#include <functional>
#include <string>
#include <vector>

#include "swlme/model.hpp"
#include "swlme/pcdg.hpp"

// Constructors for every topography, initial condition, equilibrium state,
// and perturbation used by the numerical test cases, with flow-type maps for
// transcritical root selection.

namespace swlme {

enum class TopographyKind {
  parabolic_bump,        // 0.2 - 0.05 (x-10)^2 on [8,12]
  rectangular_bump_0p2,  // 0.2 on [8,12]
  rectangular_bump_8,    // 8 on [562.5, 937.5]
  sine_squared,          // sin^2(pi x)
  flat,
  cosine_pulse           // 0.25 (cos(10 pi (x-1.5)) + 1) on [1.4, 1.6]
};

double topography(TopographyKind kind, double x);

/// Which well-balance family a scenario belongs to (selects the reported
/// deviation variables).
enum class EquilibriumKind { none, still, moving };

struct Scenario {
  std::string name;
  std::string description;
  double x_left = 0.0;
  double x_right = 1.0;
  int n_moments = 2;
  int default_nx = 100;
  double default_t_end = 1.0;
  BoundaryKind boundary = BoundaryKind::free;
  bool smooth = false;  // accuracy-test scenario: no limiter by default
  EquilibriumKind equilibrium = EquilibriumKind::none;
  double default_newton_tol = 1e-10;
  double epsilon = 0.0;  // perturbation amplitude, where applicable
  double perturb_lo = 0.0;
  double perturb_hi = 0.0;

  std::function<double(double)> bottom;
  /// Unperturbed initial state of perturbation scenarios; null otherwise.
  /// Lets a run override the perturbation amplitude.
  std::function<ConservativeState(double, double)> base_initial;
  /// Exact surface-variable initial data, set where composing h + b would
  /// reintroduce rounding noise into an exactly representable surface.
  std::function<SurfaceState(double, double)> initial_surface;
  /// Pointwise conservative initial state (includes the topography value).
  std::function<ConservativeState(double, double)> initial;
  /// Exact equilibrium-variable initial state; null when the scenario is not
  /// defined through equilibrium constants.
  std::function<EquilibriumState(double, double)> initial_equilibrium;
  /// Root branch per position for the moving scheme's height recovery.
  std::function<FlowBranch(double)> branch_map;
};

const std::vector<Scenario>& scenario_registry();
const Scenario& find_scenario(const std::string& name);

/// Height perturbation of a pointwise initial state: adds eps to h inside
/// the window, leaving the discharges unchanged. Throws when the bump makes
/// a state dry.
std::function<ConservativeState(double, double)> perturb_height(
    std::function<ConservativeState(double, double)> base, double x_lo,
    double x_hi, double eps);

}  // namespace swlme
