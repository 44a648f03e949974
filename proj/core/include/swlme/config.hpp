#pragma once

#include <string>

#include "swlme/pcdg.hpp"

namespace swlme {

enum class SchemeKind { pcdg_still, pcdg_moving };

std::string to_string(SchemeKind k);
std::string to_string(BoundaryKind k);

/// Flat key-value run configuration. Fields left at their sentinel values
/// are resolved against the scenario defaults by resolve().
struct SchemeConfig {
  int n_moments = -1;          // model.N
  double gravity = 9.812;      // model.g
  int nx = -1;                 // mesh.nx
  double x_left = 0.0;         // mesh.domain
  double x_right = 0.0;
  int degree = 2;              // dg.degree
  double cfl = 0.05;           // time.cfl
  double t_end = -1.0;         // time.t_end
  SchemeKind scheme = SchemeKind::pcdg_still;
  bool limiter_enabled = false;   // limiter.enabled
  double limiter_m = 0.0;         // limiter.M
  double newton_tol = -1.0;       // newton.tol
  int newton_max_iter = 50;       // newton.max_iter
  std::string scenario;           // scenario.name
  double scenario_epsilon = -1.0; // scenario.epsilon (perturbation override)
  bool boundary_set = false;
  BoundaryKind boundary = BoundaryKind::free;
  std::string output_path = "solution.csv";  // output.path
  int sample_points = 0;          // output.sample_points (0: cell centers)

  bool resolved = false;

  /// Fill unset fields from the scenario defaults and validate everything.
  void resolve();
};

/// Parse a configuration from flat `key = value` text. Unknown keys are hard
/// errors; '#' starts a comment.
SchemeConfig parse_config(const std::string& text);
SchemeConfig load_config(const std::string& path);

/// Canonical emission of every resolved key, stable under round-tripping.
std::string emit_config(const SchemeConfig& config);

/// 17-significant-digit formatting that round-trips IEEE doubles.
std::string format_double(double value);

}  // namespace swlme
