#pragma once

#include <memory>
#include <string>
#include <vector>

#include "swlme/config.hpp"
#include "swlme/limiter.hpp"
#include "swlme/scenarios.hpp"
#include "swlme/timeint.hpp"

// Run orchestration: projection, time loop, CSV emission, and the report
// generators for convergence and equilibrium-preservation studies.

namespace swlme {

struct RunReport {
  long long steps = 0;
  double wall_seconds = 0.0;
  NewtonStats newton;
};

/// A completed run: the final modal fields plus enough context to sample
/// derived pointwise quantities.
struct RunResult {
  SchemeConfig config;
  Mesh mesh;
  ModalField field;    // w (still scheme) or v (moving scheme)
  ModalField b_field;  // projected topography (still scheme only)
  RunReport report;
  std::shared_ptr<StillScheme> still;
  std::shared_ptr<MovingScheme> moving;

  struct Sample {
    double x = 0.0, h = 0.0, hu = 0.0, b = 0.0, energy = 0.0, surface = 0.0;
    StateVec alpha;  // alpha_1..alpha_N
  };
  Sample sample_cell(int j, double xi) const;
  Sample sample(double x) const;
};

/// Execute projection, the time loop (with limiting when enabled), and
/// return the final state. Does not write any file.
RunResult run(const SchemeConfig& config);

/// CSV columns: x, h, hu, alpha_1..alpha_N, b, E, surface; one row per
/// sample point, 17 significant digits.
void write_solution_csv(const RunResult& result, const std::string& path);

//-----------------------------------------------------------------------------
// Reports
//-----------------------------------------------------------------------------

struct ConvergenceRow {
  int nx = 0;
  double err[4] = {0, 0, 0, 0};    // h, hu, alpha_1, alpha_2
  double order[4] = {0, 0, 0, 0};  // log2 ratios; NaN in the first row
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
};

/// L1 errors of (h, hu, alpha_1, alpha_2) against a fine-grid reference
/// computed with the still scheme at ref_nx; the reference run is cached on
/// disk keyed by a hash of its configuration.
ConvergenceTable convergence_study(const SchemeConfig& base,
                                   const std::vector<int>& nx_list, int ref_nx);
std::string convergence_csv(const ConvergenceTable& table);

struct WellbalanceRow {
  std::string variable;
  double l1 = 0.0;
  double linf = 0.0;
};

struct WellbalanceTable {
  std::vector<WellbalanceRow> rows;
};

/// Deviations of the scenario's equilibrium variables from their initial
/// constants after running the configuration: (h+b, u) for still equilibria,
/// (E, hu, a_i/h) for moving equilibria.
WellbalanceTable wellbalance_report(const SchemeConfig& config);
std::string wellbalance_csv(const WellbalanceTable& table);

}  // namespace swlme
