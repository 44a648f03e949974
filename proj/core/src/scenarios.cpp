#include "swlme/scenarios.hpp"

#include <cmath>
#include <numbers>

namespace swlme {

double topography(TopographyKind kind, double x) {
  using std::numbers::pi;
  switch (kind) {
    case TopographyKind::parabolic_bump:
      return (x >= 8.0 && x <= 12.0) ? 0.2 - 0.05 * (x - 10.0) * (x - 10.0) : 0.0;
    case TopographyKind::rectangular_bump_0p2:
      return (x >= 8.0 && x <= 12.0) ? 0.2 : 0.0;
    case TopographyKind::rectangular_bump_8:
      return (x >= 562.5 && x <= 937.5) ? 8.0 : 0.0;
    case TopographyKind::sine_squared: {
      const double s = std::sin(pi * x);
      return s * s;
    }
    case TopographyKind::flat:
      return 0.0;
    case TopographyKind::cosine_pulse:
      return (x >= 1.4 && x <= 1.6) ? 0.25 * (std::cos(10.0 * pi * (x - 1.5)) + 1.0)
                                    : 0.0;
  }
  return 0.0;
}

std::function<ConservativeState(double, double)> perturb_height(
    std::function<ConservativeState(double, double)> base, double x_lo,
    double x_hi, double eps) {
  return [base = std::move(base), x_lo, x_hi, eps](double x, double g) {
    ConservativeState u = base(x, g);
    if (x >= x_lo && x <= x_hi) {
      u.h() += eps;
      if (!(u.h() > 0.0)) {
        throw AdmissibilityError("perturb_height: perturbation drained the water column");
      }
    }
    return u;
  };
}

namespace {

constexpr double kSubE = 22.09805;
constexpr double kSubM = 4.42;
constexpr double kSupE = 91.6320;
constexpr double kSupM = 24.0;
constexpr double kTransE = 11.0907140397782;
constexpr double kTransM = 1.53;

std::function<double(double)> bottom_fn(TopographyKind kind) {
  return [kind](double x) { return topography(kind, x); };
}

Scenario accuracy_test() {
  using std::numbers::pi;
  Scenario s;
  s.name = "accuracy";
  s.description = "smooth periodic flow over sin^2 topography (order test)";
  s.x_left = 0.0;
  s.x_right = 1.0;
  s.n_moments = 2;
  s.default_nx = 100;
  s.default_t_end = 0.01;
  s.boundary = BoundaryKind::periodic;
  s.smooth = true;
  s.bottom = bottom_fn(TopographyKind::sine_squared);
  s.initial = [](double x, double) {
    const double h = 5.0 + std::exp(std::cos(2.0 * pi * x));
    ConservativeState u(2);
    u.h() = h;
    u.discharge() = std::sin(std::cos(2.0 * pi * x));
    u.moment(1) = 0.25 * h * h;  // a_i/h = 0.25
    u.moment(2) = 0.25 * h * h;
    u.bottom() = topography(TopographyKind::sine_squared, x);
    return u;
  };
  s.branch_map = [](double) { return FlowBranch::subcritical; };
  return s;
}

Scenario still_equilibrium(const std::string& name, TopographyKind topo,
                           const std::string& what) {
  Scenario s;
  s.name = name;
  s.description = "lake at rest over " + what + " topography";
  s.x_left = 0.0;
  s.x_right = 25.0;
  s.n_moments = 2;
  s.default_nx = 100;
  s.default_t_end = 1.0;
  s.equilibrium = EquilibriumKind::still;
  s.default_newton_tol = 1e-16;
  s.bottom = bottom_fn(topo);
  s.initial = [topo](double x, double) {
    ConservativeState u(2);
    u.bottom() = topography(topo, x);
    u.h() = 2.0 - u.bottom();
    return u;
  };
  s.initial_equilibrium = [topo](double x, double g) {
    EquilibriumState v(2);
    v.energy() = 2.0 * g;
    v.bottom() = topography(topo, x);
    return v;
  };
  s.initial_surface = [](double, double) {
    SurfaceState w(2);
    w.surface() = 2.0;
    return w;
  };
  s.branch_map = [](double) { return FlowBranch::subcritical; };
  return s;
}

Scenario still_perturbation(const std::string& name, double eps) {
  Scenario s;
  s.name = name;
  s.description = "perturbed lake at rest over a cosine pulse";
  s.x_left = 0.0;
  s.x_right = 2.0;
  s.n_moments = 2;
  s.default_nx = 200;
  s.default_t_end = 0.2;
  s.epsilon = eps;
  s.perturb_lo = 1.1;
  s.perturb_hi = 1.2;
  s.bottom = bottom_fn(TopographyKind::cosine_pulse);
  s.base_initial = [](double x, double) {
    ConservativeState u(2);
    u.bottom() = topography(TopographyKind::cosine_pulse, x);
    u.h() = 1.0 - u.bottom();
    return u;
  };
  s.initial = perturb_height(s.base_initial, 1.1, 1.2, eps);
  s.branch_map = [](double) { return FlowBranch::subcritical; };
  return s;
}

struct MovingConstants {
  double energy, discharge, r1, r2;
};

Scenario moving_equilibrium(const std::string& name, TopographyKind topo,
                            const MovingConstants& c,
                            std::function<FlowBranch(double)> branches,
                            const std::string& what) {
  Scenario s;
  s.name = name;
  s.description = what;
  s.x_left = 0.0;
  s.x_right = 25.0;
  s.n_moments = 2;
  s.default_nx = 100;
  s.default_t_end = 1.0;
  s.equilibrium = EquilibriumKind::moving;
  s.default_newton_tol = 1e-16;
  s.bottom = bottom_fn(topo);
  s.branch_map = std::move(branches);
  s.initial_equilibrium = [topo, c](double x, double) {
    EquilibriumState v(2);
    v.energy() = c.energy;
    v.discharge() = c.discharge;
    v.scaled_moment(1) = c.r1;
    v.scaled_moment(2) = c.r2;
    v.bottom() = topography(topo, x);
    return v;
  };
  auto veq = s.initial_equilibrium;
  auto bmap = s.branch_map;
  s.initial = [veq, bmap](double x, double g) {
    return to_conservative(veq(x, g), g, bmap(x));
  };
  return s;
}

Scenario moving_perturbation(const Scenario& base, double t_end) {
  Scenario s = base;
  s.name = "moving-perturb-" + base.name;
  s.description = "perturbed " + base.description;
  s.default_nx = 200;
  s.default_t_end = t_end;
  s.equilibrium = EquilibriumKind::none;
  s.default_newton_tol = 1e-10;
  s.epsilon = 0.01;
  s.perturb_lo = 5.75;
  s.perturb_hi = 6.25;
  s.base_initial = base.initial;
  s.initial = perturb_height(base.initial, 5.75, 6.25, 0.01);
  s.initial_equilibrium = nullptr;  // recomputed from the perturbed state
  return s;
}

Scenario dam_break_standard() {
  Scenario s;
  s.name = "dambreak";
  s.description = "standard dam break with two nonzero moments";
  s.x_left = -1.0;
  s.x_right = 1.0;
  s.n_moments = 2;
  s.default_nx = 400;
  s.default_t_end = 0.04;
  s.bottom = bottom_fn(TopographyKind::flat);
  s.initial = [](double x, double) {
    ConservativeState u(2);
    u.h() = x >= 0.0 ? 3.0 : 1.0;
    u.discharge() = 0.25 * u.h();
    u.moment(1) = -0.25 * u.h();
    u.moment(2) = 0.25 * u.h();
    u.bottom() = 0.0;
    return u;
  };
  s.branch_map = [](double) { return FlowBranch::subcritical; };
  return s;
}

Scenario dam_break_bump() {
  Scenario s;
  s.name = "dambreak-bump";
  s.description = "dam break over a tall rectangular bump";
  s.x_left = 0.0;
  s.x_right = 1500.0;
  s.n_moments = 2;
  s.default_nx = 1000;
  s.default_t_end = 15.0;
  s.bottom = bottom_fn(TopographyKind::rectangular_bump_8);
  s.initial = [](double x, double) {
    ConservativeState u(2);
    u.bottom() = topography(TopographyKind::rectangular_bump_8, x);
    u.h() = (x <= 750.0 ? 20.0 : 15.0) - u.bottom();
    u.discharge() = 0.25 * u.h();
    u.moment(1) = -0.25 * u.h();
    u.moment(2) = 0.25 * u.h();
    return u;
  };
  s.branch_map = [](double) { return FlowBranch::subcritical; };
  return s;
}

Scenario dam_break_sqrt_profile() {
  Scenario s;
  s.name = "dambreak-sqrt";
  s.description = "dam break with a projected sqrt velocity profile (N = 8)";
  s.x_left = -1.0;
  s.x_right = 1.0;
  s.n_moments = 8;
  s.default_nx = 400;
  s.default_t_end = 0.04;
  s.bottom = bottom_fn(TopographyKind::flat);
  // Projection coefficients of u(zeta) = sqrt(zeta) onto the vertical basis,
  // taken verbatim from the reference setup.
  static constexpr double kAlpha[8] = {
      -3.0 / 5.0,  -1.0 / 7.0,  -1.0 / 15.0, -3.0 / 77.0,
      -1.0 / 39.0, -1.0 / 55.0, -3.0 / 221.0, -1.0 / 95.0};
  s.initial = [](double x, double) {
    ConservativeState u(8);
    u.h() = x >= 0.0 ? 3.0 : 1.0;
    u.discharge() = 0.25 * u.h();
    for (int i = 1; i <= 8; ++i) u.moment(i) = kAlpha[i - 1] * u.h();
    u.bottom() = 0.0;
    return u;
  };
  s.branch_map = [](double) { return FlowBranch::subcritical; };
  return s;
}

std::vector<Scenario> build_registry() {
  std::vector<Scenario> all;
  all.push_back(accuracy_test());
  all.push_back(still_equilibrium("still-continuous", TopographyKind::parabolic_bump,
                                  "a continuous parabolic"));
  all.push_back(still_equilibrium("still-discontinuous",
                                  TopographyKind::rectangular_bump_0p2,
                                  "a discontinuous rectangular"));
  all.push_back(still_perturbation("still-perturb-big", 0.2));
  all.push_back(still_perturbation("still-perturb-small", 0.001));

  auto all_sub = [](double) { return FlowBranch::subcritical; };
  auto all_sup = [](double) { return FlowBranch::supercritical; };
  auto trans_cont = [](double x) {
    if (x < 10.0) return FlowBranch::subcritical;
    if (x > 10.0) return FlowBranch::supercritical;
    return FlowBranch::critical;
  };
  auto trans_disc = [](double x) {
    if (x < 8.0) return FlowBranch::subcritical;
    if (x > 12.0) return FlowBranch::supercritical;
    return FlowBranch::critical;
  };
  const MovingConstants sub{kSubE, kSubM, 0.1, -0.1};
  const MovingConstants sup{kSupE, kSupM, 0.1, -0.1};
  const MovingConstants trans{kTransE, kTransM, 0.0, 0.0};

  all.push_back(moving_equilibrium("subcritical-continuous",
                                   TopographyKind::parabolic_bump, sub, all_sub,
                                   "subcritical equilibrium, continuous bottom"));
  all.push_back(moving_equilibrium("subcritical-discontinuous",
                                   TopographyKind::rectangular_bump_0p2, sub, all_sub,
                                   "subcritical equilibrium, discontinuous bottom"));
  all.push_back(moving_equilibrium("supercritical-continuous",
                                   TopographyKind::parabolic_bump, sup, all_sup,
                                   "supercritical equilibrium, continuous bottom"));
  all.push_back(moving_equilibrium("supercritical-discontinuous",
                                   TopographyKind::rectangular_bump_0p2, sup, all_sup,
                                   "supercritical equilibrium, discontinuous bottom"));
  all.push_back(moving_equilibrium("transcritical-continuous",
                                   TopographyKind::parabolic_bump, trans, trans_cont,
                                   "transcritical equilibrium, continuous bottom"));
  all.push_back(moving_equilibrium("transcritical-discontinuous",
                                   TopographyKind::rectangular_bump_0p2, trans,
                                   trans_disc,
                                   "transcritical equilibrium, discontinuous bottom"));

  auto by_name = [&all](const std::string& name) -> const Scenario& {
    for (const Scenario& s : all) {
      if (s.name == name) return s;
    }
    throw ConfigError("registry bootstrap: missing scenario " + name);
  };
  all.push_back(moving_perturbation(by_name("subcritical-continuous"), 1.5));
  all.push_back(moving_perturbation(by_name("subcritical-discontinuous"), 1.5));
  all.push_back(moving_perturbation(by_name("supercritical-continuous"), 1.0));
  all.push_back(moving_perturbation(by_name("supercritical-discontinuous"), 1.0));

  all.push_back(dam_break_standard());
  all.push_back(dam_break_bump());
  all.push_back(dam_break_sqrt_profile());
  return all;
}

}  // namespace

const std::vector<Scenario>& scenario_registry() {
  static const std::vector<Scenario> registry = build_registry();
  return registry;
}

const Scenario& find_scenario(const std::string& name) {
  for (const Scenario& s : scenario_registry()) {
    if (s.name == name) return s;
  }
  throw ConfigError("unknown scenario: " + name);
}

}  // namespace swlme
