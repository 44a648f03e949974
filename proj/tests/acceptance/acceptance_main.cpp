// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "swlme/runner.hpp"

using namespace swlme;

namespace {

constexpr double kG = 9.812;
int g_failures = 0;

class Criterion {
 public:
  Criterion(int index, std::string name) : index_(index), name_(std::move(name)) {
    start_ = std::chrono::steady_clock::now();
  }
  void fail(const std::string& why) {
    pass_ = false;
    if (!detail_.empty()) detail_ += "; ";
    detail_ += why;
  }
  void note(const std::string& text) {
    if (!detail_.empty()) detail_ += "; ";
    detail_ += text;
  }
  ~Criterion() {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    char timing[32];
    std::snprintf(timing, sizeof(timing), "%.1fs", secs);
    std::cout << (pass_ ? "PASS" : "FAIL") << " [" << index_ << "] " << name_ << " ["
              << timing << "]";
    if (!detail_.empty()) std::cout << " -- " << detail_;
    std::cout << std::endl;
    if (!pass_) ++g_failures;
  }

 private:
  int index_;
  std::string name_;
  std::string detail_;
  bool pass_ = true;
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

SchemeConfig base_config(const std::string& scenario, SchemeKind scheme) {
  SchemeConfig cfg;
  cfg.scenario = scenario;
  cfg.scheme = scheme;
  cfg.resolve();
  return cfg;
}

//---------------------------------------------------------------------------
// Criterion 1: convergence orders and error magnitudes (Tables 1 and 2)
//---------------------------------------------------------------------------
void criterion_convergence() {
  Criterion crit(1, "convergence to third order on the smooth periodic flow");
  const std::vector<int> nx_list{20, 40, 80, 160, 320, 640};
  const int ref_nx = 2560;
  const char* var_names[4] = {"h", "hu", "a1", "a2"};
  const double paper_still[4] = {3.1551e-07, 1.1499e-06, 1.0539e-06, 1.0539e-06};
  const double paper_moving[4] = {2.7076e-07, 1.0963e-06, 9.1128e-07, 9.1128e-07};

  for (SchemeKind scheme : {SchemeKind::pcdg_still, SchemeKind::pcdg_moving}) {
    const char* tag = scheme == SchemeKind::pcdg_still ? "still" : "moving";
    try {
      SchemeConfig cfg = base_config("accuracy", scheme);
      // The fine-grid rows need the stage residual well below the published
      // error floor; the equilibrium setting is stricter than needed but
      // cheap (one extra Newton pass per cell).
      cfg.newton_tol = 1e-13;
      const ConvergenceTable table = convergence_study(cfg, nx_list, ref_nx);
      const double* paper =
          scheme == SchemeKind::pcdg_still ? paper_still : paper_moving;
      for (int q = 0; q < 4; ++q) {
        for (std::size_t row = nx_list.size() - 2; row < nx_list.size(); ++row) {
          const double order = table.rows[row].order[q];
          if (!(order >= 2.7 && order <= 3.3)) {
            crit.fail(std::string(tag) + " " + var_names[q] + " order at nx=" +
                      std::to_string(table.rows[row].nx) + " is " + fmt(order));
          }
        }
        const double err160 = table.rows[3].err[q];
        const double ratio = err160 / paper[q];
        if (!(ratio >= 1.0 / 3.0 && ratio <= 3.0)) {
          crit.fail(std::string(tag) + " " + var_names[q] + " error at nx=160 is " +
                    fmt(err160) + " vs published " + fmt(paper[q]));
        }
      }
      crit.note(std::string(tag) + " h@160=" + fmt(table.rows[3].err[0]) +
                " last-order=" + fmt(table.rows[5].order[0]));
    } catch (const std::exception& e) {
      crit.fail(std::string(tag) + " scheme raised: " + e.what());
    }
  }
}

//---------------------------------------------------------------------------
// Criterion 2: still-water equilibrium preservation (Tables 3 and 4)
//---------------------------------------------------------------------------
void criterion_still_wellbalance() {
  Criterion crit(2, "still-water equilibrium preserved by both schemes");
  double worst = 0.0;
  for (const char* scenario : {"still-continuous", "still-discontinuous"}) {
    for (SchemeKind scheme : {SchemeKind::pcdg_still, SchemeKind::pcdg_moving}) {
      try {
        SchemeConfig cfg = base_config(scenario, scheme);
        cfg.limiter_enabled = true;
        const WellbalanceTable table = wellbalance_report(cfg);
        for (const WellbalanceRow& row : table.rows) {
          worst = std::max({worst, row.l1, row.linf});
          if (row.l1 > 1e-12 || row.linf > 1e-12) {
            crit.fail(std::string(scenario) + "/" + to_string(scheme) + " " +
                      row.variable + ": L1=" + fmt(row.l1) + " Linf=" + fmt(row.linf));
          }
        }
      } catch (const std::exception& e) {
        crit.fail(std::string(scenario) + "/" + to_string(scheme) +
                  " raised: " + e.what());
      }
    }
  }
  crit.note("worst deviation " + fmt(worst));
}

//---------------------------------------------------------------------------
// Criterion 3: moving-water equilibrium preservation and contrast
//              (Tables 5 through 10)
//---------------------------------------------------------------------------
void criterion_moving_wellbalance() {
  Criterion crit(3, "moving-water equilibria preserved; still scheme is not balanced");
  const char* scenarios[] = {"subcritical-continuous",   "subcritical-discontinuous",
                             "supercritical-continuous", "supercritical-discontinuous",
                             "transcritical-continuous", "transcritical-discontinuous"};
  double worst = 0.0, weakest_contrast = 1.0;
  for (const char* scenario : scenarios) {
    const bool transcritical = std::string(scenario).find("transcritical") == 0;
    try {
      SchemeConfig cfg = base_config(scenario, SchemeKind::pcdg_moving);
      cfg.limiter_enabled = true;
      const WellbalanceTable table = wellbalance_report(cfg);
      for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const WellbalanceRow& row = table.rows[r];
        worst = std::max({worst, row.l1, row.linf});
        if (row.l1 > 1e-10 || row.linf > 1e-10) {
          crit.fail(std::string(scenario) + " " + row.variable + ": L1=" +
                    fmt(row.l1) + " Linf=" + fmt(row.linf));
        }
        if (transcritical && r >= 2 && (row.l1 != 0.0 || row.linf != 0.0)) {
          crit.fail(std::string(scenario) + " " + row.variable +
                    " moment error not exactly zero: " + fmt(row.l1));
        }
      }
    } catch (const std::exception& e) {
      crit.fail(std::string(scenario) + " moving run raised: " + e.what());
    }
    try {
      SchemeConfig contrast = base_config(scenario, SchemeKind::pcdg_still);
      contrast.limiter_enabled = true;
      const WellbalanceTable table = wellbalance_report(contrast);
      weakest_contrast = std::min(weakest_contrast, table.rows[0].l1);
      if (table.rows[0].l1 < 1e-9) {
        crit.fail(std::string(scenario) + " contrast run too balanced: L1(E)=" +
                  fmt(table.rows[0].l1));
      }
    } catch (const std::exception& e) {
      crit.fail(std::string(scenario) + " contrast run raised: " + e.what());
    }
  }
  crit.note("worst moving deviation " + fmt(worst) + ", weakest contrast L1(E) " +
            fmt(weakest_contrast));
}

//---------------------------------------------------------------------------
// Criterion 4: perturbation containment outside the domain of influence
//---------------------------------------------------------------------------
struct PerturbationCase {
  const char* scenario;
  SchemeKind scheme;
  double window_lo, window_hi;
};

void criterion_perturbations() {
  Criterion crit(4, "perturbations stay inside their domain of influence");
  const PerturbationCase cases[] = {
      {"still-perturb-big", SchemeKind::pcdg_still, 1.1, 1.2},
      {"still-perturb-big", SchemeKind::pcdg_moving, 1.1, 1.2},
      {"still-perturb-small", SchemeKind::pcdg_still, 1.1, 1.2},
      {"still-perturb-small", SchemeKind::pcdg_moving, 1.1, 1.2},
      {"moving-perturb-subcritical-continuous", SchemeKind::pcdg_moving, 5.75, 6.25},
      {"moving-perturb-subcritical-discontinuous", SchemeKind::pcdg_moving, 5.75, 6.25},
      {"moving-perturb-supercritical-continuous", SchemeKind::pcdg_moving, 5.75, 6.25},
      {"moving-perturb-supercritical-discontinuous", SchemeKind::pcdg_moving, 5.75, 6.25},
  };
  double worst_outside = 0.0;
  for (const PerturbationCase& pc : cases) {
    try {
      SchemeConfig cfg = base_config(pc.scenario, pc.scheme);
      cfg.limiter_enabled = true;

      // Global wave speed of the initial perturbed field sets the cone.
      SchemeConfig init_cfg = cfg;
      init_cfg.t_end = 0.0;
      const RunResult init = run(init_cfg);
      const double alpha = pc.scheme == SchemeKind::pcdg_still
                               ? init.still->max_speed(init.field)
                               : init.moving->max_speed(init.field);

      const RunResult res = run(cfg);
      const double reach = alpha * cfg.t_end + 2.0 * res.mesh.dx;
      const Scenario& scen = find_scenario(pc.scenario);
      const bool still_family = !scen.base_initial ? true : scen.equilibrium == EquilibriumKind::still;
      (void)still_family;

      // Reference values of the unperturbed equilibrium.
      const bool moving_family = std::string(pc.scenario).rfind("moving-", 0) == 0;
      EquilibriumState v0(cfg.n_moments);
      if (moving_family) {
        const std::string base_name = std::string(pc.scenario).substr(15);
        v0 = find_scenario(base_name).initial_equilibrium(0.0, cfg.gravity);
      }

      const GaussRule rule(cfg.degree + 2);
      for (int j = 0; j < res.mesh.nx; ++j) {
        std::vector<double> points(rule.nodes());
        points.push_back(-1.0);
        points.push_back(1.0);
        for (double xi : points) {
          const RunResult::Sample s = res.sample_cell(j, xi);
          if (!std::isfinite(s.h) || !std::isfinite(s.hu) || !std::isfinite(s.energy)) {
            crit.fail(std::string(pc.scenario) + " produced a non-finite value");
            goto next_case;
          }
          if (!(s.h > 0.0)) {
            crit.fail(std::string(pc.scenario) + " drained at x=" + fmt(s.x));
            goto next_case;
          }
          const double dist =
              std::max({0.0, pc.window_lo - s.x, s.x - pc.window_hi});
          if (dist <= reach) continue;
          double dev;
          if (moving_family) {
            dev = std::max({std::abs(s.energy - v0.energy()),
                            std::abs(s.hu - v0.discharge()),
                            std::abs(s.alpha[0] / s.h - v0.scaled_moment(1)),
                            std::abs(s.alpha[1] / s.h - v0.scaled_moment(2))});
          } else {
            dev = std::max({std::abs(s.surface - 1.0), std::abs(s.hu),
                            std::abs(s.alpha[0]), std::abs(s.alpha[1])});
          }
          worst_outside = std::max(worst_outside, dev);
          if (dev > 1e-8) {
            crit.fail(std::string(pc.scenario) + "/" + to_string(pc.scheme) +
                      " leaked " + fmt(dev) + " at x=" + fmt(s.x));
            goto next_case;
          }
        }
      }
    next_case:;
    } catch (const std::exception& e) {
      crit.fail(std::string(pc.scenario) + " raised: " + e.what());
    }
  }
  crit.note("worst leakage outside the cone " + fmt(worst_outside));
}

//---------------------------------------------------------------------------
// Criterion 5: dam-break robustness and cross-scheme agreement
//---------------------------------------------------------------------------
bool positive_depth_everywhere(const RunResult& res, Criterion& crit,
                               const std::string& tag) {
  const GaussRule rule(res.config.degree + 2);
  for (int j = 0; j < res.mesh.nx; ++j) {
    std::vector<double> points(rule.nodes());
    points.push_back(-1.0);
    points.push_back(1.0);
    for (double xi : points) {
      const RunResult::Sample s = res.sample_cell(j, xi);
      if (!std::isfinite(s.h) || !(s.h > 0.0)) {
        crit.fail(tag + ": non-positive or non-finite depth at x=" + fmt(s.x));
        return false;
      }
    }
  }
  return true;
}

void criterion_dam_breaks() {
  Criterion crit(5, "dam-break runs complete with positive depth");
  // Standard dam break: both schemes, compared fields.
  try {
    SchemeConfig cfg = base_config("dambreak", SchemeKind::pcdg_still);
    cfg.limiter_enabled = true;
    const RunResult still_run = run(cfg);
    cfg.scheme = SchemeKind::pcdg_moving;
    const RunResult moving_run = run(cfg);
    if (positive_depth_everywhere(still_run, crit, "dambreak/still") &&
        positive_depth_everywhere(moving_run, crit, "dambreak/moving")) {
      const GaussRule rule(4);
      for (int quantity = 0; quantity < 2; ++quantity) {
        const auto value = [quantity](const RunResult::Sample& s) {
          return quantity == 0 ? s.h : s.hu / s.h;
        };
        const ErrorNorms diff = error_norms(
            still_run.mesh, rule,
            [&](int j, double xi) { return value(still_run.sample_cell(j, xi)); },
            [&](int j, double xi) { return value(moving_run.sample_cell(j, xi)); });
        const ErrorNorms scale = error_norms(
            still_run.mesh, rule,
            [&](int j, double xi) { return value(still_run.sample_cell(j, xi)); },
            [](int, double) { return 0.0; });
        const double rel = diff.l1 / scale.l1;
        if (rel > 0.02) {
          crit.fail(std::string(quantity == 0 ? "h" : "u_m") +
                    " fields disagree by " + fmt(100.0 * rel) + "% L1");
        } else if (quantity == 0) {
          crit.note("scheme agreement on h: " + fmt(100.0 * rel) + "% L1");
        }
      }
    }
  } catch (const std::exception& e) {
    crit.fail(std::string("dambreak raised: ") + e.what());
  }

  // Rapidly varying flow over the tall bump, both output times.
  for (double t_end : {15.0, 60.0}) {
    for (SchemeKind scheme : {SchemeKind::pcdg_still, SchemeKind::pcdg_moving}) {
      try {
        SchemeConfig cfg = base_config("dambreak-bump", scheme);
        cfg.t_end = t_end;
        cfg.limiter_enabled = true;
        const RunResult res = run(cfg);
        positive_depth_everywhere(res, crit,
                                  "dambreak-bump/" + to_string(scheme) + "/t=" +
                                      fmt(t_end));
      } catch (const std::exception& e) {
        crit.fail("dambreak-bump/" + to_string(scheme) + "/t=" + fmt(t_end) +
                  " raised: " + e.what());
      }
    }
  }

  // Eight-moment projected velocity profile.
  for (SchemeKind scheme : {SchemeKind::pcdg_still, SchemeKind::pcdg_moving}) {
    try {
      SchemeConfig cfg = base_config("dambreak-sqrt", scheme);
      cfg.limiter_enabled = true;
      const RunResult res = run(cfg);
      positive_depth_everywhere(res, crit, "dambreak-sqrt/" + to_string(scheme));
    } catch (const std::exception& e) {
      crit.fail("dambreak-sqrt/" + to_string(scheme) + " raised: " + e.what());
    }
  }
}

//---------------------------------------------------------------------------
// Criterion 6: invariant suites
//---------------------------------------------------------------------------
void criterion_invariants() {
  Criterion crit(6, "algebraic and structural invariants");

  // (a) analytic versus numerical eigenvalues on 1000 random states.
  {
    auto gen = oracles::rng(101);
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = 1 + trial % 4;
      const ConservativeState u = oracles::random_state(gen, n);
      const StateVec lam = eigenvalues(u, kG);
      Eigen::VectorXcd numeric =
          Eigen::EigenSolver<Eigen::MatrixXd>(jacobian(u, kG)).eigenvalues();
      std::vector<double> nums(numeric.size());
      double radius = 1.0;
      for (int i = 0; i < numeric.size(); ++i) {
        nums[i] = numeric[i].real();
        radius = std::max(radius, std::abs(nums[i]));
      }
      std::sort(nums.begin(), nums.end());
      for (int i = 0; i < lam.size(); ++i) {
        if (std::abs(nums[i] - lam[i]) > 1e-10 * radius) {
          crit.fail("(a) eigenvalue mismatch " + fmt(std::abs(nums[i] - lam[i])));
          trial = 1000;
          break;
        }
      }
    }
  }

  // (b) transform roundtrip at 1e-12 relative.
  {
    auto gen = oracles::rng(103);
    for (int trial = 0; trial < 300; ++trial) {
      const ConservativeState u = oracles::random_state(gen, 1 + trial % 4, 0.3, 7.0);
      const EquilibriumState v = to_equilibrium(u, kG);
      ConservativeState back;
      try {
        back = to_conservative_seeded(v, kG, u.h());
      } catch (const SonicStateError&) {
        continue;
      }
      for (int c = 0; c < u.q.size(); ++c) {
        if (std::abs(back.q[c] - u.q[c]) > 1e-12 * std::max(1.0, std::abs(u.q[c]))) {
          crit.fail("(b) roundtrip error " + fmt(std::abs(back.q[c] - u.q[c])));
          trial = 300;
          break;
        }
      }
    }
  }

  // (c) coupling-matrix directional identity versus finite differences.
  {
    auto gen = oracles::rng(107);
    std::uniform_real_distribution<double> dir(-1.0, 1.0);
    int tested = 0;
    for (int trial = 0; trial < 80 && tested < 30; ++trial) {
      const int n = 1 + trial % 3;
      const ConservativeState u0 = oracles::random_state(gen, n, 0.5, 6.0);
      const EquilibriumState v = to_equilibrium(u0, kG);
      const auto [q, dq] = quartic_residual(u0.h(), v, kG);
      (void)q;
      if (std::abs(dq) < 1e-4 * kG * u0.h() * u0.h()) continue;
      ++tested;
      StateVec dv(n + 3);
      for (int c = 0; c < n + 3; ++c) dv[c] = dir(gen);
      const double eps = 1e-7;
      EquilibriumState vp = v, vm = v;
      for (int c = 0; c < n + 3; ++c) {
        vp.q[c] += eps * dv[c];
        vm.q[c] -= eps * dv[c];
      }
      const ConservativeState up = to_conservative_seeded(vp, kG, u0.h());
      const ConservativeState um = to_conservative_seeded(vm, kG, u0.h());
      Eigen::VectorXd fd(n + 3);
      for (int c = 0; c < n + 3; ++c) fd[c] = (up.q[c] - um.q[c]) / (2.0 * eps);
      const Eigen::VectorXd lhs = extended_jacobian(u0, kG) * fd;
      StateVec dvt = dv;
      dvt[n + 2] = 0.0;
      const StateVec rhs = apply_coupling_matrix(u0, dvt);
      double scale = 1.0;
      for (int c = 0; c < n + 3; ++c) scale = std::max(scale, std::abs(rhs[c]));
      for (int c = 0; c < n + 3; ++c) {
        if (std::abs(lhs[c] - rhs[c]) > 1e-8 * scale * 10.0) {
          crit.fail("(c) identity residual " + fmt(std::abs(lhs[c] - rhs[c])));
          trial = 80;
          break;
        }
      }
    }
  }

  // (d) path antisymmetry and the quadrature oracle.
  {
    auto gen = oracles::rng(109);
    for (int trial = 0; trial < 30; ++trial) {
      const int n = 1 + trial % 3;
      const ConservativeState ul = oracles::random_state(gen, n, 0.5, 5.0);
      const ConservativeState ur = oracles::random_state(gen, n, 0.5, 5.0);
      const EquilibriumState vl = to_equilibrium(ul, kG);
      const EquilibriumState vr = to_equilibrium(ur, kG);
      const StateVec fwd = path_correction_moving(ul, vl, ur, vr, kG);
      const StateVec bwd = path_correction_moving(ur, vr, ul, vl, kG);
      StateVec dv(n + 3);
      for (int c = 0; c < n + 2; ++c) dv[c] = vr.q[c] - vl.q[c];
      dv[n + 2] = 0.0;
      const StateVec fl = physical_flux(ul, kG);
      const StateVec fr = physical_flux(ur, kG);
      for (int c = 0; c < n + 3; ++c) {
        if (std::abs(fwd[c] + bwd[c]) > 1e-14 * std::max(1.0, std::abs(fwd[c]))) {
          crit.fail("(d) antisymmetry residual " + fmt(std::abs(fwd[c] + bwd[c])));
        }
      }
      for (int c = 1; c <= n + 1; ++c) {
        const double mbar = oracles::integrate01([&](double s) {
          const double h = ul.h() + s * (ur.h() - ul.h());
          const double um = ul.velocity() + s * (ur.velocity() - ul.velocity());
          double alpha[kMaxMoments];
          for (int i = 1; i <= n; ++i) {
            alpha[i - 1] = ul.alpha(i) + s * (ur.alpha(i) - ul.alpha(i));
          }
          return apply_coupling_primitives(h, um, alpha, n, dv)[c];
        });
        const double expected = mbar - fr[c] + fl[c];
        if (std::abs(fwd[c] - expected) > 1e-13 * std::max(1.0, std::abs(expected))) {
          crit.fail("(d) quadrature-oracle residual " + fmt(std::abs(fwd[c] - expected)));
          trial = 30;
          break;
        }
      }
    }
  }

  // (e) mass conservation on the periodic smooth flow, both schemes.
  for (SchemeKind scheme : {SchemeKind::pcdg_still, SchemeKind::pcdg_moving}) {
    try {
      SchemeConfig cfg = base_config("accuracy", scheme);
      cfg.nx = 64;
      cfg.newton_tol = 1e-15;
      SchemeConfig init_cfg = cfg;
      init_cfg.t_end = 0.0;
      const RunResult init = run(init_cfg);
      const RunResult res = run(cfg);
      auto mass = [&](const RunResult& r) {
        double acc = 0.0;
        for (int j = 0; j < r.mesh.nx; ++j) {
          const GaussRule& rule = scheme == SchemeKind::pcdg_still
                                      ? r.still->volume_rule()
                                      : r.moving->volume_rule();
          for (int q = 0; q < rule.size(); ++q) {
            acc += rule.weight(q) * 0.5 * r.mesh.dx *
                   r.sample_cell(j, rule.node(q)).h;
          }
        }
        return acc;
      };
      const double m0 = mass(init);
      const double m1 = mass(res);
      if (std::abs(m1 - m0) > 1e-12 * std::abs(m0)) {
        crit.fail("(e) " + to_string(scheme) + " mass drift " +
                  fmt(std::abs(m1 - m0) / std::abs(m0)));
      }
    } catch (const std::exception& e) {
      crit.fail(std::string("(e) raised: ") + e.what());
    }
  }

  // (f) bit-exact topography invariance through a moving-scheme run.
  try {
    SchemeConfig cfg = base_config("subcritical-continuous", SchemeKind::pcdg_moving);
    cfg.t_end = 0.05;
    SchemeConfig init_cfg = cfg;
    init_cfg.t_end = 0.0;
    const RunResult init = run(init_cfg);
    const RunResult res = run(cfg);
    const int km = cfg.degree + 1;
    for (int j = 0; j < res.mesh.nx; ++j) {
      for (int m = 0; m < km; ++m) {
        if (res.field.coeff(j, 4, m) != init.field.coeff(j, 4, m)) {
          crit.fail("(f) topography coefficients changed in cell " + std::to_string(j));
          j = res.mesh.nx;
          break;
        }
      }
    }
  } catch (const std::exception& e) {
    crit.fail(std::string("(f) raised: ") + e.what());
  }

  // (g) limiter average preservation and equilibrium transparency.
  try {
    const Mesh mesh(0.0, 1.0, 16);
    auto mean_state = [](const ModalField& field, int j) {
      ConservativeState u(2);
      u.h() = field.cell_average(j, 0);
      u.discharge() = field.cell_average(j, 1);
      u.moment(1) = field.cell_average(j, 2);
      u.moment(2) = field.cell_average(j, 3);
      u.bottom() = 0.0;
      return u;
    };
    auto gen = oracles::rng(113);
    std::uniform_real_distribution<double> noise(-0.3, 0.3);
    ModalField f(16, 4, 2);
    const double sqrt2 = std::sqrt(2.0);
    for (int j = 0; j < 16; ++j) {
      f.coeff(j, 0, 0) = (2.0 + 0.5 * std::sin(0.9 * j)) * sqrt2;
      f.coeff(j, 1, 0) = 0.4 * sqrt2;
      f.coeff(j, 2, 0) = 0.05 * sqrt2;
      f.coeff(j, 3, 0) = -0.04 * sqrt2;
      for (int c = 0; c < 4; ++c) {
        f.coeff(j, c, 1) = noise(gen);
        f.coeff(j, c, 2) = 0.3 * noise(gen);
      }
    }
    const ModalField before = f;
    TvbLimiter limiter(0.0, kG);
    const int limited = limiter.apply(f, mesh, BoundaryKind::periodic, 4, mean_state,
                                      LimiterTransform::surface);
    if (limited == 0) crit.fail("(g) limiter never engaged on rough data");
    for (int j = 0; j < 16; ++j) {
      for (int c = 0; c < 4; ++c) {
        if (std::abs(f.cell_average(j, c) - before.cell_average(j, c)) > 1e-14) {
          crit.fail("(g) cell average changed by limiting");
        }
      }
    }
    ModalField flat(16, 4, 2);
    for (int j = 0; j < 16; ++j) {
      flat.coeff(j, 0, 0) = 2.0 * sqrt2;
      flat.coeff(j, 1, 0) = 0.5 * sqrt2;
    }
    const ModalField flat_before = flat;
    limiter.apply(flat, mesh, BoundaryKind::periodic, 4, mean_state,
                  LimiterTransform::surface);
    for (std::size_t i = 0; i < flat.data().size(); ++i) {
      if (flat.data()[i] != flat_before.data()[i]) {
        crit.fail("(g) equilibrium data modified by the limiter");
        break;
      }
    }
  } catch (const std::exception& e) {
    crit.fail(std::string("(g) raised: ") + e.what());
  }
}

//---------------------------------------------------------------------------
// Criterion 7: 400-step endurance on every equilibrium
//---------------------------------------------------------------------------
void criterion_endurance() {
  Criterion crit(7, "400 RK3 steps leave every equilibrium unchanged");
  const GaussRule rule(4);
  double worst = 0.0;

  auto node_linf = [&rule](const ModalField& a, const ModalField& b) {
    double m = 0.0;
    for (int j = 0; j < a.nx(); ++j) {
      std::vector<double> points(rule.nodes());
      points.push_back(-1.0);
      points.push_back(1.0);
      for (double xi : points) {
        const StateVec va = a.evaluate(j, xi);
        const StateVec vb = b.evaluate(j, xi);
        for (int c = 0; c < a.ncomp(); ++c) m = std::max(m, std::abs(va[c] - vb[c]));
      }
    }
    return m;
  };

  // Still scheme on the two lake-at-rest states.
  for (const char* scenario : {"still-continuous", "still-discontinuous"}) {
    try {
      SchemeConfig cfg = base_config(scenario, SchemeKind::pcdg_still);
      cfg.t_end = 0.0;
      const RunResult init = run(cfg);
      StillScheme scheme(init.mesh, cfg.n_moments, cfg.degree, cfg.gravity,
                         cfg.boundary);
      scheme.set_topography(init.b_field);
      ModalField w = init.field;
      for (int step = 0; step < 400; ++step) {
        rk3_step_still(scheme, w, cfl_dt(scheme.max_speed(w), init.mesh, cfg.cfl));
      }
      const double drift = node_linf(w, init.field);
      worst = std::max(worst, drift);
      if (drift > 1e-12) {
        crit.fail(std::string(scenario) + "/pcdg-still drift " + fmt(drift));
      }
    } catch (const std::exception& e) {
      crit.fail(std::string(scenario) + "/pcdg-still raised: " + e.what());
    }
  }

  // Moving scheme on the lake-at-rest and all moving equilibria.
  const char* moving_scenarios[] = {
      "still-continuous",         "still-discontinuous",
      "subcritical-continuous",   "subcritical-discontinuous",
      "supercritical-continuous", "supercritical-discontinuous",
      "transcritical-continuous", "transcritical-discontinuous"};
  for (const char* scenario : moving_scenarios) {
    try {
      SchemeConfig cfg = base_config(scenario, SchemeKind::pcdg_moving);
      cfg.t_end = 0.0;
      const RunResult init = run(cfg);
      MovingScheme scheme(init.mesh, cfg.n_moments, cfg.degree, cfg.gravity,
                          cfg.boundary);
      scheme.set_branch_map(find_scenario(scenario).branch_map);
      ModalField v = init.field;
      const NewtonOptions opts{1e-16, 80};
      for (int step = 0; step < 400; ++step) {
        rk3_step_moving(scheme, v, cfl_dt(scheme.max_speed(v), init.mesh, cfg.cfl),
                        opts);
      }
      const double drift = node_linf(v, init.field);
      worst = std::max(worst, drift);
      if (drift > 1e-12) {
        crit.fail(std::string(scenario) + "/pcdg-moving drift " + fmt(drift));
      }
    } catch (const std::exception& e) {
      crit.fail(std::string(scenario) + "/pcdg-moving raised: " + e.what());
    }
  }
  crit.note("worst drift " + fmt(worst));
}

}  // namespace

int main() {
  std::cout << "SWLME acceptance suite\n";
  criterion_convergence();
  criterion_still_wellbalance();
  criterion_moving_wellbalance();
  criterion_perturbations();
  criterion_dam_breaks();
  criterion_invariants();
  criterion_endurance();
  std::cout << (g_failures == 0 ? "all criteria passed" : "criteria failed") << "\n";
  return g_failures;
}
