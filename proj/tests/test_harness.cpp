#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "swlme/runner.hpp"

using namespace swlme;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("round trip is idempotent") {
    SchemeConfig c = parse_config(
        "scenario.name = still-continuous\n"
        "scheme = pcdg-moving\n"
        "mesh.nx = 50\n"
        "time.t_end = 0.25\n"
        "newton.tol = 1e-16\n");
    c.resolve();
    const std::string emitted = emit_config(c);
    SchemeConfig c2 = parse_config(emitted);
    c2.resolve();
    CHECK(emit_config(c2) == emitted);
    CHECK(c2.nx == 50);
    CHECK(c2.t_end == 0.25);
    CHECK(c2.scheme == SchemeKind::pcdg_moving);
    CHECK(c2.gravity == 9.812);
  }
  SUBCASE("unknown keys are hard errors") {
    CHECK_THROWS_AS(parse_config("scenario.name = dambreak\nfoo = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("Scenario.Name = dambreak\n"), ConfigError);
  }
  SUBCASE("malformed values are rejected") {
    CHECK_THROWS_AS(parse_config("mesh.nx = twelve\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("time.cfl = 0.05x\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("scheme = upwind\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("mesh.domain = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("limiter.enabled = maybe\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("not a key value pair\n"), ConfigError);
  }
  SUBCASE("comments and blank lines are ignored") {
    SchemeConfig c = parse_config(
        "# a comment\n"
        "\n"
        "scenario.name = dambreak  # trailing comment\n");
    CHECK(c.scenario == "dambreak");
  }
  SUBCASE("validation catches bad resolved values") {
    SchemeConfig c = parse_config("scenario.name = dambreak\nmesh.nx = 0\n");
    CHECK_THROWS_AS(c.resolve(), ConfigError);
    SchemeConfig c2 = parse_config("scenario.name = dambreak\ntime.cfl = -1\n");
    CHECK_THROWS_AS(c2.resolve(), ConfigError);
    SchemeConfig c3;
    CHECK_THROWS_AS(c3.resolve(), ConfigError);  // missing scenario
  }
  SUBCASE("scenario defaults match the published setups") {
    SchemeConfig c = parse_config("scenario.name = still-continuous\n");
    c.resolve();
    CHECK(c.nx == 100);
    CHECK(c.t_end == 1.0);
    CHECK(c.x_right == 25.0);
    CHECK(c.newton_tol == 1e-16);
    SchemeConfig d = parse_config("scenario.name = dambreak-bump\n");
    d.resolve();
    CHECK(d.nx == 1000);
    CHECK(d.x_right == 1500.0);
    SchemeConfig a = parse_config("scenario.name = accuracy\n");
    a.resolve();
    CHECK(a.t_end == 0.01);
    CHECK(a.boundary == BoundaryKind::periodic);
  }
}

TEST_CASE("zero-duration runs return the projected initial condition") {
  SchemeConfig cfg = parse_config(
      "scenario.name = still-continuous\n"
      "scheme = pcdg-still\n"
      "time.t_end = 0\n"
      "mesh.nx = 40\n");
  cfg.resolve();
  const RunResult res = run(cfg);
  CHECK(res.report.steps == 0);
  const GaussRule rule(4);
  const Scenario& scen = find_scenario("still-continuous");
  const ModalField expected = l2_project(
      [&](double x) {
        const ConservativeState u = scen.initial(x, cfg.gravity);
        StateVec w(4);
        w[0] = u.h() + u.bottom();
        w[1] = u.discharge();
        w[2] = u.moment(1);
        w[3] = u.moment(2);
        return w;
      },
      res.mesh, 4, 2, rule);
  for (std::size_t i = 0; i < expected.data().size(); ++i) {
    CHECK(res.field.data()[i] == expected.data()[i]);
  }
}

TEST_CASE("still equilibrium keeps the surface flat through a full run") {
  SchemeConfig cfg = parse_config(
      "scenario.name = still-continuous\n"
      "scheme = pcdg-still\n");
  cfg.resolve();
  const RunResult res = run(cfg);
  CHECK(res.report.steps > 0);
  for (int j = 0; j < res.mesh.nx; j += 7) {
    for (double xi : {-1.0, 0.0, 1.0}) {
      const RunResult::Sample s = res.sample_cell(j, xi);
      CHECK(std::abs(s.surface - 2.0) <= 1e-12);
      CHECK(std::abs(s.hu) <= 1e-12);
      CHECK(s.h > 0.0);
    }
  }
}

TEST_CASE("csv output carries the documented columns at full precision") {
  SchemeConfig cfg = parse_config(
      "scenario.name = dambreak\n"
      "scheme = pcdg-still\n"
      "time.t_end = 0\n"
      "mesh.nx = 16\n"
      "output.sample_points = 8\n");
  cfg.resolve();
  const RunResult res = run(cfg);
  const std::string path = temp_path("swlme_test_out.csv");
  write_solution_csv(res, path);
  const std::string text = slurp(path);

  std::istringstream lines(text);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "x,h,hu,alpha_1,alpha_2,b,E,surface");
  int rows = 0;
  std::string line;
  while (std::getline(lines, line)) {
    ++rows;
    int commas = 0;
    for (char ch : line) commas += ch == ',';
    CHECK(commas == 7);
  }
  CHECK(rows == 8);

  // 17-significant-digit formatting round-trips doubles exactly.
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(std::stod(format_double(9.812)) == 9.812);
  std::remove(path.c_str());
}

TEST_CASE("identical configurations produce bit-identical output") {
  const char* text =
      "scenario.name = still-perturb-small\n"
      "scheme = pcdg-still\n"
      "mesh.nx = 50\n"
      "time.t_end = 0.02\n"
      "limiter.enabled = true\n";
  SchemeConfig cfg = parse_config(text);
  cfg.resolve();
  const std::string p1 = temp_path("swlme_det_a.csv");
  const std::string p2 = temp_path("swlme_det_b.csv");
  write_solution_csv(run(cfg), p1);
  write_solution_csv(run(cfg), p2);
  CHECK(slurp(p1) == slurp(p2));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("wellbalance report: still equilibrium through the still scheme") {
  SchemeConfig cfg = parse_config(
      "scenario.name = still-discontinuous\n"
      "scheme = pcdg-still\n");
  cfg.resolve();
  const WellbalanceTable table = wellbalance_report(cfg);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0].variable == "h+b");
  CHECK(table.rows[1].variable == "u");
  for (const WellbalanceRow& row : table.rows) {
    CHECK(row.l1 <= 1e-12);
    CHECK(row.linf <= 1e-12);
  }
  const std::string csv = wellbalance_csv(table);
  CHECK(csv.find("variable,l1,linf") == 0);
}

TEST_CASE("wellbalance report rejects non-equilibrium scenarios") {
  SchemeConfig cfg = parse_config("scenario.name = dambreak\n");
  cfg.resolve();
  CHECK_THROWS_AS(wellbalance_report(cfg), ConfigError);
}

TEST_CASE("convergence study sanity at reduced scale") {
  SUBCASE("third order at P2") {
    SchemeConfig cfg = parse_config(
        "scenario.name = accuracy\n"
        "scheme = pcdg-still\n"
        "output.path = swlme_conv_test.csv\n");
    cfg.resolve();
    const ConvergenceTable table = convergence_study(cfg, {10, 20, 40}, 160);
    REQUIRE(table.rows.size() == 3);
    for (int q = 0; q < 4; ++q) {
      CHECK(table.rows[2].order[q] > 2.0);
      CHECK(table.rows[2].order[q] < 4.5);
    }
    const std::string csv = convergence_csv(table);
    CHECK(csv.find("nx,err_h,order_h,err_hu,order_hu,err_a1,order_a1,err_a2,order_a2") == 0);
  }
  SUBCASE("first order at P0") {
    SchemeConfig cfg = parse_config(
        "scenario.name = accuracy\n"
        "scheme = pcdg-still\n"
        "dg.degree = 0\n"
        "output.path = swlme_conv_test0.csv\n");
    cfg.resolve();
    const ConvergenceTable table = convergence_study(cfg, {40, 80}, 320);
    CHECK(table.rows[1].order[0] > 0.5);
    CHECK(table.rows[1].order[0] < 1.6);
  }
  SUBCASE("reference must nest and the limiter must be off") {
    SchemeConfig cfg = parse_config("scenario.name = accuracy\n");
    cfg.resolve();
    CHECK_THROWS_AS(convergence_study(cfg, {30}, 100), ConfigError);
    SchemeConfig lim = parse_config(
        "scenario.name = accuracy\nlimiter.enabled = true\n");
    lim.resolve();
    CHECK_THROWS_AS(convergence_study(lim, {10}, 40), ConfigError);
  }
}

TEST_CASE("moving-scheme sampling matches the initial state after projection") {
  SchemeConfig cfg = parse_config(
      "scenario.name = subcritical-continuous\n"
      "scheme = pcdg-moving\n"
      "time.t_end = 0\n");
  cfg.resolve();
  const RunResult res = run(cfg);
  const Scenario& scen = find_scenario("subcritical-continuous");
  for (double x : {1.3, 9.7, 10.4, 21.9}) {
    const RunResult::Sample s = res.sample(x);
    const ConservativeState u = scen.initial(x, cfg.gravity);
    CHECK(s.h == doctest::Approx(u.h()).epsilon(1e-6));
    CHECK(s.hu == doctest::Approx(u.discharge()).epsilon(1e-10));
    CHECK(s.energy == doctest::Approx(22.09805).epsilon(1e-12));
  }
}
