// Command-line driver for the SWLME solver library.
//
// Subcommands:
//   run            --config <file>
//   convergence    --config <file> --nx 20,40,... --ref-nx 2560
//   wellbalance    --config <file>
//   list-scenarios
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "swlme/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::vector<int> parse_nx_list(const std::string& spec) {
  std::vector<int> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw swlme::ConfigError("invalid --nx list entry: '" + item + "'");
    }
  }
  if (out.empty()) throw swlme::ConfigError("--nx list is empty");
  return out;
}

int cmd_run(const std::string& config_path) {
  swlme::SchemeConfig cfg = swlme::load_config(config_path);
  cfg.resolve();
  const swlme::RunResult result = swlme::run(cfg);
  swlme::write_solution_csv(result, cfg.output_path);

  std::cout << "scenario:   " << cfg.scenario << "\n"
            << "scheme:     " << swlme::to_string(cfg.scheme) << "\n"
            << "steps:      " << result.report.steps << "\n"
            << "wall time:  " << result.report.wall_seconds << " s\n";
  if (cfg.scheme == swlme::SchemeKind::pcdg_moving && result.report.newton.solves > 0) {
    std::cout << "newton:     " << result.report.newton.solves << " solves, avg "
              << static_cast<double>(result.report.newton.total_iterations) /
                     static_cast<double>(result.report.newton.solves)
              << " iterations, max " << result.report.newton.max_iterations << "\n";
  }
  std::cout << "wrote " << cfg.output_path << "\n";
  return kExitOk;
}

int cmd_convergence(const std::string& config_path, const std::string& nx_spec,
                    int ref_nx) {
  swlme::SchemeConfig cfg = swlme::load_config(config_path);
  cfg.resolve();
  const std::vector<int> nx_list = parse_nx_list(nx_spec);
  const swlme::ConvergenceTable table = swlme::convergence_study(cfg, nx_list, ref_nx);
  const std::string csv = swlme::convergence_csv(table);
  std::ofstream out(cfg.output_path);
  if (!out) throw swlme::SolverError("cannot open output file " + cfg.output_path);
  out << csv;
  std::cout << csv << "wrote " << cfg.output_path << "\n";
  return kExitOk;
}

int cmd_wellbalance(const std::string& config_path) {
  swlme::SchemeConfig cfg = swlme::load_config(config_path);
  cfg.resolve();
  const swlme::WellbalanceTable table = swlme::wellbalance_report(cfg);
  const std::string csv = swlme::wellbalance_csv(table);
  std::ofstream out(cfg.output_path);
  if (!out) throw swlme::SolverError("cannot open output file " + cfg.output_path);
  out << csv;
  std::cout << csv << "wrote " << cfg.output_path << "\n";
  return kExitOk;
}

int cmd_list_scenarios() {
  for (const swlme::Scenario& s : swlme::scenario_registry()) {
    std::cout << s.name << "\t" << s.description << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Well-balanced path-conservative DG solver for the shallow water "
               "linearized moment equations"};
  app.require_subcommand(1);

  std::string config_path;
  std::string nx_spec = "20,40,80,160,320,640";
  int ref_nx = 2560;

  CLI::App* run_cmd = app.add_subcommand("run", "execute one configured run");
  run_cmd->add_option("--config", config_path, "configuration file")->required();

  CLI::App* conv_cmd =
      app.add_subcommand("convergence", "grid-refinement error study");
  conv_cmd->add_option("--config", config_path, "configuration file")->required();
  conv_cmd->add_option("--nx", nx_spec, "comma-separated cell counts");
  conv_cmd->add_option("--ref-nx", ref_nx, "reference grid cell count");

  CLI::App* wb_cmd =
      app.add_subcommand("wellbalance", "equilibrium preservation report");
  wb_cmd->add_option("--config", config_path, "configuration file")->required();

  app.add_subcommand("list-scenarios", "print the scenario registry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(config_path);
    if (conv_cmd->parsed()) return cmd_convergence(config_path, nx_spec, ref_nx);
    if (wb_cmd->parsed()) return cmd_wellbalance(config_path);
    return cmd_list_scenarios();
  } catch (const swlme::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
