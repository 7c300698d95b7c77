#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "cpf/io.hpp"
#include "cpf/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"cpflab: cohesive phase-field laboratory scenario runner"};
  std::string config_path;
  std::string out_dir = "./out";
  int threads = 0;
  bool strict = false;
  std::uint64_t seed = 42;

  app.add_option("--config", config_path, "Scenario config file (INI sections)")
      ->required();
  app.add_option("--out-dir", out_dir, "Output directory (default ./out)");
  app.add_option("--threads", threads,
                 "Worker threads (default: available parallelism)");
  app.add_flag("--strict", strict, "Hypothesis validation failures are fatal");
  app.add_option("--seed", seed, "Seed for multistart perturbations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    const cpf::ScenarioConfig cfg = cpf::parse_config(config_path);
    const cpf::RunOutcome out = cpf::run_scenario(cfg, out_dir, threads, strict, seed);
    if (out.exit_code == 0)
      std::cout << "report: " << out.report_path << "\n";
    else
      std::cerr << "run failed (status " << out.exit_code << "), see "
                << out.report_path << "\n";
    return out.exit_code;
  } catch (const cpf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
