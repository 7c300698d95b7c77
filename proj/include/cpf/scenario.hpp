#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cpf/model.hpp"

namespace cpf {

enum class RunKind { Law, GammaStudy, BrittleStudy, SigmaZeroStudy, FamilyCompare };

struct NamedModel {
  std::string name;
  Model model;
};

struct ScenarioConfig {
  RunKind kind = RunKind::Law;
  std::vector<NamedModel> models; // first entry is the primary model
  double L = 0.3;
  double ell = 1.0;
  std::vector<double> eps_list;
  double s_max = 4.0;
  int s_points = 200;
  double s_min = 1e-3;
  double eta = 1e-2;
  double t_max = 10.0;
  int envelope_points = 2048;
  double mesh_factor = 10.0;
  int law_nodes = 401;
  int law_max_iters = 4000;
  int extra_starts = 0;
  std::string name = "run";
  std::string raw_text; // verbatim config, echoed into the report
};

// Flat INI-style sections of key = value pairs. Parse failures carry
// file:line:column. Section names starting with "model" define models;
// [run] holds the scenario settings.
ScenarioConfig parse_config(const std::string& path);

struct RunOutcome {
  int exit_code = 0;
  std::string report_path;
};

RunOutcome run_scenario(const ScenarioConfig& cfg, const std::string& out_dir,
                        int threads, bool strict, std::uint64_t seed);

} // namespace cpf
