#include "cpf/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "cpf/cohesive_law.hpp"
#include "cpf/envelope.hpp"
#include "cpf/io.hpp"
#include "cpf/limit.hpp"
#include "cpf/parallel.hpp"
#include "cpf/solver.hpp"

namespace cpf {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct IniSection {
  std::string name;
  std::vector<std::pair<std::string, std::string>> entries;
  int line = 0;

  const std::string* find(const std::string& key) const {
    for (const auto& [k, v] : entries)
      if (k == key) return &v;
    return nullptr;
  }
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

std::vector<IniSection> parse_ini(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::vector<IniSection> sections;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ":1: unterminated section header");
      sections.push_back({trim(t.substr(1, t.size() - 2)), {}, lineno});
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ":" +
                        std::to_string(line.find_first_not_of(" \t") + 1) +
                        ": expected 'key = value'");
    if (sections.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ":1: entry outside any [section]");
    sections.back().entries.emplace_back(trim(t.substr(0, eq)),
                                         trim(t.substr(eq + 1)));
  }
  return sections;
}

double to_double(const std::string& v, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(where + ": not a number: '" + v + "'");
  }
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream ss(s);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::vector<double> split_list(const std::string& s, const std::string& where) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(item, where));
  }
  return out;
}

ScalarFn parse_fn(const std::string& spec, FnDomain dom, const fs::path& cfg_dir,
                  const std::string& where) {
  const auto toks = split_ws(spec);
  if (toks.empty()) throw ConfigError(where + ": empty function spec");
  const std::string& fam = toks[0];
  auto need = [&](std::size_t n) {
    if (toks.size() != n + 1)
      throw ConfigError(where + ": family '" + fam + "' expects " +
                        std::to_string(n) + " parameter(s)");
  };
  if (fam == "power") {
    need(1);
    return ScalarFn::power(to_double(toks[1], where), dom);
  }
  if (fam == "scaled-power") {
    need(2);
    return ScalarFn::scaled_power(to_double(toks[1], where),
                                  to_double(toks[2], where), dom);
  }
  if (fam == "quadratic") {
    need(0);
    return ScalarFn::quadratic(dom);
  }
  if (fam == "min-with-one") {
    need(0);
    return ScalarFn::min_with_one();
  }
  if (fam == "rational") {
    need(0);
    return ScalarFn::rational();
  }
  if (fam == "tabulated") {
    need(1);
    fs::path p = toks[1];
    if (p.is_relative()) p = cfg_dir / p;
    if (!fs::exists(p))
      throw ConfigError(where + ": tabulated file does not exist: " + p.string());
    return ScalarFn::tabulated_from_csv(p.string(), dom);
  }
  throw ConfigError(where + ": unknown function family '" + fam + "'");
}

Model parse_model(const IniSection& sec, const fs::path& cfg_dir,
                  const std::string& path) {
  Model m = make_cfi_model();
  const std::string where = path + ": [" + sec.name + "]";
  if (const auto* preset = sec.find("preset")) {
    const auto toks = split_ws(*preset);
    if (toks.empty()) throw ConfigError(where + ": empty preset");
    if (toks[0] == "cfi") {
      const double lambda = toks.size() > 1 ? to_double(toks[1], where) : 1.0;
      const double q = toks.size() > 2 ? to_double(toks[2], where) : 1.0;
      m = make_cfi_model(lambda, q);
    } else if (toks[0] == "wu") {
      const double p = toks.size() > 1 ? to_double(toks[1], where) : 2.0;
      const double lambda = toks.size() > 2 ? to_double(toks[2], where) : 1.0;
      const double q = toks.size() > 3 ? to_double(toks[3], where) : 1.0;
      m = make_wu_model(p, lambda, q);
    } else {
      throw ConfigError(where + ": unknown preset '" + toks[0] + "'");
    }
  }
  if (const auto* v = sec.find("fhat"))
    m.fhat = parse_fn(*v, FnDomain::UnitInterval, cfg_dir, where);
  if (const auto* v = sec.find("Q"))
    m.Q = parse_fn(*v, FnDomain::UnitInterval, cfg_dir, where);
  if (const auto* v = sec.find("dpot"))
    m.dpot = parse_fn(*v, FnDomain::UnitInterval, cfg_dir, where);
  if (const auto* v = sec.find("phi"))
    m.phi = parse_fn(*v, FnDomain::NonnegHalfline, cfg_dir, where);
  if (const auto* v = sec.find("kappa")) {
    const auto toks = split_ws(*v);
    if (toks.size() != 2) throw ConfigError(where + ": kappa expects 'c a'");
    m.kappa = {to_double(toks[0], where), to_double(toks[1], where)};
  }
  if (const auto* v = sec.find("gamma")) {
    const auto toks = split_ws(*v);
    if (toks.size() != 2) throw ConfigError(where + ": gamma expects 'c b'");
    m.gamma = {to_double(toks[0], where), to_double(toks[1], where)};
  }
  try {
    m.check_rules();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return m;
}

} // namespace

ScenarioConfig parse_config(const std::string& path) {
  const auto sections = parse_ini(path);
  const fs::path cfg_dir = fs::path(path).parent_path();
  ScenarioConfig cfg;
  cfg.raw_text = read_file(path);

  bool have_run = false;
  for (const auto& sec : sections) {
    if (sec.name.rfind("model", 0) == 0) {
      NamedModel nm;
      nm.name = sec.name == "model" ? "model" : trim(sec.name.substr(5));
      if (nm.name.empty()) nm.name = "model";
      nm.model = parse_model(sec, cfg_dir, path);
      cfg.models.push_back(std::move(nm));
      continue;
    }
    if (sec.name != "run")
      throw ConfigError(path + ":" + std::to_string(sec.line) +
                        ": unknown section [" + sec.name + "]");
    have_run = true;
    const std::string where = path + ": [run]";
    for (const auto& [k, v] : sec.entries) {
      if (k == "kind") {
        if (v == "law")
          cfg.kind = RunKind::Law;
        else if (v == "gamma-study")
          cfg.kind = RunKind::GammaStudy;
        else if (v == "brittle-study")
          cfg.kind = RunKind::BrittleStudy;
        else if (v == "sigma-zero-study")
          cfg.kind = RunKind::SigmaZeroStudy;
        else if (v == "family-compare")
          cfg.kind = RunKind::FamilyCompare;
        else
          throw ConfigError(where + ": unknown run kind '" + v + "'");
      } else if (k == "L")
        cfg.L = to_double(v, where);
      else if (k == "ell")
        cfg.ell = to_double(v, where);
      else if (k == "eps_list")
        cfg.eps_list = split_list(v, where);
      else if (k == "s_max")
        cfg.s_max = to_double(v, where);
      else if (k == "s_min")
        cfg.s_min = to_double(v, where);
      else if (k == "s_points")
        cfg.s_points = static_cast<int>(to_double(v, where));
      else if (k == "eta")
        cfg.eta = to_double(v, where);
      else if (k == "t_max")
        cfg.t_max = to_double(v, where);
      else if (k == "envelope_points")
        cfg.envelope_points = static_cast<int>(to_double(v, where));
      else if (k == "mesh_factor")
        cfg.mesh_factor = to_double(v, where);
      else if (k == "law_nodes")
        cfg.law_nodes = static_cast<int>(to_double(v, where));
      else if (k == "law_max_iters")
        cfg.law_max_iters = static_cast<int>(to_double(v, where));
      else if (k == "extra_starts")
        cfg.extra_starts = static_cast<int>(to_double(v, where));
      else if (k == "name")
        cfg.name = v;
      else
        throw ConfigError(where + ": unknown key '" + k + "'");
    }
  }
  if (cfg.models.empty())
    throw ConfigError(path + ": missing [model] section");
  if (!have_run) throw ConfigError(path + ": missing [run] section");
  for (std::size_t i = 1; i < cfg.eps_list.size(); ++i)
    if (!(cfg.eps_list[i] < cfg.eps_list[i - 1]))
      throw ConfigError(path + ": eps_list must be strictly decreasing");
  return cfg;
}

namespace {

std::vector<double> law_grid(double s_min, double s_max, int n) {
  // {0} followed by a log-spaced sweep.
  std::vector<double> s;
  s.push_back(0.0);
  const int m = n - 1;
  for (int i = 0; i < m; ++i)
    s.push_back(s_min * std::pow(s_max / s_min, static_cast<double>(i) / (m - 1)));
  return s;
}

json hypothesis_json(const HypothesisReport& rep) {
  json j;
  j["hp1"] = rep.hp1;
  j["hp2"] = rep.hp2;
  j["hp3"] = rep.hp3;
  j["hp4"] = rep.hp4;
  json ws = json::array();
  for (const auto& w : rep.witnesses)
    ws.push_back({{"check", w.check}, {"t", w.t}, {"value", w.value}});
  j["witnesses"] = ws;
  if (rep.sigma) {
    json s;
    s["kind"] = rep.sigma->kind == SigmaKind::Finite
                    ? "finite"
                    : (rep.sigma->kind == SigmaKind::Infinite ? "infinite" : "zero");
    s["value"] = rep.sigma->value;
    s["residual"] = rep.sigma->residual;
    j["sigma_bar"] = s;
  } else {
    j["sigma_bar"] = nullptr;
    j["sigma_note"] = rep.sigma_note;
  }
  j["phi_prime0"] = {{"value", rep.phi_prime0.value},
                     {"residual", rep.phi_prime0.residual}};
  j["phi_inf"] = {{"value", rep.phi_inf.value}, {"residual", rep.phi_inf.residual}};
  return j;
}

void write_fields_csv(const std::string& path, const Mesh1D& mesh,
                      const DiscreteState& st) {
  std::vector<double> xs(mesh.n);
  for (int i = 0; i < mesh.n; ++i) xs[i] = mesh.x(i);
  write_csv(path, {"x", "u", "v"}, {xs, st.u, st.v});
}

} // namespace

RunOutcome run_scenario(const ScenarioConfig& cfg, const std::string& out_dir,
                        int threads, bool strict, std::uint64_t seed) {
  set_threads(threads);
  fs::create_directories(out_dir);
  const fs::path out(out_dir);

  RunOutcome outcome;
  json report;
  report["name"] = cfg.name;
  report["config"] = cfg.raw_text;
  report["seed"] = seed;
  report["threads"] = threads;

  // Hypothesis validation for every model involved.
  json models_json = json::array();
  bool any_fail = false;
  for (const auto& nm : cfg.models) {
    const HypothesisReport rep = validate_hypotheses(nm.model);
    any_fail = any_fail || !rep.all_pass();
    json mj;
    mj["name"] = nm.name;
    mj["fhat"] = nm.model.fhat.describe();
    mj["Q"] = nm.model.Q.describe();
    mj["dpot"] = nm.model.dpot.describe();
    mj["phi"] = nm.model.phi.describe();
    mj["hypotheses"] = hypothesis_json(rep);
    mj["psi_one"] = psi(nm.model, 1.0);
    models_json.push_back(std::move(mj));
  }
  report["models"] = models_json;

  const std::string report_path = (out / "report.json").string();
  outcome.report_path = report_path;
  auto finish = [&](int code) {
    report["exit_status"] = code;
    std::ofstream f(report_path, std::ios::binary);
    f << report.dump(2) << "\n";
    outcome.exit_code = code;
    return outcome;
  };

  if (strict && any_fail) {
    report["error"] = "hypothesis validation failed in strict mode";
    return finish(3);
  }

  const Model& model = cfg.models.front().model;
  LawOptimConfig lawcfg;
  lawcfg.nodes = cfg.law_nodes;
  lawcfg.max_iters = cfg.law_max_iters;

  json artifacts = json::array();
  auto note_artifact = [&](const std::string& p) { artifacts.push_back(p); };

  switch (cfg.kind) {
    case RunKind::Law:
    case RunKind::FamilyCompare: {
      const auto grid = law_grid(cfg.s_min, cfg.s_max, cfg.s_points);
      for (const auto& nm : cfg.models) {
        const auto table = build_law_table(nm.model, grid, cfg.eta, lawcfg);
        const std::string csv = (out / ("law_" + nm.name + ".csv")).string();
        const std::string js = (out / ("law_" + nm.name + ".json")).string();
        table.write_csv(csv);
        table.write_json(js);
        note_artifact(csv);
        note_artifact(js);
        if (cfg.kind == RunKind::Law) break; // primary model only
      }
      break;
    }
    case RunKind::GammaStudy:
    case RunKind::BrittleStudy:
    case RunKind::SigmaZeroStudy: {
      if (cfg.eps_list.empty()) {
        report["error"] = "eps_list required for study runs";
        return finish(4);
      }
      const SolveMode mode = cfg.kind == RunKind::BrittleStudy
                                 ? SolveMode::Brittle
                                 : SolveMode::Cohesive;
      SolveConfig base = make_config(model, cfg.eps_list.front(), mode, cfg.L);
      base.extra_starts = cfg.extra_starts;
      base.seed = seed;
      Mesh1D domain{0.0, cfg.ell, 3};

      double oracle = 0.0;
      if (cfg.kind == RunKind::GammaStudy) {
        const SigmaBar sb = sigma_bar(model);
        const double slope = recession_slope(model, sb);
        const double strain_cap = std::max(1.5 * cfg.L / cfg.ell, 1.0);
        const double tmax =
            sb.kind == SigmaKind::Finite
                ? std::max({cfg.t_max, strain_cap, 3.0 * sb.value})
                : std::max(cfg.t_max, strain_cap);
        const auto env =
            build_envelope(model, sb, tmax, cfg.envelope_points);
        const auto lgrid = law_grid(std::min(cfg.s_min, 1e-3 * std::max(cfg.L, 1.0)),
                                    std::max(cfg.L * 1.05, 1e-6), 220);
        const auto law = build_law_table(model, lgrid, cfg.eta, lawcfg);
        const std::string envcsv = (out / "envelope.csv").string();
        const std::string lawcsv = (out / "law_oracle.csv").string();
        env.write_csv(envcsv);
        law.write_csv(lawcsv);
        note_artifact(envcsv);
        note_artifact(lawcsv);
        const DirichletSolution sol = dirichlet_limit(model, env, law, cfg.L, cfg.ell);
        oracle = sol.energy;
        report["oracle"] = {{"energy", sol.energy},
                            {"s_star", sol.s_star},
                            {"bulk", sol.bulk},
                            {"jump", sol.jump},
                            {"recession_slope", slope},
                            {"regime", sol.regime == Regime::Elastic
                                           ? "elastic"
                                           : (sol.regime == Regime::Cohesive
                                                  ? "cohesive"
                                                  : "saturated")}};
      } else if (cfg.kind == RunKind::BrittleStudy) {
        oracle = brittle_dirichlet_limit(model, cfg.L, cfg.ell);
        report["oracle"] = {{"energy", oracle}};
      } else {
        oracle = sigma_zero_limit(cfg.L);
        report["oracle"] = {{"energy", oracle}};
      }

      const auto rows =
          continuation(model, base, cfg.eps_list, cfg.L, domain, cfg.mesh_factor);

      std::vector<double> eps_col, energy_col, oracle_col, gap_col;
      json conv = json::array();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const double e = r.energy.total();
        const double gap =
            std::abs(e - oracle) / std::max(std::abs(oracle), 1.0e-12);
        eps_col.push_back(r.eps);
        energy_col.push_back(e);
        oracle_col.push_back(oracle);
        gap_col.push_back(oracle != 0.0 ? gap : e);
        const std::string fields =
            (out / ("fields_" + cfg.name + "_" + std::to_string(i) + ".csv"))
                .string();
        Mesh1D mesh = domain;
        mesh.n = r.n_nodes;
        write_fields_csv(fields, mesh, r.state);
        note_artifact(fields);
        conv.push_back({{"eps", r.eps},
                        {"energy", e},
                        {"elastic", r.energy.elastic},
                        {"potential", r.energy.potential},
                        {"gradient", r.energy.gradient},
                        {"oracle", oracle},
                        {"rel_gap", gap_col.back()},
                        {"min_v", r.min_v},
                        {"max_strain", r.max_strain},
                        {"n_nodes", r.n_nodes},
                        {"fields_csv", fields}});
      }
      const std::string convcsv = (out / ("convergence_" + cfg.name + ".csv")).string();
      write_csv(convcsv, {"eps", "energy", "oracle", "rel_gap"},
                {eps_col, energy_col, oracle_col, gap_col});
      note_artifact(convcsv);
      report["convergence"] = conv;
      report["convergence_csv"] = convcsv;
      break;
    }
  }

  report["artifacts"] = artifacts;
  return finish(0);
}

} // namespace cpf
