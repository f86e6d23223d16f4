#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "zener/dg_solver.hpp"
#include "zener/manufactured.hpp"
#include "zener/materials.hpp"
#include "zener/mesh.hpp"

namespace zener {

// Run configuration (JSON).  See README for the schema.
struct RunConfig {
  // mesh: either a file or the unit-square generator
  std::string mesh_file;
  int mesh_n = 4;
  double interface_x = 0.5;

  MaterialTable materials = composite_materials();
  Scheme scheme = Scheme::CG;
  int order = 1;
  double T = 1.0;
  int steps = 0;    // 0: derive from dt
  double dt = 0.0;  // 0: derive from steps
  PenaltyConfig penalty;
  std::string case_name = "composite";  // composite | elastic | free | zero
  std::string output_dir = "out";
  int output_every = 0;  // 0: final state only
  int levels = 4;
  int threads = 1;
  double cfl_fraction = 0.5;
  double dt_coeff = 0.5;

  TimeGrid grid() const {
    if (steps > 0) return TimeGrid(T, steps);
    if (dt > 0.0) return TimeGrid(T, std::max(2, static_cast<int>(std::ceil(T / dt - 1e-9))));
    throw ConfigError("either 'steps' or 'dt' must be given");
  }
};

namespace detail {

using json = nlohmann::json;

inline void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": missing or wrong type");
  }
}

inline IsotropicTensor read_lame(const json& j, const std::string& where) {
  check_keys(j, {"lambda", "mu"}, where);
  return {get<double>(j, "lambda", where), get<double>(j, "mu", where)};
}

inline MaterialTable read_materials(const json& j) {
  if (!j.is_object() || j.empty()) throw ConfigError("materials: expected a non-empty object keyed by subdomain id");
  MaterialTable t;
  for (const auto& [key, m] : j.items()) {
    int id = 0;
    std::size_t used = 0;
    try {
      id = std::stoi(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != key.size()) throw ConfigError("materials: key '" + key + "' is not an integer subdomain id");
    const std::string where = "materials." + key;
    check_keys(m, {"rho", "omega", "C", "D"}, where);
    Material mat;
    mat.rho = get<double>(m, "rho", where);
    mat.omega = m.contains("omega") ? get<double>(m, "omega", where) : 0.0;
    if (!m.contains("C")) throw ConfigError(where + ".C: missing");
    mat.C = read_lame(m.at("C"), where + ".C");
    if (m.contains("D")) mat.D = read_lame(m.at("D"), where + ".D");
    if (mat.omega > 0.0 && !m.contains("D")) throw ConfigError(where + ".D: required when omega > 0");
    t.set(id, mat);
  }
  try {
    t.validate();
  } catch (const MaterialError& e) {
    throw ConfigError(e.what());
  }
  return t;
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  using detail::get;
  using detail::json;
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  detail::check_keys(j, {"mesh", "materials", "scheme", "order", "T", "steps", "dt", "penalty", "case", "output",
                         "levels", "threads", "cfl_fraction", "dt_coeff"},
                     "config");
  RunConfig c;
  if (j.contains("mesh")) {
    const json& m = j["mesh"];
    detail::check_keys(m, {"file", "generator", "n", "interface_x"}, "mesh");
    if (m.contains("file")) {
      if (m.contains("generator")) throw ConfigError("mesh: give either 'file' or 'generator'");
      c.mesh_file = get<std::string>(m, "file", "mesh");
    } else {
      const std::string gen = m.contains("generator") ? get<std::string>(m, "generator", "mesh") : "unit_square";
      if (gen != "unit_square") throw ConfigError("mesh.generator: unknown generator '" + gen + "'");
      if (m.contains("n")) c.mesh_n = get<int>(m, "n", "mesh");
      if (m.contains("interface_x")) c.interface_x = get<double>(m, "interface_x", "mesh");
      if (c.mesh_n < 1) throw ConfigError("mesh.n must be >= 1");
    }
  }
  if (j.contains("materials")) c.materials = detail::read_materials(j["materials"]);
  if (j.contains("scheme")) {
    const std::string s = get<std::string>(j, "scheme", "config");
    if (s == "cg") c.scheme = Scheme::CG;
    else if (s == "dg") c.scheme = Scheme::DG;
    else throw ConfigError("scheme must be 'cg' or 'dg'");
  }
  if (j.contains("order")) c.order = get<int>(j, "order", "config");
  if (j.contains("T")) c.T = get<double>(j, "T", "config");
  if (j.contains("steps")) c.steps = get<int>(j, "steps", "config");
  if (j.contains("dt")) c.dt = get<double>(j, "dt", "config");
  if (j.contains("penalty")) {
    const json& p = j["penalty"];
    if (p.is_number()) {
      c.penalty.mode = PenaltyConfig::Mode::Fixed;
      c.penalty.a = p.get<double>();
    } else {
      detail::check_keys(p, {"mode", "a", "safety"}, "penalty");
      const std::string mode = p.contains("mode") ? get<std::string>(p, "mode", "penalty") : "auto";
      if (mode == "auto") c.penalty.mode = PenaltyConfig::Mode::Auto;
      else if (mode == "fixed") c.penalty.mode = PenaltyConfig::Mode::Fixed;
      else throw ConfigError("penalty.mode must be 'auto' or 'fixed'");
      if (p.contains("a")) c.penalty.a = get<double>(p, "a", "penalty");
      if (p.contains("safety")) c.penalty.safety = get<double>(p, "safety", "penalty");
    }
  }
  if (j.contains("case")) c.case_name = get<std::string>(j, "case", "config");
  if (j.contains("output")) {
    const json& o = j["output"];
    detail::check_keys(o, {"dir", "every"}, "output");
    if (o.contains("dir")) c.output_dir = get<std::string>(o, "dir", "output");
    if (o.contains("every")) c.output_every = get<int>(o, "every", "output");
  }
  if (j.contains("levels")) c.levels = get<int>(j, "levels", "config");
  if (j.contains("threads")) c.threads = get<int>(j, "threads", "config");
  if (j.contains("cfl_fraction")) c.cfl_fraction = get<double>(j, "cfl_fraction", "config");
  if (j.contains("dt_coeff")) c.dt_coeff = get<double>(j, "dt_coeff", "config");
  return c;
}

// Checks that do not depend on the mesh.  Call again after CLI overrides.
inline void validate_config(const RunConfig& c) {
  if (c.order < 1 || c.order > 3) throw ConfigError("order must be 1, 2 or 3");
  if (!(c.T > 0.0)) throw ConfigError("T must be positive");
  if (c.steps != 0 && c.steps < 2) throw ConfigError("steps must be >= 2");
  if (c.dt < 0.0) throw ConfigError("dt must be positive");
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
  if (c.output_every < 0) throw ConfigError("output.every must be >= 0");
  if (c.penalty.mode == PenaltyConfig::Mode::Fixed && !(c.penalty.a > 0.0))
    throw ConfigError("penalty must be positive");
  if (!(c.penalty.safety > 0.0)) throw ConfigError("penalty.safety must be positive");
  if (!(c.cfl_fraction > 0.0)) throw ConfigError("cfl_fraction must be positive");
  if (!(c.dt_coeff > 0.0)) throw ConfigError("dt_coeff must be positive");
  static const std::set<std::string> cases = {"composite", "elastic", "free", "zero"};
  if (!cases.count(c.case_name)) throw ConfigError("case must be one of composite, elastic, free, zero");
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig c = parse_config(ss.str());
  // mesh files are relative to the config file
  if (!c.mesh_file.empty() && std::filesystem::path(c.mesh_file).is_relative())
    c.mesh_file = (std::filesystem::path(path).parent_path() / c.mesh_file).string();
  validate_config(c);
  return c;
}

inline Mesh config_mesh(const RunConfig& c) {
  Mesh m;
  if (!c.mesh_file.empty()) {
    const bool gmsh = c.mesh_file.size() > 4 && c.mesh_file.substr(c.mesh_file.size() - 4) == ".msh";
    m = gmsh ? load_gmsh(c.mesh_file) : load_mesh(c.mesh_file);
  } else {
    m = unit_square(c.mesh_n, c.interface_x);
  }
  try {
    c.materials.check_subdomains(m.subdomain_ids());
  } catch (const MaterialError& e) {
    throw ConfigError(e.what());
  }
  return m;
}

// Manufactured case built on the configured materials; only the
// "composite" and "elastic" cases have an exact solution.
inline std::optional<ManufacturedCase> config_case(const RunConfig& c) {
  if (c.case_name == "composite") return make_case_separable(CompositeField{}, c.materials, "composite");
  if (c.case_name == "elastic") {
    MaterialTable t;
    for (auto [id, m] : c.materials.entries()) {
      m.omega = 0.0;
      t.set(id, m);
    }
    return make_case_separable(CompositeField{}, t, "elastic");
  }
  return std::nullopt;
}

inline ProblemData config_data(const RunConfig& c, const MaterialTable& materials) {
  if (c.case_name == "free") return free_vibration_data(materials);
  if (c.case_name == "zero") return ProblemData{};
  return config_case(c)->data;
}

}  // namespace zener
