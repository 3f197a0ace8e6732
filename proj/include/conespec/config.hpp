#pragma once

// Run configuration read from JSON. Unknown keys and wrong types are errors;
// missing keys take the defaults below. docs/config.schema.json mirrors this.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "conespec/analysis.hpp"
#include "conespec/error.hpp"
#include "conespec/geometry.hpp"

namespace conespec {

struct OutputOptions {
  std::string format = "csv";  // csv | json
  std::string dir = "out";
  bool svg = false;
};

struct RunConfig {
  int n = 2;
  std::vector<int> degrees{0, 1};
  ModelSpec m1{ModelKind::Spindle, 1.0, 1.0, BcKind::Absolute};
  ModelSpec m2{ModelKind::TruncatedSpindle, 2.0, 1.0, BcKind::Absolute};
  std::vector<double> epsilons{0.2, 0.1, 0.05, 0.025};
  double lambda_max = 40.0;
  int K = 5;
  Method method = Method::Both;
  MeshSpec mesh;
  double agreement_tol = 1e-6;
  double zero_threshold_rel = 1e-8;
  std::string multiplicities = "weyl";  // weyl | n2_only
  double omega = 1.0;
  double c_rho = -1.0;                  // <= 0: derived from the partition of unity
  double upper_margin = 0.05;
  double final_rel_tol = 0.02;
  double mu_sq_max = 60.0;              // modes / aps-kernel listing cutoff
  OutputOptions output;
  int jobs = 1;

  SolverOptions solver() const {
    SolverOptions s;
    s.method = method;
    s.mesh = mesh;
    s.agreement_tol = agreement_tol;
    s.zero_threshold_rel = zero_threshold_rel;
    s.jobs = jobs;
    s.provider = multiplicities == "n2_only" ? MultiplicityProvider::n2_only()
                                             : MultiplicityProvider::weyl();
    return s;
  }

  SweepConfig sweep() const {
    SweepConfig c;
    c.n = n;
    c.degrees = degrees;
    c.m1 = build_profile(m1);
    c.m2 = build_profile(m2);
    c.epsilons = epsilons;
    c.lambda_max = lambda_max;
    c.K = K;
    c.solver = solver();
    c.omega = omega;
    c.c_rho = c_rho;
    c.upper_margin = upper_margin;
    c.final_rel_tol = final_rel_tol;
    return c;
  }
};

namespace detail {

using nlohmann::json;

inline void check_keys(const json& j, const std::string& where, std::set<std::string> allowed) {
  if (!j.is_object()) throw Error(ErrorCode::Config, where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw Error(ErrorCode::Config, where + ": unknown key '" + it.key() + "'");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  bool ok = false;
  if constexpr (std::is_same_v<T, bool>) ok = v.is_boolean();
  else if constexpr (std::is_integral_v<T>) ok = v.is_number_integer();
  else if constexpr (std::is_floating_point_v<T>) ok = v.is_number();
  else if constexpr (std::is_same_v<T, std::string>) ok = v.is_string();
  else ok = v.is_array();
  if (!ok) throw Error(ErrorCode::Config, where + "." + key + ": wrong type");
  try {
    out = v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::Config, where + "." + key + ": wrong element type");
  }
}

inline BcKind parse_bc(const std::string& s, const std::string& where) {
  if (s == "ABSOLUTE") return BcKind::Absolute;
  if (s == "APS") return BcKind::Aps;
  if (s == "DIRICHLET_LIKE") return BcKind::DirichletLike;
  throw Error(ErrorCode::Config, where + ": unknown boundary condition '" + s + "'");
}

inline ModelSpec parse_model(const json& j, ModelSpec spec, const std::string& where) {
  check_keys(j, where, {"kind", "radius", "cut", "boundary"});
  std::string kind, bc;
  read(j, "kind", kind, where);
  if (!kind.empty()) {
    if (kind == "cone") spec.kind = ModelKind::Cone;
    else if (kind == "spindle") spec.kind = ModelKind::Spindle;
    else if (kind == "truncated_spindle") spec.kind = ModelKind::TruncatedSpindle;
    else if (kind == "annulus") spec.kind = ModelKind::Annulus;
    else throw Error(ErrorCode::Config, where + ".kind: unknown model '" + kind + "'");
  }
  read(j, "radius", spec.radius, where);
  read(j, "cut", spec.cut, where);
  read(j, "boundary", bc, where);
  if (!bc.empty()) spec.boundary = parse_bc(bc, where + ".boundary");
  return spec;
}

}  // namespace detail

inline void validate(const RunConfig& c) {
  const auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw Error(ErrorCode::Config, msg);
  };
  need(c.n >= 2 && c.n <= 8, "n must be in [2, 8]");
  need(!c.degrees.empty(), "degrees must be non-empty");
  for (int p : c.degrees) need(p >= 0 && p <= c.n + 1, "degree out of range [0, n+1]");
  need(!c.epsilons.empty(), "epsilons must be non-empty");
  for (std::size_t i = 0; i < c.epsilons.size(); ++i) {
    need(c.epsilons[i] > 0.0 && c.epsilons[i] < 0.5, "epsilons must lie in (0, 1/2)");
    if (i) need(c.epsilons[i] < c.epsilons[i - 1], "epsilons must be strictly decreasing");
  }
  need(c.lambda_max > 0.0, "lambda_max must be positive");
  need(c.K >= 1, "K must be >= 1");
  need(c.mesh.order >= 2 && c.mesh.order <= 8, "fem order must be in [2, 8]");
  need(c.mesh.h_max > 0.0, "mesh h must be positive");
  need(c.agreement_tol > 0.0, "agreement_tol must be positive");
  need(c.zero_threshold_rel > 0.0 && c.zero_threshold_rel < 1e-2, "zero_threshold out of range");
  need(c.multiplicities == "weyl" || c.multiplicities == "n2_only",
       "multiplicities must be 'weyl' or 'n2_only'");
  need(c.omega > 0.0, "omega must be positive");
  need(c.mu_sq_max > 0.0, "mu_sq_max must be positive");
  need(c.output.format == "csv" || c.output.format == "json", "format must be csv or json");
  need(c.jobs >= 1, "jobs must be >= 1");
}

inline RunConfig parse_config(const nlohmann::json& j) {
  using detail::read;
  RunConfig c;
  detail::check_keys(j, "config",
                     {"n", "degrees", "m1", "m2", "epsilons", "lambda_max", "K", "solver",
                      "mcgowan", "checks", "modes", "output", "jobs", "multiplicities"});
  read(j, "n", c.n, "config");
  read(j, "degrees", c.degrees, "config");
  read(j, "epsilons", c.epsilons, "config");
  read(j, "lambda_max", c.lambda_max, "config");
  read(j, "K", c.K, "config");
  read(j, "jobs", c.jobs, "config");
  read(j, "multiplicities", c.multiplicities, "config");
  if (j.contains("m1")) c.m1 = detail::parse_model(j["m1"], c.m1, "m1");
  if (j.contains("m2")) c.m2 = detail::parse_model(j["m2"], c.m2, "m2");
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    detail::check_keys(s, "solver",
                       {"method", "fem_order", "mesh_h", "grading", "agreement_tol",
                        "zero_threshold"});
    std::string m;
    read(s, "method", m, "solver");
    if (!m.empty()) {
      if (m == "fem") c.method = Method::Fem;
      else if (m == "secular") c.method = Method::Secular;
      else if (m == "both") c.method = Method::Both;
      else throw Error(ErrorCode::Config, "solver.method: unknown method '" + m + "'");
    }
    read(s, "fem_order", c.mesh.order, "solver");
    read(s, "mesh_h", c.mesh.h_max, "solver");
    read(s, "grading", c.mesh.grading, "solver");
    read(s, "agreement_tol", c.agreement_tol, "solver");
    read(s, "zero_threshold", c.zero_threshold_rel, "solver");
  }
  if (j.contains("mcgowan")) {
    const auto& m = j["mcgowan"];
    detail::check_keys(m, "mcgowan", {"omega", "c_rho"});
    read(m, "omega", c.omega, "mcgowan");
    read(m, "c_rho", c.c_rho, "mcgowan");
  }
  if (j.contains("checks")) {
    const auto& m = j["checks"];
    detail::check_keys(m, "checks", {"upper_margin", "final_rel_tol"});
    read(m, "upper_margin", c.upper_margin, "checks");
    read(m, "final_rel_tol", c.final_rel_tol, "checks");
  }
  if (j.contains("modes")) {
    const auto& m = j["modes"];
    detail::check_keys(m, "modes", {"mu_sq_max"});
    read(m, "mu_sq_max", c.mu_sq_max, "modes");
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    detail::check_keys(o, "output", {"format", "dir", "svg"});
    read(o, "format", c.output.format, "output");
    read(o, "dir", c.output.dir, "output");
    read(o, "svg", c.output.svg, "output");
  }
  validate(c);
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, "cannot read config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Config, std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

/// Canonical JSON of the effective configuration (hashed into provenance).
/// Output directory, plot flag and job count are left out: they do not change results.
inline nlohmann::json to_json(const RunConfig& c) {
  const auto model = [](const ModelSpec& m) {
    const char* kinds[] = {"cone", "spindle", "truncated_spindle", "annulus"};
    return nlohmann::json{{"kind", kinds[int(m.kind)]},
                          {"radius", m.radius},
                          {"cut", m.cut},
                          {"boundary", to_string(m.boundary)}};
  };
  return nlohmann::json{
      {"n", c.n},
      {"degrees", c.degrees},
      {"m1", model(c.m1)},
      {"m2", model(c.m2)},
      {"epsilons", c.epsilons},
      {"lambda_max", c.lambda_max},
      {"K", c.K},
      {"multiplicities", c.multiplicities},
      {"solver",
       {{"method", to_string(c.method)},
        {"fem_order", c.mesh.order},
        {"mesh_h", c.mesh.h_max},
        {"grading", c.mesh.grading},
        {"agreement_tol", c.agreement_tol},
        {"zero_threshold", c.zero_threshold_rel}}},
      {"mcgowan", {{"omega", c.omega}, {"c_rho", c.c_rho}}},
      {"checks", {{"upper_margin", c.upper_margin}, {"final_rel_tol", c.final_rel_tol}}},
      {"modes", {{"mu_sq_max", c.mu_sq_max}}},
      {"output", {{"format", c.output.format}}}};
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string config_hash(const RunConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)fnv1a(to_json(c).dump()));
  return buf;
}

}  // namespace conespec
