// Copyright 2026 The dccat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dccat/core.hpp"
#include "dccat/error.hpp"
#include "dccat/noise.hpp"
#include "dccat/quantum.hpp"

namespace dccat {

using nlohmann::json;

// Configs hold values in the user-facing units (Hz, s, ohm, F) so that
// parse(serialize(c)) == c holds exactly; conversion to rad/s happens once
// in params()/model().

struct CircuitConfig {
  double f_a = 1.1e9, f_b = 9.2e9, f_dc = 7.0e9, f_d = 9.2e9, f_L = 7.0e9;
  double phi_a = 0.24, phi_b = 0.29;
  double E_J_hz = 2.3e9;
  double kappa_b_hz = 20e6;
  double eps_d_re_hz = 0.0, eps_d_im_hz = 0.0;
  double n_photons = 0.0;  // > 0 sets eps_d for this |alpha_ss|^2 and overrides eps_d_*
  double R0 = 0.0, C0 = 15.9e-12;
  double eps_L = 0.0;

  bool operator==(const CircuitConfig&) const = default;

  CircuitParams params() const {
    CircuitParams p;
    p.omega_a = angular(f_a);
    p.omega_b = angular(f_b);
    p.omega_L = angular(f_L);
    p.omega_d = angular(f_d);
    p.omega_dc = angular(f_dc);
    p.delta_omega = p.omega_dc - p.omega_L;
    p.phi_a = phi_a;
    p.phi_b = phi_b;
    p.E_J = angular(E_J_hz);
    p.kappa_b = angular(kappa_b_hz);
    p.R0 = R0;
    p.C0 = C0;
    p.eps_L = eps_L;
    p.eps_d = cplx{angular(eps_d_re_hz), angular(eps_d_im_hz)};
    p.validate();
    if (n_photons < 0.0) throw ConfigError("circuit.n_photons", "must be >= 0");
    if (n_photons > 0.0) p.eps_d = drive_for_photon_number(p, n_photons);
    return p;
  }
};

struct NoiseConfig {
  std::string kind = "none";  // none | white_hold | constant_offset
  double sigma_hz = 0.0;
  double hold_dt = 1e-11;
  double offset_hz = 0.0;

  bool operator==(const NoiseConfig&) const = default;

  NoiseModel model(std::uint64_t seed) const {
    NoiseModel m;
    if (kind == "none")
      m.kind = NoiseKind::none;
    else if (kind == "white_hold")
      m.kind = NoiseKind::white_hold;
    else if (kind == "constant_offset")
      m.kind = NoiseKind::constant_offset;
    else
      throw ConfigError("noise.kind", "unknown kind '" + kind + "'");
    m.sigma = angular(sigma_hz);
    m.hold_dt = hold_dt;
    m.seed = seed;
    m.offset = angular(offset_hz);
    m.validate();
    return m;
  }
};

struct ClassicalConfig {
  double t_final = 1e-6;
  double dt = 0.5e-12;
  std::size_t stride = 20;
  std::size_t seeds = 1;
  std::string initial = "vacuum";  // vacuum | cat_pair
  double psi0 = 0.0;
  double window = 0.5e-6;          // final window for the psi statistics
  std::vector<double> eps_L_values;  // empty: use circuit.eps_L
  std::size_t arrow_grid = 0;      // n x n grid of (psi0, theta0) starts, 0 = off
  double arrow_t = 50e-9;

  bool operator==(const ClassicalConfig&) const = default;
};

struct TongueConfig {
  double df_min = -20e6, df_max = 20e6;
  std::size_t n_df = 41;
  double eps_L_min = 0.0, eps_L_max = 0.2;
  std::size_t n_eps_L = 41;
  std::vector<double> n_photons_values;  // empty: circuit drive only
  double t_final = 0.4e-6, window = 0.1e-6;
  double threshold_hz = 0.5e6;
  bool seed_cat = true;

  bool operator==(const TongueConfig&) const = default;
};

struct ScanConfig {
  double f_a_min = 0.1e9, f_a_max = 3.4e9;
  std::size_t n = 34;
  double n_photons = 5.5;
  double t_final = 300e-9, window = 20e-9;

  bool operator==(const ScanConfig&) const = default;
};

struct DriftConfig {
  std::size_t seeds = 40;
  double t_final = 2.5e-6;

  bool operator==(const DriftConfig&) const = default;
};

struct QuantumConfig {
  std::string kind = "effective_rwa";  // effective_rwa | full_time_dependent | full_with_filter
  std::vector<int> dims = {12, 4, 1};
  double t_final = 200e-9;
  std::size_t checkpoints = 20;
  double t_ramp = 0.0;
  double g_bc_hz = 0.0, kappa_c_hz = 0.0;
  double rtol = 1e-8, atol = 1e-10;
  int max_order = 5;
  std::string parity = "even";
  std::size_t wigner_points = 41;
  double wigner_extent = 4.0;

  bool operator==(const QuantumConfig&) const = default;

  FockDims fock_dims() const {
    if (dims.size() != 3) throw ConfigError("quantum.dims", "needs three entries");
    return {dims[0], dims[1], dims[2]};
  }
  HamiltonianSpec spec() const {
    HamiltonianSpec s;
    if (kind == "effective_rwa")
      s.kind = HamiltonianKind::effective_rwa;
    else if (kind == "full_time_dependent")
      s.kind = HamiltonianKind::full_time_dependent;
    else if (kind == "full_with_filter")
      s.kind = HamiltonianKind::full_with_filter;
    else
      throw ConfigError("quantum.kind", "unknown kind '" + kind + "'");
    s.t_ramp = t_ramp;
    s.g_bc = angular(g_bc_hz);
    s.kappa_c = angular(kappa_c_hz);
    return s;
  }
};

struct DephasingConfig {
  std::vector<int> dims = {12, 4, 1};
  double n_photons = 2.0;
  std::size_t seeds = 200;
  double t_final = 2e-6;
  std::size_t checkpoints = 8;
  double rk4_dt = 2.5e-10;

  bool operator==(const DephasingConfig&) const = default;
};

enum class ExperimentKind {
  prepare_cat_quantum,
  classical_locking,
  arnold_tongue,
  frequency_scan,
  noise_drift,
  dephasing_check
};

inline const std::vector<std::pair<ExperimentKind, std::string>>& experiment_names() {
  static const std::vector<std::pair<ExperimentKind, std::string>> names = {
      {ExperimentKind::prepare_cat_quantum, "prepare_cat_quantum"},
      {ExperimentKind::classical_locking, "classical_locking"},
      {ExperimentKind::arnold_tongue, "arnold_tongue"},
      {ExperimentKind::frequency_scan, "frequency_scan"},
      {ExperimentKind::noise_drift, "noise_drift"},
      {ExperimentKind::dephasing_check, "dephasing_check"}};
  return names;
}

inline std::string to_string(ExperimentKind k) {
  for (const auto& [kind, name] : experiment_names())
    if (kind == k) return name;
  return "unknown";
}

inline ExperimentKind parse_experiment_kind(const std::string& s) {
  for (const auto& [kind, name] : experiment_names())
    if (name == s) return kind;
  throw ConfigError("experiment", "unknown experiment kind '" + s + "'");
}

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::classical_locking;
  std::string name = "run";
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  unsigned threads = 0;
  CircuitConfig circuit;
  NoiseConfig noise;
  ClassicalConfig classical;
  TongueConfig tongue;
  ScanConfig scan;
  DriftConfig drift;
  QuantumConfig quantum;
  DephasingConfig dephasing;

  bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

/// Reads fields of one JSON object, rejecting keys it was not asked about.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "config" : path_, "must be an object");
  }
  ~ObjectReader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) throw ConfigError(field(item.key()), "unknown key");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(field(key), std::string("wrong type: ") + e.what());
    }
  }

  const json* sub(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace detail

inline json to_json(const ExperimentConfig& c) {
  const CircuitConfig& ci = c.circuit;
  json j;
  j["experiment"] = to_string(c.experiment);
  j["name"] = c.name;
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["circuit"] = {{"f_a_hz", ci.f_a},         {"f_b_hz", ci.f_b},         {"f_dc_hz", ci.f_dc},
                  {"f_d_hz", ci.f_d},         {"f_L_hz", ci.f_L},         {"phi_zpf_a", ci.phi_a},
                  {"phi_zpf_b", ci.phi_b},    {"E_J_hz", ci.E_J_hz},      {"kappa_b_hz", ci.kappa_b_hz},
                  {"eps_d_re_hz", ci.eps_d_re_hz}, {"eps_d_im_hz", ci.eps_d_im_hz}, {"n_photons", ci.n_photons},
                  {"R0_ohm", ci.R0},          {"C0_farad", ci.C0},        {"eps_L", ci.eps_L}};
  j["noise"] = {{"kind", c.noise.kind},
                {"sigma_hz", c.noise.sigma_hz},
                {"hold_dt_s", c.noise.hold_dt},
                {"offset_hz", c.noise.offset_hz}};
  const ClassicalConfig& cl = c.classical;
  j["classical"] = {{"t_final_s", cl.t_final}, {"dt_s", cl.dt},           {"stride", cl.stride},
                    {"seeds", cl.seeds},       {"initial", cl.initial},   {"psi0", cl.psi0},
                    {"window_s", cl.window},   {"eps_L_values", cl.eps_L_values},
                    {"arrow_grid", cl.arrow_grid}, {"arrow_t_s", cl.arrow_t}};
  const TongueConfig& t = c.tongue;
  j["tongue"] = {{"df_min_hz", t.df_min},     {"df_max_hz", t.df_max},       {"n_df", t.n_df},
                 {"eps_L_min", t.eps_L_min},  {"eps_L_max", t.eps_L_max},    {"n_eps_L", t.n_eps_L},
                 {"n_photons_values", t.n_photons_values}, {"t_final_s", t.t_final}, {"window_s", t.window},
                 {"threshold_hz", t.threshold_hz}, {"seed_cat", t.seed_cat}};
  j["scan"] = {{"f_a_min_hz", c.scan.f_a_min}, {"f_a_max_hz", c.scan.f_a_max}, {"n", c.scan.n},
               {"n_photons", c.scan.n_photons}, {"t_final_s", c.scan.t_final}, {"window_s", c.scan.window}};
  j["drift"] = {{"seeds", c.drift.seeds}, {"t_final_s", c.drift.t_final}};
  const QuantumConfig& q = c.quantum;
  j["quantum"] = {{"kind", q.kind},           {"dims", q.dims},           {"t_final_s", q.t_final},
                  {"checkpoints", q.checkpoints}, {"t_ramp_s", q.t_ramp}, {"g_bc_hz", q.g_bc_hz},
                  {"kappa_c_hz", q.kappa_c_hz}, {"rtol", q.rtol},         {"atol", q.atol},
                  {"max_order", q.max_order}, {"parity", q.parity},       {"wigner_points", q.wigner_points},
                  {"wigner_extent", q.wigner_extent}};
  const DephasingConfig& d = c.dephasing;
  j["dephasing"] = {{"dims", d.dims},       {"n_photons", d.n_photons},     {"seeds", d.seeds},
                    {"t_final_s", d.t_final}, {"checkpoints", d.checkpoints}, {"rk4_dt_s", d.rk4_dt}};
  return j;
}

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  detail::ObjectReader r(j, "");
  std::string kind = to_string(c.experiment);
  r.get("experiment", kind);
  c.experiment = parse_experiment_kind(kind);
  r.get("name", c.name);
  r.get("output_dir", c.output_dir);
  r.get("seed", c.seed);
  r.get("threads", c.threads);
  if (const json* s = r.sub("circuit")) {
    detail::ObjectReader o(*s, "circuit");
    CircuitConfig& ci = c.circuit;
    o.get("f_a_hz", ci.f_a);
    o.get("f_b_hz", ci.f_b);
    o.get("f_dc_hz", ci.f_dc);
    o.get("f_d_hz", ci.f_d);
    o.get("f_L_hz", ci.f_L);
    o.get("phi_zpf_a", ci.phi_a);
    o.get("phi_zpf_b", ci.phi_b);
    o.get("E_J_hz", ci.E_J_hz);
    o.get("kappa_b_hz", ci.kappa_b_hz);
    o.get("eps_d_re_hz", ci.eps_d_re_hz);
    o.get("eps_d_im_hz", ci.eps_d_im_hz);
    o.get("n_photons", ci.n_photons);
    o.get("R0_ohm", ci.R0);
    o.get("C0_farad", ci.C0);
    o.get("eps_L", ci.eps_L);
  }
  if (const json* s = r.sub("noise")) {
    detail::ObjectReader o(*s, "noise");
    o.get("kind", c.noise.kind);
    o.get("sigma_hz", c.noise.sigma_hz);
    o.get("hold_dt_s", c.noise.hold_dt);
    o.get("offset_hz", c.noise.offset_hz);
  }
  if (const json* s = r.sub("classical")) {
    detail::ObjectReader o(*s, "classical");
    ClassicalConfig& cl = c.classical;
    o.get("t_final_s", cl.t_final);
    o.get("dt_s", cl.dt);
    o.get("stride", cl.stride);
    o.get("seeds", cl.seeds);
    o.get("initial", cl.initial);
    o.get("psi0", cl.psi0);
    o.get("window_s", cl.window);
    o.get("eps_L_values", cl.eps_L_values);
    o.get("arrow_grid", cl.arrow_grid);
    o.get("arrow_t_s", cl.arrow_t);
  }
  if (const json* s = r.sub("tongue")) {
    detail::ObjectReader o(*s, "tongue");
    TongueConfig& t = c.tongue;
    o.get("df_min_hz", t.df_min);
    o.get("df_max_hz", t.df_max);
    o.get("n_df", t.n_df);
    o.get("eps_L_min", t.eps_L_min);
    o.get("eps_L_max", t.eps_L_max);
    o.get("n_eps_L", t.n_eps_L);
    o.get("n_photons_values", t.n_photons_values);
    o.get("t_final_s", t.t_final);
    o.get("window_s", t.window);
    o.get("threshold_hz", t.threshold_hz);
    o.get("seed_cat", t.seed_cat);
  }
  if (const json* s = r.sub("scan")) {
    detail::ObjectReader o(*s, "scan");
    o.get("f_a_min_hz", c.scan.f_a_min);
    o.get("f_a_max_hz", c.scan.f_a_max);
    o.get("n", c.scan.n);
    o.get("n_photons", c.scan.n_photons);
    o.get("t_final_s", c.scan.t_final);
    o.get("window_s", c.scan.window);
  }
  if (const json* s = r.sub("drift")) {
    detail::ObjectReader o(*s, "drift");
    o.get("seeds", c.drift.seeds);
    o.get("t_final_s", c.drift.t_final);
  }
  if (const json* s = r.sub("quantum")) {
    detail::ObjectReader o(*s, "quantum");
    QuantumConfig& q = c.quantum;
    o.get("kind", q.kind);
    o.get("dims", q.dims);
    o.get("t_final_s", q.t_final);
    o.get("checkpoints", q.checkpoints);
    o.get("t_ramp_s", q.t_ramp);
    o.get("g_bc_hz", q.g_bc_hz);
    o.get("kappa_c_hz", q.kappa_c_hz);
    o.get("rtol", q.rtol);
    o.get("atol", q.atol);
    o.get("max_order", q.max_order);
    o.get("parity", q.parity);
    o.get("wigner_points", q.wigner_points);
    o.get("wigner_extent", q.wigner_extent);
  }
  if (const json* s = r.sub("dephasing")) {
    detail::ObjectReader o(*s, "dephasing");
    DephasingConfig& d = c.dephasing;
    o.get("dims", d.dims);
    o.get("n_photons", d.n_photons);
    o.get("seeds", d.seeds);
    o.get("t_final_s", d.t_final);
    o.get("checkpoints", d.checkpoints);
    o.get("rk4_dt_s", d.rk4_dt);
  }
  return c;
}

inline std::string serialize(const ExperimentConfig& c) { return to_json(c).dump(2); }

inline ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// 64-bit FNV-1a of the compact JSON form, as 16 hex digits.
inline std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : to_json(c).dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dccat
