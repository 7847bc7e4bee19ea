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

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dccat/classical.hpp"
#include "dccat/config.hpp"
#include "dccat/core.hpp"
#include "dccat/error.hpp"
#include "dccat/experiments.hpp"
#include "dccat/io.hpp"
#include "dccat/locking.hpp"
#include "dccat/noise.hpp"
#include "dccat/quantum.hpp"

namespace dccat {

inline constexpr const char* kCodeVersion = "0.1.0";
inline constexpr int kManifestSchemaVersion = 1;

/// Exit codes of the command line tool.
enum ExitCode : int { exit_ok = 0, exit_other = 1, exit_config = 2, exit_numerical = 3 };

struct RunResult {
  std::filesystem::path dir;
  std::vector<std::string> files;  // relative to dir, manifest excluded
  json summary;
};

namespace detail {

class Bundle {
 public:
  explicit Bundle(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_))
      throw ConfigError("output_dir", "cannot create " + dir_.string());
  }
  std::filesystem::path file(const std::string& name) {
    files_.push_back(name);
    return dir_ / name;
  }
  void write_json(const std::string& name, const json& j) {
    std::ofstream out(file(name));
    if (!out) throw Error("cannot write " + name);
    out << j.dump(2) << '\n';
  }
  const std::filesystem::path& dir() const { return dir_; }
  std::vector<std::string> files() const {
    std::vector<std::string> f = files_;
    std::sort(f.begin(), f.end());
    return f;
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

inline IntegratorConfig integrator_for(const ClassicalConfig& c) {
  IntegratorConfig cfg;
  cfg.dt = c.dt;
  cfg.stride = c.stride;
  return cfg;
}

inline double require_white_sigma(const ExperimentConfig& c) {
  if (c.noise.kind != "white_hold") throw ConfigError("noise.kind", "this experiment needs white_hold noise");
  return angular(c.noise.sigma_hz);
}

inline json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json run_classical(const ExperimentConfig& c, Bundle& b) {
  const ClassicalConfig& cl = c.classical;
  if (cl.initial != "vacuum" && cl.initial != "cat_pair")
    throw ConfigError("classical.initial", "must be 'vacuum' or 'cat_pair'");
  if (cl.seeds == 0) throw ConfigError("classical.seeds", "must be >= 1");
  if (!(cl.t_final > 0.0)) throw ConfigError("classical.t_final_s", "must be > 0");
  if (!(cl.window > 0.0 && cl.window <= cl.t_final))
    throw ConfigError("classical.window_s", "must lie inside (0, t_final]");
  const CircuitParams base = c.circuit.params();
  std::vector<double> eps_L = cl.eps_L_values;
  if (eps_L.empty()) eps_L.push_back(base.eps_L);
  const DerivedParams d = derive(base, angular(c.noise.sigma_hz), c.noise.hold_dt);
  const IntegratorConfig icfg = integrator_for(cl);

  struct Job {
    std::size_t e;
    std::uint64_t seed;
    double sign;
    std::string name;
  };
  std::vector<Job> jobs;
  const bool pair = cl.initial == "cat_pair";
  for (std::size_t e = 0; e < eps_L.size(); ++e)
    for (std::size_t s = 0; s < cl.seeds; ++s)
      for (int k = 0; k < (pair ? 2 : 1); ++k) {
        const std::uint64_t seed = c.seed + s;
        std::string name = "trajectory_eL" + std::to_string(e) + "_s" + std::to_string(seed);
        if (pair) name += k == 0 ? "_plus" : "_minus";
        jobs.push_back({e, seed, k == 0 ? 1.0 : -1.0, name + ".csv"});
      }

  std::vector<json> rows(jobs.size());
  std::vector<std::filesystem::path> paths;
  for (const Job& j : jobs) paths.push_back(b.file(j.name));
  parallel_for(jobs.size(), c.threads, [&](std::size_t k) {
    const Job& j = jobs[k];
    CircuitParams p = base;
    p.eps_L = eps_L[j.e];
    const ClassicalState init = pair ? cat_seed(d.alpha_ss, j.sign, p, cl.psi0) : ClassicalState{};
    const Trajectory tr = integrate(init, 0.0, cl.t_final, p, c.noise.model(j.seed), icfg);
    write_trajectory_csv(paths[k], tr);
    const TrajectoryViews v = fixed_point_views(tr, p);
    std::vector<double> psi;
    for (std::size_t i = 0; i < tr.times.size(); ++i)
      if (tr.times[i] >= cl.t_final - cl.window) psi.push_back(v.psi_slow[i]);
    const CircularStats st = circular_stats(psi);
    const ClassicalState& last = tr.states.back();
    rows[k] = {{"file", j.name},         {"eps_L", eps_L[j.e]},     {"seed", j.seed},
               {"sign", j.sign},         {"psi_mean", st.mean},     {"psi_std", st.std},
               {"abs_alpha_final", std::abs(last.alpha)},           {"theta_a_final", v.theta_a.back()}};
  });

  json summary;
  summary["runs"] = rows;
  summary["alpha_ss"] = cplx_json(d.alpha_ss);
  summary["nu_0"] = d.nu_0;
  summary["T_d"] = d.T_d;
  json predicted = json::array();
  for (double e : eps_L) {
    NoiseModel m = c.noise.model(c.seed);
    predicted.push_back({{"eps_L", e}, {"psi_std", e > 0 ? predicted_locked_std(m, e, d.nu_0) : -1.0}});
  }
  summary["predicted"] = predicted;

  if (cl.arrow_grid > 0) {
    // Short noiseless runs from a grid of (psi0, theta0) on the cat circle,
    // at the largest eps_L of the run.
    const std::size_t n = cl.arrow_grid;
    CircuitParams p = base;
    p.eps_L = *std::max_element(eps_L.begin(), eps_L.end());
    const double r = std::abs(d.alpha_ss);
    std::vector<std::array<double, 4>> arrows(n * n);
    parallel_for(n * n, c.threads, [&](std::size_t k) {
      const double psi0 = -pi + two_pi * static_cast<double>(k / n) / n;
      const double th0 = -pi + two_pi * static_cast<double>(k % n) / n;
      ClassicalState s;
      s.alpha = std::polar(r, th0);
      s.phi_J_hat = psi0 - 2.0 * p.phi_a * s.alpha.real();
      const Trajectory tr = integrate(s, 0.0, cl.arrow_t, p, NoiseModel{}, icfg);
      const TrajectoryViews v = fixed_point_views(tr, p);
      arrows[k] = {psi0, th0, v.psi_slow.back(), v.theta_a.back()};
    });
    CsvWriter w(b.file("arrows.csv"), {"psi0", "theta0", "psi_end", "theta_end"});
    for (const auto& a : arrows) w.row({a[0], a[1], a[2], a[3]});
  }
  return summary;
}

inline json run_tongue(const ExperimentConfig& c, Bundle& b) {
  const TongueConfig& t = c.tongue;
  const CircuitParams p = c.circuit.params();
  TongueOptions opt;
  opt.t_f = t.t_final;
  opt.window = t.window;
  opt.threshold = angular(t.threshold_hz);
  opt.integrator = integrator_for(c.classical);
  opt.threads = c.threads;
  opt.seed_cat = t.seed_cat;
  if (t.n_df < 2 || t.n_eps_L < 2) throw ConfigError("tongue.n_df", "axes need at least two points");
  std::vector<double> dw = linspace(angular(t.df_min), angular(t.df_max), t.n_df);
  const std::vector<double> eL = linspace(t.eps_L_min, t.eps_L_max, t.n_eps_L);

  std::vector<double> n_values = t.n_photons_values;
  const bool from_circuit = n_values.empty();
  if (from_circuit) n_values.push_back(std::norm(derive(p, 0.0, 1e-11).alpha_ss));
  json maps = json::array();
  for (std::size_t k = 0; k < n_values.size(); ++k) {
    if (n_values[k] < 0.0) throw ConfigError("tongue.n_photons_values", "must be >= 0");
    const cplx eps_d = from_circuit ? p.eps_d : (n_values[k] > 0.0 ? drive_for_photon_number(p, n_values[k]) : cplx{});
    const ArnoldGrid g = sweep_tongue(p, dw, eL, eps_d, opt);
    const std::string stem = "grid_n" + std::to_string(k);
    write_grid_csv(b.file(stem + ".csv"), g);
    json meta = grid_metadata(g);
    meta["n_photons"] = n_values[k];
    const BoundaryMatch bare = match_boundary(g, false), corr = match_boundary(g, true);
    meta["match_fraction"] = {{"bare", bare.fraction()}, {"corrected", corr.fraction()}};
    std::size_t diverged = 0;
    for (CellStatus s : g.status) diverged += s == CellStatus::diverged;
    meta["diverged_cells"] = diverged;
    b.write_json(stem + ".json", meta);
    maps.push_back({{"file", stem + ".csv"}, {"n_photons", n_values[k]}, {"asymmetry", meta["asymmetry"]},
                    {"diverged_cells", diverged}});
  }
  return {{"maps", maps}};
}

inline json run_scan(const ExperimentConfig& c, Bundle& b) {
  const ScanConfig& s = c.scan;
  if (s.n < 3) throw ConfigError("scan.n", "needs at least three points");
  const CircuitParams p = c.circuit.params();
  std::vector<double> axis = linspace(angular(s.f_a_min), angular(s.f_a_max), s.n);
  FrequencyScanOptions opt;
  opt.n_photons = s.n_photons;
  opt.t_f = s.t_final;
  opt.window = s.window;
  opt.integrator = integrator_for(c.classical);
  opt.threads = c.threads;
  const auto scan = frequency_scan(p, axis, opt);
  CsvWriter w(b.file("scan.csv"), {"f_a_hz", "mean_abs_alpha", "std_abs_alpha", "diverged"});
  std::size_t diverged = 0;
  for (const auto& r : scan) {
    w.row({r.omega_a / two_pi, r.mean_abs_alpha, r.std_abs_alpha, r.diverged ? 1.0 : 0.0});
    diverged += r.diverged;
  }
  return {{"diverged_points", diverged},
          {"local_std_minimum_0p5_1p5_ghz", has_local_std_minimum(scan, angular(0.5e9), angular(1.5e9))}};
}

inline json run_drift(const ExperimentConfig& c, Bundle& b) {
  const CircuitParams p = c.circuit.params();
  const double sigma = require_white_sigma(c);
  EnsembleOptions opt;
  opt.seeds = c.drift.seeds;
  opt.first_seed = c.seed;
  opt.hold_dt = c.noise.hold_dt;
  opt.t_f = c.drift.t_final;
  opt.integrator = integrator_for(c.classical);
  opt.threads = c.threads;
  const DriftStats st = drift_experiment(p, sigma, opt);
  CsvWriter w(b.file("drift.csv"), {"seed", "crossing_s"});
  for (std::size_t k = 0; k < st.crossing.size(); ++k)
    w.row({static_cast<double>(c.seed + k), std::isfinite(st.crossing[k]) ? st.crossing[k] : -1.0});
  return {{"median_crossing_s", std::isfinite(st.median_crossing) ? json(st.median_crossing) : json(nullptr)},
          {"predicted_T_d_s", st.predicted_T_d},
          {"crossed", st.crossed},
          {"seeds", st.crossing.size()}};
}

inline json run_quantum(const ExperimentConfig& c, Bundle& b) {
  const QuantumConfig& q = c.quantum;
  const CircuitParams p = c.circuit.params();
  const FockDims dims = q.fock_dims();
  const HamiltonianSpec spec = q.spec();
  spec.validate(p, dims);
  if (q.checkpoints == 0) throw ConfigError("quantum.checkpoints", "must be >= 1");
  if (!(q.t_final > 0.0)) throw ConfigError("quantum.t_final_s", "must be > 0");
  if (q.parity != "even" && q.parity != "odd") throw ConfigError("quantum.parity", "must be 'even' or 'odd'");
  const Parity parity = q.parity == "even" ? Parity::even : Parity::odd;

  const FockOperators ops = FockOperators::make(dims, spec.max_dim);
  const LindbladModel model = build_model(spec, ops, p);
  const auto n = static_cast<Eigen::Index>(dims.total());
  MatrixXcd rho0 = MatrixXcd::Zero(n, n);
  rho0(0, 0) = 1.0;
  std::vector<double> times;
  for (std::size_t k = 1; k <= q.checkpoints; ++k) times.push_back(q.t_final * k / q.checkpoints);
  EvolveOptions eo;
  eo.bdf.rtol = q.rtol;
  eo.bdf.atol = q.atol;
  eo.bdf.max_order = q.max_order;
  const EvolveResult res = evolve(rho0, model, 0.0, times, eo);

  const DerivedParams d = derive(p, 0.0, 1e-11);
  // Full kinds evolve in the lab frame; the memory mode is rotated back
  // before comparing with the cat.
  const bool lab = spec.kind != HamiltonianKind::effective_rwa;
  auto memory_state = [&](const QuantumState& s) {
    MatrixXcd ra = partial_trace_a(s.rho, dims);
    if (lab)
      for (Eigen::Index j = 0; j < ra.cols(); ++j)
        for (Eigen::Index i = 0; i < ra.rows(); ++i)
          ra(i, j) *= std::polar(1.0, p.omega_a * s.time * static_cast<double>(i - j));
    return ra;
  };
  CsvWriter w(b.file("fidelity.csv"),
              {"t", "fidelity", "parity", "mean_n_a", "trace_error", "hermiticity", "min_eigenvalue"});
  double fid = 0, par = 0;
  for (const QuantumState& s : res.states) {
    const MatrixXcd ra = memory_state(s);
    const StateDiagnostics dg = diagnose(s.rho);
    double nbar = 0;
    for (Eigen::Index k = 0; k < ra.rows(); ++k) nbar += static_cast<double>(k) * ra(k, k).real();
    fid = cat_fidelity(ra, d.alpha_ss, parity);
    par = parity_a(s.rho, dims);
    w.row({s.time, fid, par, nbar, dg.trace_error, dg.hermiticity, dg.min_eigenvalue});
  }
  write_checkpoint(b.file("final_state.bin"), res.states.back(), dims);

  json summary = {{"final_fidelity", fid}, {"final_parity", par}, {"alpha_ss", cplx_json(d.alpha_ss)},
                  {"bdf_steps", res.stats.steps}, {"bdf_rejected", res.stats.rejected}};
  if (q.wigner_points >= 2) {
    const std::vector<double> axis = linspace(-q.wigner_extent, q.wigner_extent, q.wigner_points);
    const WignerResult wr = wigner(memory_state(res.states.back()), axis, axis);
    CsvWriter ww(b.file("wigner.csv"), {"x", "y", "w"});
    for (std::size_t j = 0; j < axis.size(); ++j)
      for (std::size_t i = 0; i < axis.size(); ++i)
        ww.row({axis[i], axis[j], wr.w(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))});
    summary["wigner_integral"] = wr.integral;
    if (!wr.warning.empty()) summary["wigner_warning"] = wr.warning;
  }
  return summary;
}

inline json run_dephasing(const ExperimentConfig& c, Bundle& b) {
  const DephasingConfig& dc = c.dephasing;
  DephasingCheckOptions opt;
  if (dc.dims.size() != 3) throw ConfigError("dephasing.dims", "needs three entries");
  opt.dims = {dc.dims[0], dc.dims[1], dc.dims[2]};
  opt.n_photons = dc.n_photons;
  opt.sigma = require_white_sigma(c);
  opt.hold_dt = c.noise.hold_dt;
  opt.seeds = dc.seeds;
  opt.first_seed = c.seed;
  opt.t_f = dc.t_final;
  opt.checkpoints = static_cast<int>(dc.checkpoints);
  opt.rk4_dt = dc.rk4_dt;
  opt.threads = c.threads;
  const DephasingReport rep = dephasing_channel_check(c.circuit.params(), opt);
  CsvWriter w(b.file("dephasing.csv"), {"t", "trace_distance"});
  for (std::size_t k = 0; k < rep.times.size(); ++k) w.row({rep.times[k], rep.trace_distance[k]});
  return {{"kappa_phi", rep.kappa_phi}, {"max_trace_distance", rep.max_distance}};
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace detail

/// output_dir, placed under $DCCAT_OUTPUT_ROOT when it is relative and the
/// variable is set.
inline std::filesystem::path resolve_output_dir(const ExperimentConfig& c) {
  std::filesystem::path dir = c.output_dir;
  if (dir.empty()) throw ConfigError("output_dir", "must not be empty");
  if (dir.is_relative())
    if (const char* root = std::getenv("DCCAT_OUTPUT_ROOT"); root && *root) dir = std::filesystem::path(root) / dir;
  return dir;
}

/// Executes the experiment and writes its bundle, ending with manifest.json.
inline RunResult run(const ExperimentConfig& c, const std::filesystem::path& dir) {
  detail::Bundle b(dir);
  const auto start = std::chrono::steady_clock::now();
  json summary;
  switch (c.experiment) {
    case ExperimentKind::classical_locking: summary = detail::run_classical(c, b); break;
    case ExperimentKind::arnold_tongue: summary = detail::run_tongue(c, b); break;
    case ExperimentKind::frequency_scan: summary = detail::run_scan(c, b); break;
    case ExperimentKind::noise_drift: summary = detail::run_drift(c, b); break;
    case ExperimentKind::prepare_cat_quantum: summary = detail::run_quantum(c, b); break;
    case ExperimentKind::dephasing_check: summary = detail::run_dephasing(c, b); break;
  }
  b.write_json("summary.json", summary);
  const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json manifest;
  manifest["schema_version"] = kManifestSchemaVersion;
  manifest["code_version"] = kCodeVersion;
  manifest["experiment"] = to_string(c.experiment);
  manifest["config"] = to_json(c);
  manifest["config_hash"] = config_hash(c);
  manifest["files"] = b.files();
  manifest["timestamp"] = detail::utc_timestamp();
  manifest["runtime_s"] = runtime;
  std::ofstream out(dir / "manifest.json");
  if (!out) throw Error("cannot write manifest.json");
  out << manifest.dump(2) << '\n';
  return {dir, b.files(), summary};
}

inline RunResult run(const ExperimentConfig& c) { return run(c, resolve_output_dir(c)); }

inline std::vector<std::string> preset_names() { return {"fig1c", "fig2", "fig3", "freqscan", "drift"}; }

inline ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.output_dir = name;
  if (name == "fig1c") {
    c.experiment = ExperimentKind::prepare_cat_quantum;
    c.circuit.n_photons = 5.5;
    c.quantum.kind = "full_with_filter";
    c.quantum.dims = {22, 6, 4};
    c.quantum.t_ramp = 5e-6;
    c.quantum.t_final = 6e-6;
    c.quantum.checkpoints = 60;
    // Critically damped filter with 4 g^2 / kappa_c = kappa_b.
    c.quantum.g_bc_hz = 20e6;
    c.quantum.kappa_c_hz = 80e6;
  } else if (name == "fig2") {
    c.experiment = ExperimentKind::classical_locking;
    c.circuit.n_photons = 5.5;
    c.circuit.R0 = 100.0;
    c.noise = {"white_hold", 0.1e9, 1e-11, 0.0};
    c.classical.initial = "cat_pair";
    c.classical.eps_L_values = {0.0, 0.1};
    c.classical.t_final = 1e-6;
    c.classical.window = 0.5e-6;
    c.classical.arrow_grid = 12;
  } else if (name == "fig3") {
    c.experiment = ExperimentKind::arnold_tongue;
    c.circuit.R0 = 100.0;
    c.tongue.n_photons_values = {0.0, 6.0, 7.0};
  } else if (name == "freqscan") {
    c.experiment = ExperimentKind::frequency_scan;
  } else if (name == "drift") {
    c.experiment = ExperimentKind::noise_drift;
    c.circuit.n_photons = 5.5;
    c.circuit.R0 = 100.0;
    c.noise = {"white_hold", 0.1e9, 1e-11, 0.0};
    c.drift.seeds = 40;
  } else {
    throw ConfigError("preset", "unknown preset '" + name + "'");
  }
  return c;
}

inline json derived_json(const ExperimentConfig& c) {
  const CircuitParams p = c.circuit.params();
  const double sigma = c.noise.kind == "white_hold" ? angular(c.noise.sigma_hz) : 0.0;
  const DerivedParams d = derive(p, sigma, c.noise.hold_dt);
  auto z = detail::cplx_json;
  json j = {{"units", "rad/s for rates and frequencies, s for times"},
            {"E_J_tilde", d.E_J_tilde},
            {"g2", z(d.g2)},
            {"g2_a", z(d.g2_a)},
            {"g2_b", z(d.g2_b)},
            {"kappa_2", d.kappa_2},
            {"kappa_2_defined", d.kappa_2_defined},
            {"nu_0", d.nu_0},
            {"tau", d.tau},
            {"alpha_ss", z(d.alpha_ss)},
            {"xi_a1", z(d.xi_a1)},
            {"xi_a2", z(d.xi_a2)},
            {"xi_b1", z(d.xi_b1)},
            {"xi_b2", z(d.xi_b2)},
            {"xi_bar_a", z(d.xi_bar_a)},
            {"xi_bar_b", z(d.xi_bar_b)},
            {"delta_A", d.delta_A},
            {"delta_B1", d.delta_B1},
            {"delta_B2", d.delta_B2},
            {"delta_a", d.delta_a},
            {"delta_b", d.delta_b},
            {"delta_a2", d.delta_a2},
            {"delta_b2", d.delta_b2},
            {"kappa_phi", d.kappa_phi},
            {"T_d", d.T_d},
            {"warnings", d.warnings}};
  return j;
}

/// Entry point of the `dccat` tool. Returns the process exit code.
inline int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"dccat: DC-biased Josephson junction cat-qubit simulations"};
  app.require_subcommand(1);
  std::string config_path, preset, output;
  int threads = -1;
  bool dump = false;

  auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run_cmd->add_option("config", config_path, "config file")->required();
  auto* preset_cmd = app.add_subcommand("preset", "Run a figure preset");
  preset_cmd->add_option("name", preset, "preset name")->required()->check(CLI::IsMember(preset_names()));
  preset_cmd->add_flag("--dump", dump, "print the preset config instead of running it");
  for (auto* cmd : {run_cmd, preset_cmd}) {
    cmd->add_option("-o,--output", output, "output directory (overrides the config)");
    cmd->add_option("-j,--threads", threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  }
  auto* derive_cmd = app.add_subcommand("derive", "Print the derived parameters of a config as JSON");
  derive_cmd->add_option("config", config_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_config;
  }

  try {
    if (derive_cmd->parsed()) {
      out << derived_json(load_config(config_path)).dump(2) << '\n';
      return exit_ok;
    }
    ExperimentConfig c = run_cmd->parsed() ? load_config(config_path) : preset_config(preset);
    if (threads >= 0) c.threads = static_cast<unsigned>(threads);
    if (dump) {
      out << serialize(c) << '\n';
      return exit_ok;
    }
    const std::filesystem::path dir = output.empty() ? resolve_output_dir(c) : std::filesystem::path(output);
    const RunResult r = run(c, dir);
    out << "wrote " << r.files.size() + 1 << " files to " << r.dir.string() << '\n';
    return exit_ok;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return exit_numerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_other;
  }
}

}  // namespace dccat
