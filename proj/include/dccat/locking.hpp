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
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include <json.hpp>

#include "dccat/classical.hpp"
#include "dccat/core.hpp"
#include "dccat/io.hpp"
#include "dccat/noise.hpp"
#include "dccat/parallel.hpp"

namespace dccat {

struct LockVerdict {
  bool locked = false;
  double psi_dot = 0.0;  // rad/s
};

/// Least-squares slope of psi over [t_f - window, t_f].
inline LockVerdict classify_lock(const std::vector<double>& times, const std::vector<double>& psi, double t_f,
                                 double window, double threshold) {
  if (times.empty() || times.back() < t_f * (1.0 - 1e-12) || times.front() > 0.0)
    throw ConfigError("trajectory", "must span [0, t_f]");
  if (!(window > 0.0) || window > t_f / 4.0 * (1.0 + 1e-12)) throw ConfigError("window", "must lie in (0, t_f/4]");
  double st = 0, sp = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < times.size(); ++i)
    if (times[i] >= t_f - window && times[i] <= t_f) {
      st += times[i];
      sp += psi[i];
      ++n;
    }
  if (n < 3) throw ConfigError("window", "fewer than 3 samples");
  const double tm = st / n, pm = sp / n;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < times.size(); ++i)
    if (times[i] >= t_f - window && times[i] <= t_f) {
      num += (times[i] - tm) * (psi[i] - pm);
      den += (times[i] - tm) * (times[i] - tm);
    }
  LockVerdict v;
  v.psi_dot = num / den;
  v.locked = std::abs(v.psi_dot) < threshold;
  return v;
}

inline LockVerdict classify_lock(const Trajectory& traj, double t_f, double window, double threshold) {
  const TrajectoryViews v = fixed_point_views(traj, traj.params);
  return classify_lock(traj.times, v.psi, t_f, window, threshold);
}

enum class CellStatus : int { unlocked = 0, locked = 1, diverged = 2 };

struct TongueOptions {
  double t_f = 0.4e-6;
  double window = 0.1e-6;
  double threshold = angular(0.5e6);
  /// Rows are stretched to at least `settle` lock relaxation times
  /// 1/half-width, at most `max_stretch` * t_f; the window scales with them.
  /// Set settle = 0 to run every row for t_f.
  double settle = 10.0;
  double max_stretch = 4.0;
  IntegratorConfig integrator{};
  unsigned threads = 0;
  /// Start each cell on the cat steady state alpha_ss instead of vacuum. From
  /// vacuum the buffer transient can push the RC branch onto a second,
  /// non-cat attractor at |alpha|^2 >~ 5.
  bool seed_cat = true;
  /// Optional execution order of the cells (row-major indices); results do
  /// not depend on it.
  std::vector<std::size_t> order;
};

/// Lock map over (delta_omega, eps_L). Cell (i, j) is eps_L[i], delta_omega[j].
struct ArnoldGrid {
  std::vector<double> delta_omega;
  std::vector<double> eps_L;
  cplx eps_d;
  double alpha_sq = 0;  // |alpha_ss|^2 of the drive
  double nu0 = 0;
  double phi_a = 0;
  double t_f = 0, window = 0, threshold = 0;
  std::vector<double> row_t_f;  // run length actually used on each row
  std::vector<double> psi_dot;
  std::vector<CellStatus> status;
  double runtime_s = 0;

  std::size_t index(std::size_t i, std::size_t j) const { return i * delta_omega.size() + j; }
  double bare_half_width(double eL) const { return 0.5 * eL * nu0; }
  double corrected_half_width(double eL) const {
    return bare_half_width(eL) * std::abs(1.0 - phi_a * phi_a * alpha_sq);
  }
};

inline void check_axis(const std::vector<double>& axis, const char* name) {
  if (axis.size() < 2) throw ConfigError(name, "needs at least two points");
  for (std::size_t i = 1; i < axis.size(); ++i)
    if (!(axis[i] > axis[i - 1])) throw ConfigError(name, "must be strictly increasing");
}

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / (n - 1);
  return v;
}

/// One noiseless full integration per cell with a constant junction detuning.
inline ArnoldGrid sweep_tongue(const CircuitParams& tmpl, const std::vector<double>& dw_axis,
                               const std::vector<double>& eps_L_axis, cplx eps_d, const TongueOptions& opt = {}) {
  check_axis(dw_axis, "delta_omega axis");
  check_axis(eps_L_axis, "eps_L axis");
  if (!(tmpl.R0 > 0.0)) throw ConfigError("R0", "tongue mapping needs the locking branch (R0 > 0)");
  const auto start = std::chrono::steady_clock::now();

  ArnoldGrid g;
  g.delta_omega = dw_axis;
  g.eps_L = eps_L_axis;
  g.eps_d = eps_d;
  CircuitParams base = tmpl;
  base.eps_d = eps_d;
  const DerivedParams d = derive(base, 0.0, 1e-11);
  g.alpha_sq = std::norm(d.alpha_ss);
  g.nu0 = d.nu_0;
  g.phi_a = tmpl.phi_a;
  g.t_f = opt.t_f;
  g.window = opt.window;
  g.threshold = opt.threshold;
  const std::size_t cells = dw_axis.size() * eps_L_axis.size();
  g.psi_dot.assign(cells, 0.0);
  g.status.assign(cells, CellStatus::unlocked);

  std::vector<std::size_t> order = opt.order;
  if (order.empty()) {
    order.resize(cells);
    std::iota(order.begin(), order.end(), 0);
  }
  if (order.size() != cells) throw ConfigError("order", "must be a permutation of the cells");
  if (!(opt.settle >= 0.0)) throw ConfigError("settle", "must be non-negative");
  if (!(opt.max_stretch >= 1.0)) throw ConfigError("max_stretch", "must be at least 1");
  for (double e : eps_L_axis) {
    const double w = g.corrected_half_width(e);
    const double want = w > 0.0 ? opt.settle / w : std::numeric_limits<double>::infinity();
    g.row_t_f.push_back(opt.settle > 0.0 ? std::clamp(want, opt.t_f, opt.max_stretch * opt.t_f) : opt.t_f);
  }

  parallel_for(cells, opt.threads, [&](std::size_t k) {
    const std::size_t c = order[k];
    const std::size_t i = c / dw_axis.size(), j = c % dw_axis.size();
    CircuitParams p = base;
    p.eps_L = eps_L_axis[i];
    ClassicalState seed;
    if (opt.seed_cat) seed.alpha = d.alpha_ss;
    const double t_f = g.row_t_f[i];
    try {
      const Trajectory tr = integrate(seed, 0.0, t_f, p, NoiseModel::constant(dw_axis[j]), opt.integrator);
      const LockVerdict v = classify_lock(tr, t_f, opt.window * t_f / opt.t_f, opt.threshold);
      g.psi_dot[c] = v.psi_dot;
      g.status[c] = v.locked ? CellStatus::locked : CellStatus::unlocked;
    } catch (const NumericalError&) {
      g.psi_dot[c] = std::numeric_limits<double>::quiet_NaN();
      g.status[c] = CellStatus::diverged;
    }
  });
  g.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return g;
}

/// Boundary estimates of one row: midpoint between the outermost locked cell
/// of the run containing delta_omega ~ 0 and its unlocked neighbour.
struct RowEdges {
  double eps_L = 0;
  std::optional<double> plus, minus;
};

inline std::vector<RowEdges> measured_edges(const ArnoldGrid& g) {
  std::vector<RowEdges> rows;
  const std::size_t n = g.delta_omega.size();
  std::size_t j0 = 0;
  for (std::size_t j = 1; j < n; ++j)
    if (std::abs(g.delta_omega[j]) < std::abs(g.delta_omega[j0])) j0 = j;
  for (std::size_t i = 0; i < g.eps_L.size(); ++i) {
    RowEdges r;
    r.eps_L = g.eps_L[i];
    auto locked = [&](std::size_t j) { return g.status[g.index(i, j)] == CellStatus::locked; };
    if (locked(j0)) {
      std::size_t hi = j0, lo = j0;
      while (hi + 1 < n && locked(hi + 1)) ++hi;
      while (lo > 0 && locked(lo - 1)) --lo;
      if (hi + 1 < n) r.plus = 0.5 * (g.delta_omega[hi] + g.delta_omega[hi + 1]);
      if (lo > 0) r.minus = 0.5 * (g.delta_omega[lo] + g.delta_omega[lo - 1]);
    } else {
      r.plus = 0.0;
      r.minus = 0.0;
    }
    rows.push_back(r);
  }
  return rows;
}

struct BoundaryMatch {
  std::size_t points = 0;
  std::size_t matched = 0;
  double fraction() const { return points ? static_cast<double>(matched) / points : 0.0; }
};

/// Compares measured edges with the predicted half-width on every row where
/// the prediction lies inside the delta_omega axis. A point matches when it is
/// within one cell spacing of the prediction.
inline BoundaryMatch match_boundary(const ArnoldGrid& g, bool corrected) {
  BoundaryMatch m;
  const double cell = (g.delta_omega.back() - g.delta_omega.front()) / (g.delta_omega.size() - 1);
  for (const RowEdges& r : measured_edges(g)) {
    const double w = corrected ? g.corrected_half_width(r.eps_L) : g.bare_half_width(r.eps_L);
    if (w < g.delta_omega.back()) {
      ++m.points;
      if (r.plus && std::abs(*r.plus - w) <= cell) ++m.matched;
    }
    if (-w > g.delta_omega.front()) {
      ++m.points;
      if (r.minus && std::abs(*r.minus + w) <= cell) ++m.matched;
    }
  }
  return m;
}

/// Half of the locked width on the row nearest to eps_L; nullopt if either
/// edge lies outside the axis.
inline std::optional<double> measured_half_width(const ArnoldGrid& g, double eps_L) {
  const auto rows = measured_edges(g);
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (std::abs(rows[i].eps_L - eps_L) < std::abs(rows[best].eps_L - eps_L)) best = i;
  if (!rows[best].plus || !rows[best].minus) return std::nullopt;
  return 0.5 * (*rows[best].plus - *rows[best].minus);
}

/// Mean over rows of (right edge + left edge), i.e. the offset of the tongue
/// centre from delta_omega = 0. Zero for a symmetric map.
inline double asymmetry_metric(const ArnoldGrid& g) {
  double sum = 0;
  std::size_t n = 0;
  for (const RowEdges& r : measured_edges(g))
    if (r.plus && r.minus && r.eps_L > 0.0) {
      sum += *r.plus + *r.minus;
      ++n;
    }
  return n ? sum / n : 0.0;
}

inline void write_grid_csv(const std::filesystem::path& path, const ArnoldGrid& g) {
  CsvWriter w(path, {"delta_omega", "eps_L", "psi_dot", "locked"});
  for (std::size_t i = 0; i < g.eps_L.size(); ++i)
    for (std::size_t j = 0; j < g.delta_omega.size(); ++j) {
      const std::size_t c = g.index(i, j);
      const double lock = g.status[c] == CellStatus::diverged ? -1.0 : (g.status[c] == CellStatus::locked ? 1.0 : 0.0);
      w.row({g.delta_omega[j], g.eps_L[i], g.psi_dot[c], lock});
    }
}

/// Metadata with the predicted boundary lines sampled on the eps_L axis.
inline nlohmann::json grid_metadata(const ArnoldGrid& g) {
  nlohmann::json j;
  j["units"] = {{"delta_omega", "rad/s"}, {"psi_dot", "rad/s"}, {"locked", "1 locked, 0 unlocked, -1 diverged"}};
  j["eps_d"] = {g.eps_d.real(), g.eps_d.imag()};
  j["alpha_sq"] = g.alpha_sq;
  j["nu_0"] = g.nu0;
  j["phi_zpf_a"] = g.phi_a;
  j["t_f"] = g.t_f;
  j["window"] = g.window;
  j["threshold"] = g.threshold;
  j["row_t_f"] = g.row_t_f;
  j["runtime_s"] = g.runtime_s;
  nlohmann::json bare = nlohmann::json::array(), corr = nlohmann::json::array();
  for (double e : g.eps_L) {
    bare.push_back({{"eps_L", e}, {"half_width", g.bare_half_width(e)}});
    corr.push_back({{"eps_L", e}, {"half_width", g.corrected_half_width(e)}});
  }
  j["boundaries"] = {{"bare", bare}, {"corrected", corr}};
  j["asymmetry"] = asymmetry_metric(g);
  return j;
}

}  // namespace dccat
