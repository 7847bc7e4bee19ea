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
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "dccat/classical.hpp"
#include "dccat/core.hpp"
#include "dccat/error.hpp"
#include "dccat/noise.hpp"
#include "dccat/parallel.hpp"

namespace dccat {

struct CircularStats {
  double mean = 0;  // wrapped to (-pi, pi]
  double std = 0;   // sqrt(-2 ln R)
};

inline CircularStats circular_stats(const std::vector<double>& angles) {
  if (angles.empty()) throw ConfigError("angles", "must not be empty");
  double c = 0, s = 0;
  for (double a : angles) {
    c += std::cos(a);
    s += std::sin(a);
  }
  const double n = static_cast<double>(angles.size());
  const double r = std::min(1.0, std::hypot(c, s) / n);
  return {std::atan2(s, c), r > 0 ? std::sqrt(-2.0 * std::log(r)) : std::numeric_limits<double>::infinity()};
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw ConfigError("median", "empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct EnsembleOptions {
  std::size_t seeds = 20;
  std::uint64_t first_seed = 1;
  double hold_dt = 1e-11;
  double t_f = 1e-6;
  IntegratorConfig integrator{};
  unsigned threads = 0;
};

/// Noisy locked runs from the two cat seeds +-alpha_ss. psi_slow samples of
/// the last `window` seconds of every run are pooled.
struct LockEnsemble {
  CircularStats psi;              // pooled over all runs
  std::vector<double> run_std;    // circular std per (seed, sign), seed-major
  std::vector<double> run_mean;
  std::vector<double> theta_gap;  // final |theta_+ - theta_-| mod 2 pi, per seed
};

inline LockEnsemble lock_ensemble(const CircuitParams& p, double sigma, double window, const EnsembleOptions& opt) {
  if (opt.seeds == 0) throw ConfigError("seeds", "must be >= 1");
  if (!(window > 0.0 && window < opt.t_f)) throw ConfigError("window", "must lie inside (0, t_f)");
  const DerivedParams d = derive(p, sigma, opt.hold_dt);
  std::vector<std::vector<double>> samples(2 * opt.seeds);
  std::vector<double> theta_end(2 * opt.seeds);
  parallel_for(2 * opt.seeds, opt.threads, [&](std::size_t k) {
    const std::uint64_t seed = opt.first_seed + k / 2;
    const double sign = k % 2 ? -1.0 : 1.0;
    const Trajectory tr = integrate(cat_seed(d.alpha_ss, sign, p), 0.0, opt.t_f, p,
                                    NoiseModel::white(sigma, seed, opt.hold_dt), opt.integrator);
    const TrajectoryViews v = fixed_point_views(tr, p);
    for (std::size_t i = 0; i < tr.times.size(); ++i)
      if (tr.times[i] >= opt.t_f - window) samples[k].push_back(v.psi_slow[i]);
    theta_end[k] = v.theta_a.back();
  });
  LockEnsemble out;
  std::vector<double> pooled;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const CircularStats c = circular_stats(samples[k]);
    out.run_mean.push_back(c.mean);
    out.run_std.push_back(c.std);
    pooled.insert(pooled.end(), samples[k].begin(), samples[k].end());
  }
  for (std::size_t s = 0; s < opt.seeds; ++s) {
    const double g = std::remainder(theta_end[2 * s] - theta_end[2 * s + 1], two_pi);
    out.theta_gap.push_back(std::abs(g));
  }
  out.psi = circular_stats(pooled);
  return out;
}

/// First time |theta_a(t) - theta_a(0)| > pi/4 per seed; +inf when the run
/// never crosses within t_f.
struct DriftStats {
  std::vector<double> crossing;  // seconds, per seed
  double median_crossing = 0;
  double predicted_T_d = 0;
  std::size_t crossed = 0;
};

inline DriftStats drift_experiment(const CircuitParams& p, double sigma, const EnsembleOptions& opt) {
  if (opt.seeds < 20) throw ConfigError("seeds", "drift ensemble needs at least 20 seeds");
  const DerivedParams d = derive(p, sigma, opt.hold_dt);
  DriftStats out;
  out.crossing.assign(opt.seeds, std::numeric_limits<double>::infinity());
  out.predicted_T_d = d.T_d;
  parallel_for(opt.seeds, opt.threads, [&](std::size_t k) {
    const Trajectory tr = integrate(cat_seed(d.alpha_ss, 1.0, p), 0.0, opt.t_f, p,
                                    NoiseModel::white(sigma, opt.first_seed + k, opt.hold_dt), opt.integrator);
    const TrajectoryViews v = fixed_point_views(tr, p);
    for (std::size_t i = 0; i < tr.times.size(); ++i)
      if (std::abs(v.theta_a[i] - v.theta_a[0]) > pi / 4.0) {
        out.crossing[k] = tr.times[i];
        break;
      }
  });
  for (double t : out.crossing) out.crossed += std::isfinite(t) ? 1 : 0;
  out.median_crossing = median(out.crossing);
  return out;
}

struct DecayFit {
  double rate = 0;         // 1/s, positive for decay
  double steady_abs = 0;   // mean smoothed |alpha| over the tail
  std::size_t peaks = 0;
};

/// Envelope decay rate of |alpha_rot| towards its steady value. |alpha_rot|
/// is smoothed with a moving average of `smoothing` seconds (a multiple of
/// all drive periods removes the micromotion), the steady value is the mean
/// of the last `tail` seconds, and ln|deviation| at the local maxima is fit
/// by least squares. Only peaks below `linear_fraction` of the steady value
/// and 100x above the residual tail ripple enter the fit.
inline DecayFit transient_decay_rate(const Trajectory& tr, double smoothing, double tail,
                                     double linear_fraction = 0.05) {
  const TrajectoryViews v = fixed_point_views(tr, tr.params);
  const std::size_t n = tr.times.size();
  if (n < 3) throw ConfigError("trajectory", "too short");
  const double dt = tr.times[1] - tr.times[0];
  const auto w = static_cast<std::size_t>(std::llround(smoothing / dt));
  if (w < 1 || w >= n) throw ConfigError("smoothing", "must cover between one sample and the trajectory");
  // Direct window sums: a running prefix sum loses the small late deviations
  // to cancellation.
  std::vector<double> t, y;
  for (std::size_t i = 0; i + w <= n; ++i) {
    double sum = 0;
    for (std::size_t j = i; j < i + w; ++j) sum += std::abs(v.alpha_rot[j]);
    t.push_back(tr.times[i + w / 2]);
    y.push_back(sum / static_cast<double>(w));
  }
  DecayFit fit;
  double count = 0;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (t[k] > t.back() - tail) {
      fit.steady_abs += y[k];
      ++count;
    }
  if (count == 0) throw ConfigError("tail", "no samples");
  fit.steady_abs /= count;
  double floor = 0;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (t[k] > t.back() - tail) floor = std::max(floor, std::abs(y[k] - fit.steady_abs));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 1; k + 1 < t.size(); ++k) {
    const double d = std::abs(y[k] - fit.steady_abs);
    if (d < std::abs(y[k - 1] - fit.steady_abs) || d <= std::abs(y[k + 1] - fit.steady_abs)) continue;
    if (d <= 100.0 * floor || d >= linear_fraction * fit.steady_abs) continue;
    const double ly = std::log(d);
    sx += t[k];
    sy += ly;
    sxx += t[k] * t[k];
    sxy += t[k] * ly;
    ++fit.peaks;
  }
  if (fit.peaks < 3) throw NumericalError("too few envelope peaks for a decay fit", tr.times.back());
  const double m = static_cast<double>(fit.peaks);
  fit.rate = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
  return fit;
}

/// Steady |alpha| statistics versus omega_a at fixed pump frequency
/// omega_p = omega_dc; omega_b follows as omega_p + 2 omega_a.
struct FrequencyScanPoint {
  double omega_a = 0;
  double mean_abs_alpha = 0;
  double std_abs_alpha = 0;
  bool diverged = false;
};

struct FrequencyScanOptions {
  double n_photons = 5.5;
  double t_f = 300e-9;
  double window = 20e-9;
  IntegratorConfig integrator{};
  unsigned threads = 0;
};

inline std::vector<FrequencyScanPoint> frequency_scan(const CircuitParams& tmpl, const std::vector<double>& omega_a,
                                                      const FrequencyScanOptions& opt = {}) {
  const double wp = tmpl.omega_dc;
  for (double w : omega_a)
    if (!(w > 0.0 && w < 0.5 * wp)) throw ConfigError("omega_a axis", "must lie inside (0, omega_p / 2)");
  if (!(opt.window > 0.0 && opt.window < opt.t_f)) throw ConfigError("window", "must lie inside (0, t_f)");
  std::vector<FrequencyScanPoint> out(omega_a.size());
  parallel_for(omega_a.size(), opt.threads, [&](std::size_t k) {
    CircuitParams p = tmpl;
    p.R0 = 0.0;
    p.eps_L = 0.0;
    p.omega_a = omega_a[k];
    p.omega_b = wp + 2.0 * omega_a[k];
    p.omega_d = p.omega_b;
    p.set_detuning(0.0);
    p.eps_d = opt.n_photons > 0.0 ? drive_for_photon_number(p, opt.n_photons) : cplx{};
    IntegratorConfig cfg = opt.integrator;
    cfg.dt = std::min(cfg.dt, max_classical_step(p));
    FrequencyScanPoint& r = out[k];
    r.omega_a = omega_a[k];
    try {
      const Trajectory tr = integrate(ClassicalState{}, 0.0, opt.t_f, p, NoiseModel{}, cfg);
      const TrajectoryViews v = fixed_point_views(tr, p);
      double s = 0, s2 = 0;
      std::size_t n = 0;
      for (std::size_t i = 0; i < tr.times.size(); ++i) {
        if (tr.times[i] < opt.t_f - opt.window) continue;
        const double a = std::abs(v.alpha_rot[i]);
        s += a;
        s2 += a * a;
        ++n;
      }
      r.mean_abs_alpha = s / n;
      r.std_abs_alpha = std::sqrt(std::max(0.0, s2 / n - r.mean_abs_alpha * r.mean_abs_alpha));
    } catch (const NumericalError&) {
      r.diverged = true;
      r.mean_abs_alpha = r.std_abs_alpha = std::numeric_limits<double>::quiet_NaN();
    }
  });
  return out;
}

/// True when some interior point of [lo, hi] has a std no larger than both
/// neighbours and strictly below the largest std found in [lo, hi].
inline bool has_local_std_minimum(const std::vector<FrequencyScanPoint>& scan, double lo, double hi) {
  double top = 0;
  for (const auto& r : scan)
    if (r.omega_a >= lo && r.omega_a <= hi && !r.diverged) top = std::max(top, r.std_abs_alpha);
  for (std::size_t i = 1; i + 1 < scan.size(); ++i) {
    const auto& r = scan[i];
    if (r.omega_a < lo || r.omega_a > hi || r.diverged || scan[i - 1].diverged || scan[i + 1].diverged) continue;
    if (r.std_abs_alpha <= scan[i - 1].std_abs_alpha && r.std_abs_alpha <= scan[i + 1].std_abs_alpha &&
        r.std_abs_alpha < top)
      return true;
  }
  return false;
}

}  // namespace dccat
