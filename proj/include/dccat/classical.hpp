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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "dccat/core.hpp"
#include "dccat/error.hpp"
#include "dccat/io.hpp"
#include "dccat/noise.hpp"

namespace dccat {

/// Classical mode amplitudes alpha = (phi_a + i n_a)/2, beta likewise, the RC
/// branch variable n_R and the junction phase in the locking-tone frame,
/// phi_J_hat = phi_J - omega_L t.
struct ClassicalState {
  cplx alpha{0.0, 0.0};
  cplx beta{0.0, 0.0};
  double n_R = 0.0;
  double phi_J_hat = 0.0;

  bool operator==(const ClassicalState&) const = default;
};

inline ClassicalState operator+(const ClassicalState& x, const ClassicalState& y) {
  return {x.alpha + y.alpha, x.beta + y.beta, x.n_R + y.n_R, x.phi_J_hat + y.phi_J_hat};
}
inline ClassicalState operator*(double c, const ClassicalState& x) {
  return {c * x.alpha, c * x.beta, c * x.n_R, c * x.phi_J_hat};
}

enum class Stepper {
  rk4_rotating,  // RK4 on amplitudes in the frame of the bare mode frequencies
  rk4_lab        // RK4 directly on the lab-frame equations
};

struct IntegratorConfig {
  double dt = 0.5e-12;
  std::size_t stride = 20;
  double guard = 1e3;
  Stepper stepper = Stepper::rk4_rotating;

  bool operator==(const IntegratorConfig&) const = default;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<ClassicalState> states;
  CircuitParams params;
  std::uint64_t provenance = 0;
};

namespace detail {

/// Precomputed coefficients of the full equations.
struct FullModel {
  explicit FullModel(const CircuitParams& p)
      : p(p),
        has_rc(p.R0 > 0.0),
        inv_tau(has_rc ? 1.0 / (p.R0 * p.C0) : 0.0),
        nu0(locking_strength(p.E_J, p.R0)),
        force_a(p.E_J * p.phi_a),
        force_b(p.E_J * p.phi_b),
        lock_amp(p.eps_L * p.omega_L) {}

  CircuitParams p;
  bool has_rc;
  double inv_tau;
  double nu0;
  double force_a, force_b;
  double lock_amp;
};

struct Phasors {
  double cos_L, sin_L;  // omega_L t
  cplx drive;           // eps_d e^{-i omega_d t}
  cplx rot_a, rot_b;    // e^{i omega_a t}, e^{i omega_b t}

  static Phasors at(const FullModel& m, double t) {
    Phasors ph;
    ph.cos_L = std::cos(m.p.omega_L * t);
    ph.sin_L = std::sin(m.p.omega_L * t);
    ph.drive = m.p.eps_d * std::polar(1.0, -m.p.omega_d * t);
    ph.rot_a = std::polar(1.0, m.p.omega_a * t);
    ph.rot_b = std::polar(1.0, m.p.omega_b * t);
    return ph;
  }
};

/// Everything in the equations except the free rotations -i omega alpha,
/// -i omega beta. For the amplitudes this is the forcing; for n_R and the
/// junction phase it is the full derivative.
inline ClassicalState forcing(const FullModel& m, const ClassicalState& s, const Phasors& ph, double dw_noise) {
  const double sj = std::sin(s.phi_J_hat) * ph.cos_L + std::cos(s.phi_J_hat) * ph.sin_L;
  const double na = 2.0 * s.alpha.imag();
  const double nb = 2.0 * s.beta.imag();
  ClassicalState d;
  d.alpha = I * (m.force_a * sj);
  d.beta = I * (m.force_b * sj - 0.5 * m.p.kappa_b * nb - 2.0 * ph.drive.real());
  double feedback = 0.0;
  if (m.has_rc) {
    d.n_R = -s.n_R * m.inv_tau + m.nu0 * sj;
    feedback = s.n_R * m.inv_tau;
  }
  d.phi_J_hat = m.p.delta_omega + dw_noise - m.p.phi_a * m.p.omega_a * na - m.p.phi_b * m.p.omega_b * nb -
                feedback + m.lock_amp * ph.cos_L;
  return d;
}

inline ClassicalState rhs_lab(const FullModel& m, const ClassicalState& s, const Phasors& ph, double dw) {
  ClassicalState d = forcing(m, s, ph, dw);
  d.alpha += -I * m.p.omega_a * s.alpha;
  d.beta += -I * m.p.omega_b * s.beta;
  return d;
}

}  // namespace detail

/// Time derivative of the full classical equations at time t, with the
/// junction frequency noise value dw_noise.
inline ClassicalState rhs_full(const ClassicalState& s, double t, const CircuitParams& p, double dw_noise = 0.0) {
  const detail::FullModel m(p);
  return detail::rhs_lab(m, s, detail::Phasors::at(m, t), dw_noise);
}

inline ClassicalState rhs_full(const ClassicalState& s, double t, const CircuitParams& p, const NoisePath& noise) {
  return rhs_full(s, t, p, noise.value(t));
}

/// Largest step allowed for a given buffer frequency.
inline double max_classical_step(const CircuitParams& p) { return (two_pi / p.omega_b) / 20.0; }

/// Integrates the full equations on [t0, t1] with fixed-step RK4. The noise
/// value is held constant over each step (sampled at the step midpoint).
inline Trajectory integrate(const ClassicalState& initial, double t0, double t1, const CircuitParams& p,
                            const NoisePath& noise, const IntegratorConfig& cfg = {}) {
  p.validate();
  if (!(t1 > t0)) throw ConfigError("t_span", "t1 must exceed t0");
  if (!(cfg.dt > 0.0)) throw ConfigError("dt", "must be > 0");
  if (cfg.dt > max_classical_step(p) * (1.0 + 1e-12))
    throw ConfigError("dt", "must resolve the buffer frequency: dt <= (2 pi / omega_b) / 20");
  if (cfg.stride == 0) throw ConfigError("stride", "must be >= 1");

  const auto n = static_cast<std::size_t>(std::ceil((t1 - t0) / cfg.dt - 1e-9));
  const double h = (t1 - t0) / static_cast<double>(n);
  const detail::FullModel m(p);
  const bool noisy = !noise.is_zero();

  Trajectory traj;
  traj.params = p;
  traj.provenance = provenance_id(p);
  traj.times.reserve(n / cfg.stride + 2);
  traj.states.reserve(n / cfg.stride + 2);
  traj.times.push_back(t0);
  traj.states.push_back(initial);

  auto check = [&](const ClassicalState& s, double t) {
    const double a = std::abs(s.alpha), b = std::abs(s.beta);
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(s.n_R) || !std::isfinite(s.phi_J_hat))
      throw NumericalError("non-finite classical state", t);
    if (a > cfg.guard || b > cfg.guard) throw NumericalError("divergence guard exceeded", t);
  };

  ClassicalState s = initial;
  detail::Phasors ph0 = detail::Phasors::at(m, t0);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = t0 + static_cast<double>(k) * h;
    const double tm = t + 0.5 * h;
    const double te = t0 + static_cast<double>(k + 1) * h;
    const double dw = noisy ? noise.value(tm) : 0.0;
    const detail::Phasors phm = detail::Phasors::at(m, tm);
    const detail::Phasors phe = detail::Phasors::at(m, te);

    if (cfg.stepper == Stepper::rk4_lab) {
      const ClassicalState k1 = detail::rhs_lab(m, s, ph0, dw);
      const ClassicalState k2 = detail::rhs_lab(m, s + (0.5 * h) * k1, phm, dw);
      const ClassicalState k3 = detail::rhs_lab(m, s + (0.5 * h) * k2, phm, dw);
      const ClassicalState k4 = detail::rhs_lab(m, s + h * k3, phe, dw);
      s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } else {
      // u = alpha e^{i omega_a t}, v = beta e^{i omega_b t}; the free
      // rotation is then exact and only the forcing is integrated.
      auto stage = [&](const ClassicalState& rot, const detail::Phasors& ph) {
        ClassicalState lab = rot;
        lab.alpha = rot.alpha * std::conj(ph.rot_a);
        lab.beta = rot.beta * std::conj(ph.rot_b);
        ClassicalState f = detail::forcing(m, lab, ph, dw);
        f.alpha *= ph.rot_a;
        f.beta *= ph.rot_b;
        return f;
      };
      ClassicalState r = s;
      r.alpha *= ph0.rot_a;
      r.beta *= ph0.rot_b;
      const ClassicalState k1 = stage(r, ph0);
      const ClassicalState k2 = stage(r + (0.5 * h) * k1, phm);
      const ClassicalState k3 = stage(r + (0.5 * h) * k2, phm);
      const ClassicalState k4 = stage(r + h * k3, phe);
      r = r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      s = r;
      s.alpha = r.alpha * std::conj(phe.rot_a);
      s.beta = r.beta * std::conj(phe.rot_b);
    }
    ph0 = phe;
    check(s, te);
    if ((k + 1) % cfg.stride == 0 || k + 1 == n) {
      traj.times.push_back(te);
      traj.states.push_back(s);
    }
  }
  return traj;
}

inline Trajectory integrate(const ClassicalState& initial, double t0, double t1, const CircuitParams& p,
                            const NoiseModel& noise, const IntegratorConfig& cfg = {}) {
  return integrate(initial, t0, t1, p, NoisePath(noise, t1 + 2.0 * cfg.dt), cfg);
}

/// omega_b - 2 omega_a, the frequency the junction phase should wind at.
inline double pump_frequency(const CircuitParams& p) { return p.omega_b - 2.0 * p.omega_a; }

struct TrajectoryViews {
  std::vector<double> theta_a;   // arg(alpha e^{i omega_a t}), unwrapped
  std::vector<double> psi;       // phi_J - (omega_b - 2 omega_a) t
  std::vector<double> psi_slow;  // psi with the fast mode and tone terms removed
  std::vector<double> correlation;  // 2 theta_a - psi_slow
  std::vector<cplx> alpha_rot;
  std::vector<cplx> beta_rot;
};

namespace detail {
inline void unwrap(std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    double d = v[i] - v[i - 1];
    d -= two_pi * std::round(d / two_pi);
    v[i] = v[i - 1] + d;
  }
}
}  // namespace detail

/// Frame-transformed views. psi_slow adds back 2 phi_a Re(alpha) +
/// 2 phi_b Re(beta) and subtracts eps_L sin(omega_L t); these are exact
/// integrals of fast terms in the junction phase equation, so psi_slow obeys
/// d/dt psi_slow = delta_omega + delta_omega_N - n_R / tau + const.
inline TrajectoryViews fixed_point_views(const Trajectory& traj, const CircuitParams& p) {
  if (traj.times.empty()) throw ConfigError("trajectory", "must not be empty");
  TrajectoryViews v;
  const std::size_t n = traj.times.size();
  v.theta_a.resize(n);
  v.psi.resize(n);
  v.psi_slow.resize(n);
  v.correlation.resize(n);
  v.alpha_rot.resize(n);
  v.beta_rot.resize(n);
  const double wp = pump_frequency(p);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = traj.times[i];
    const ClassicalState& s = traj.states[i];
    v.alpha_rot[i] = s.alpha * std::polar(1.0, p.omega_a * t);
    v.beta_rot[i] = s.beta * std::polar(1.0, p.omega_b * t);
    v.theta_a[i] = std::arg(v.alpha_rot[i]);
    v.psi[i] = s.phi_J_hat + (p.omega_L - wp) * t;
    v.psi_slow[i] = v.psi[i] + 2.0 * p.phi_a * s.alpha.real() + 2.0 * p.phi_b * s.beta.real() -
                    p.eps_L * std::sin(p.omega_L * t);
  }
  detail::unwrap(v.theta_a);
  for (std::size_t i = 0; i < n; ++i) v.correlation[i] = 2.0 * v.theta_a[i] - v.psi_slow[i];
  return v;
}

/// Amplitude c_J of the oscillation at omega_dc in phi_J(t) - omega_dc t,
/// from a least-squares fit of offset + slope + cos + sin over the final
/// `window` seconds.
inline double estimate_cJ(const Trajectory& traj, const CircuitParams& p, double window) {
  const double period = two_pi / p.omega_dc;
  if (window < 10.0 * period) throw ConfigError("window", "must span at least 10 periods of omega_dc");
  if (traj.times.empty() || traj.times.back() - traj.times.front() < window * (1.0 - 1e-9))
    throw ConfigError("window", "longer than the trajectory");
  const double t_end = traj.times.back();
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    if (traj.times[i] >= t_end - window) idx.push_back(i);
  if (idx.size() < 8) throw ConfigError("window", "too few samples");
  const double tm = t_end - 0.5 * window;
  Eigen::MatrixXd A(idx.size(), 4);
  Eigen::VectorXd y(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const double t = traj.times[idx[r]];
    const double phi_J = traj.states[idx[r]].phi_J_hat + p.omega_L * t;
    y[r] = phi_J - p.omega_dc * t;
    A(r, 0) = 1.0;
    A(r, 1) = t - tm;
    A(r, 2) = std::cos(p.omega_dc * t);
    A(r, 3) = std::sin(p.omega_dc * t);
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
  return std::hypot(c[2], c[3]);
}

/// Seed on the cat branch sign * alpha with phi_J_hat(0) chosen so that
/// psi_slow(0) = psi0 for either sign.
inline ClassicalState cat_seed(cplx alpha, double sign, const CircuitParams& p, double psi0 = 0.0) {
  ClassicalState s;
  s.alpha = sign * alpha;
  s.phi_J_hat = psi0 - 2.0 * p.phi_a * s.alpha.real();
  return s;
}

inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  const TrajectoryViews v = fixed_point_views(traj, traj.params);
  CsvWriter w(path, {"t", "re_alpha", "im_alpha", "re_beta", "im_beta", "n_R", "phi_J_hat", "psi", "theta_a"});
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const ClassicalState& s = traj.states[i];
    w.row({traj.times[i], s.alpha.real(), s.alpha.imag(), s.beta.real(), s.beta.imag(), s.n_R, s.phi_J_hat,
           v.psi[i], v.theta_a[i]});
  }
}

}  // namespace dccat
