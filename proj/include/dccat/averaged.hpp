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

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>

#include <Eigen/Dense>

#include "dccat/classical.hpp"
#include "dccat/core.hpp"
#include "dccat/error.hpp"

namespace dccat {

enum class ModelOrder { cat_first_order, locking_R_only, locking_RC, third_order_full };

/// Coefficients of one averaged model. Built from a single CircuitParams via
/// `from`, which records the provenance id.
struct EffectiveModel {
  ModelOrder order = ModelOrder::cat_first_order;
  cplx g2;
  cplx eps_d;
  double kappa_b = 0;
  double nu0 = 0;
  double tau = 0;
  double eps_L = 0;
  double omega_L = 0;
  double delta_omega = 0;
  double delta_A = 0, delta_B1 = 0, delta_B2 = 0;
  double kappa_ratio = 0;  // kappa_b / (4 omega_b)
  std::uint64_t provenance = 0;

  static EffectiveModel from(const CircuitParams& p, ModelOrder order) {
    const DerivedParams d = derive(p, 0.0, 1e-11);
    EffectiveModel m;
    m.order = order;
    m.g2 = d.g2;
    m.eps_d = p.eps_d;
    m.kappa_b = p.kappa_b;
    m.nu0 = d.nu_0;
    m.tau = d.tau;
    m.eps_L = p.eps_L;
    m.omega_L = p.omega_L;
    m.delta_omega = p.delta_omega;
    m.delta_A = d.delta_A;
    m.delta_B1 = d.delta_B1;
    m.delta_B2 = d.delta_B2;
    m.kappa_ratio = p.kappa_b / (4.0 * p.omega_b);
    m.provenance = provenance_id(p);
    return m;
  }

  /// eps_L nu_0 / 2
  double locking_rate() const { return 0.5 * eps_L * nu0; }
};

namespace detail {
inline void require(const EffectiveModel& m, ModelOrder o, const char* what) {
  if (m.order != o) throw ConfigError("model.order", what);
}
// Shared by the first- and third-order models so that the zero-correction
// limit of the latter reproduces the former bit for bit.
inline cplx exchange_alpha(cplx g, cplx a, cplx b) { return -2.0 * I * g * std::conj(a) * b; }
inline cplx exchange_beta(cplx g, cplx a) { return -I * std::conj(g) * a * a; }
}  // namespace detail

/// alpha' = -2i g2 alpha* beta,  beta' = -i g2* alpha^2 - kappa_b/2 beta - i eps_d
inline std::pair<cplx, cplx> rhs_cat(cplx alpha, cplx beta, const EffectiveModel& m) {
  detail::require(m, ModelOrder::cat_first_order, "rhs_cat needs cat_first_order");
  const cplx da = detail::exchange_alpha(m.g2, alpha, beta);
  const cplx db = detail::exchange_beta(m.g2, alpha) - 0.5 * m.kappa_b * beta - I * m.eps_d;
  return {da, db};
}

enum class Equilibrium { cat_plus, cat_minus, cat_vacuum, locked_pi, locked_zero };

struct CatEquilibrium {
  cplx alpha, beta;
};

/// Closed-form steady states of the first-order model.
inline CatEquilibrium cat_equilibrium(const EffectiveModel& m, Equilibrium e) {
  switch (e) {
    case Equilibrium::cat_plus:
    case Equilibrium::cat_minus: {
      cplx a = std::abs(m.g2) > 0.0 ? std::sqrt(-m.eps_d / std::conj(m.g2)) : cplx{};
      return {e == Equilibrium::cat_plus ? a : -a, 0.0};
    }
    case Equilibrium::cat_vacuum:
      return {0.0, m.kappa_b > 0.0 ? -2.0 * I * m.eps_d / m.kappa_b : cplx{}};
    default: throw ConfigError("equilibrium", "not a cat-model equilibrium");
  }
}

struct EigenPair {
  std::array<cplx, 2> exact;
  std::array<cplx, 2> limit;  // asymptotic form, slow eigenvalue second
};

/// Linearization eigenvalues at a closed-form equilibrium.
/// Cat branch: -kappa_b/4 +- (kappa_b/4) sqrt(1 - 4|g2|^2|alpha|^2/(kappa_b/4)^2),
/// limit (-kappa_b/2, -2 kappa_2 |alpha|^2). Locking: exact roots of the RC
/// Jacobian, limit (-1/tau, (eps_L nu_0 / 2) cos phi).
inline EigenPair stability(const EffectiveModel& m, Equilibrium e) {
  EigenPair out;
  switch (e) {
    case Equilibrium::cat_plus:
    case Equilibrium::cat_minus: {
      detail::require(m, ModelOrder::cat_first_order, "cat equilibria need cat_first_order");
      const double a2 = std::norm(cat_equilibrium(m, e).alpha);
      const double q = m.kappa_b / 4.0;
      const cplx root = std::sqrt(cplx(1.0 - 4.0 * std::norm(m.g2) * a2 / (q * q), 0.0));
      out.exact = {-q + q * root, -q - q * root};
      const double kappa2 = m.kappa_b > 0.0 ? 4.0 * std::norm(m.g2) / m.kappa_b : 0.0;
      out.limit = {cplx(-m.kappa_b / 2.0), cplx(-2.0 * kappa2 * a2)};
      return out;
    }
    case Equilibrium::cat_vacuum: {
      detail::require(m, ModelOrder::cat_first_order, "cat equilibria need cat_first_order");
      // alpha-subsystem: alpha' = -2i g2 beta_ss alpha*, rate +-2|g2 beta_ss|.
      const double r = 2.0 * std::abs(m.g2 * cat_equilibrium(m, e).beta);
      out.exact = {cplx(r), cplx(-r)};
      out.limit = {cplx(-m.kappa_b / 2.0), cplx(r)};
      return out;
    }
    case Equilibrium::locked_pi:
    case Equilibrium::locked_zero: {
      // Equilibrium phase for the given detuning, on the branch near pi or 0.
      const double k = m.locking_rate();
      double bias = m.delta_omega;
      if (m.order == ModelOrder::locking_R_only) bias -= m.nu0 * m.nu0 / (2.0 * m.omega_L);
      if (!(k > 0.0) || std::abs(bias) > k) throw ConfigError("equilibrium", "no locked state for this detuning");
      const double s = std::asin(-bias / k);
      const double phi = e == Equilibrium::locked_pi ? pi - s : s;
      const double lam = k * std::cos(phi);
      if (m.order == ModelOrder::locking_R_only) {
        out.exact = {cplx(lam), cplx(lam)};
        out.limit = {cplx(lam), cplx(lam)};
        return out;
      }
      detail::require(m, ModelOrder::locking_RC, "locking equilibria need a locking model");
      // J = [[0, -1/tau], [-k cos phi, -1/tau]]
      const double tr = -1.0 / m.tau;
      const double det = -k * std::cos(phi) / m.tau;
      const cplx disc = std::sqrt(cplx(tr * tr - 4.0 * det, 0.0));
      out.exact = {(tr - disc) / 2.0, (tr + disc) / 2.0};
      out.limit = {cplx(-1.0 / m.tau), cplx(lam)};
      return out;
    }
  }
  throw ConfigError("equilibrium", "unknown label");
}

struct LockingState {
  double phi = 0.0;
  double z = 0.0;  // RC only
};

/// R-only: phi' = dw - nu0^2/(2 omega_L) + (eps_L nu0/2) sin phi.
/// RC: phi' = dw - z/tau, z' = -z/tau - (eps_L nu0/2) sin phi.
inline LockingState rhs_locking(const LockingState& s, const EffectiveModel& m) {
  const double k = m.locking_rate();
  if (m.order == ModelOrder::locking_R_only)
    return {m.delta_omega - m.nu0 * m.nu0 / (2.0 * m.omega_L) + k * std::sin(s.phi), 0.0};
  detail::require(m, ModelOrder::locking_RC, "rhs_locking needs a locking model");
  return {m.delta_omega - s.z / m.tau, -s.z / m.tau - k * std::sin(s.phi)};
}

struct ThirdOrderState {
  cplx alpha, beta;
  double n_R = 0.0;
  double phi = 0.0;  // phi_J_hat
};

inline ThirdOrderState rhs_third_order(const ThirdOrderState& s, const EffectiveModel& m) {
  detail::require(m, ModelOrder::third_order_full, "rhs_third_order needs third_order_full");
  const double c = std::cos(s.phi);
  const cplx g = m.g2 * std::polar(1.0, s.phi);
  ThirdOrderState d;
  // First-order terms first, in the order used by rhs_cat.
  d.alpha = detail::exchange_alpha(g, s.alpha, s.beta) + I * m.delta_A * c * s.alpha;
  d.beta = (detail::exchange_beta(g, s.alpha) - 0.5 * m.kappa_b * s.beta - I * m.eps_d) +
           (I * m.delta_B1 * c * s.beta + I * m.delta_B2 * s.beta - m.kappa_ratio * m.eps_d);
  // Locking lines.
  const double k = m.locking_rate();
  if (m.tau > 0.0) {
    const double tone = m.nu0 * m.eps_L / (2.0 * m.tau * m.omega_L) * c;
    d.n_R = -s.n_R / m.tau - tone - k * std::sin(s.phi) * (1.0 - (m.delta_omega - s.n_R / m.tau) / m.omega_L);
    d.phi = -s.n_R / m.tau - tone + m.delta_omega;
  } else {
    d.n_R = 0.0;
    d.phi = m.delta_omega;
  }
  return d;
}

/// Copy of `m` with a different order label.
inline EffectiveModel with_order(EffectiveModel m, ModelOrder o) {
  m.order = o;
  return m;
}

struct SteadyStateResult {
  cplx alpha, beta;
  double residual = 0;  // max |rhs| / |eps_d|
  int iterations = 0;
};

/// Steady (alpha, beta) of the third-order model at fixed phi_J_hat by damped
/// Newton on the four real unknowns, seeded with the undetuned closed form.
inline SteadyStateResult third_order_steady_state(const EffectiveModel& m, double phi, double tol = 1e-12,
                                                  int max_iter = 100) {
  detail::require(m, ModelOrder::third_order_full, "needs third_order_full");
  const double scale = std::abs(m.eps_d) > 0.0 ? std::abs(m.eps_d) : 1.0;
  const cplx g = m.g2 * std::polar(1.0, phi);
  const double c = std::cos(phi);
  const cplx lin_b = I * (m.delta_B1 * c + m.delta_B2) - 0.5 * m.kappa_b;

  auto F = [&](cplx a, cplx b) -> Eigen::Vector4d {
    ThirdOrderState s{a, b, 0.0, phi};
    ThirdOrderState d = rhs_third_order(s, m);
    return Eigen::Vector4d(d.alpha.real(), d.alpha.imag(), d.beta.real(), d.beta.imag()) / scale;
  };
  // Directional derivative of the complex residual for perturbation (da, db).
  auto dF = [&](cplx a, cplx b, cplx da, cplx db) -> Eigen::Vector4d {
    const cplx ra = I * m.delta_A * c * da - 2.0 * I * g * (std::conj(da) * b + std::conj(a) * db);
    const cplx rb = lin_b * db - 2.0 * I * std::conj(g) * a * da;
    return Eigen::Vector4d(ra.real(), ra.imag(), rb.real(), rb.imag()) / scale;
  };

  SteadyStateResult r;
  r.alpha = std::abs(g) > 0.0 ? std::sqrt(-m.eps_d / std::conj(g)) : cplx{};
  r.beta = 0.0;
  Eigen::Vector4d f = F(r.alpha, r.beta);
  for (int it = 0; it < max_iter && f.lpNorm<Eigen::Infinity>() > tol; ++it) {
    Eigen::Matrix4d J;
    J.col(0) = dF(r.alpha, r.beta, 1.0, 0.0);
    J.col(1) = dF(r.alpha, r.beta, I, 0.0);
    J.col(2) = dF(r.alpha, r.beta, 0.0, 1.0);
    J.col(3) = dF(r.alpha, r.beta, 0.0, I);
    const Eigen::Vector4d step = J.fullPivLu().solve(-f);
    double lambda = 1.0;
    for (int k = 0; k < 30; ++k) {
      const cplx a = r.alpha + lambda * cplx(step[0], step[1]);
      const cplx b = r.beta + lambda * cplx(step[2], step[3]);
      const Eigen::Vector4d fn = F(a, b);
      if (fn.norm() < f.norm() || k == 29) {
        r.alpha = a;
        r.beta = b;
        f = fn;
        break;
      }
      lambda *= 0.5;
    }
    r.iterations = it + 1;
  }
  r.residual = f.lpNorm<Eigen::Infinity>();
  return r;
}

struct ComparisonMetrics {
  double rms_alpha = 0;          // RMS |alpha_avg - alpha_full| / RMS |alpha_full|
  double rms_beta = 0;           // same for beta, normalized by RMS |alpha_full|
  double rms_rel_abs_alpha = 0;  // RMS of (|alpha_avg| - |alpha_full|) / RMS |alpha_full|
  std::size_t samples = 0;
};

/// Integrates the first-order model from the full trajectory's rotating-frame
/// state at the window start and compares over [t_begin, t_end].
inline ComparisonMetrics compare_to_full(const EffectiveModel& m, const Trajectory& traj, double t_begin,
                                         double t_end, double dt = 1e-11) {
  if (m.provenance != traj.provenance)
    throw ConfigError("provenance", "model and trajectory come from different parameter sets");
  detail::require(m, ModelOrder::cat_first_order, "compare_to_full needs cat_first_order");
  const TrajectoryViews v = fixed_point_views(traj, traj.params);
  std::size_t i0 = 0;
  while (i0 < traj.times.size() && traj.times[i0] < t_begin) ++i0;
  if (i0 >= traj.times.size()) throw ConfigError("window", "starts after the trajectory");

  cplx a = v.alpha_rot[i0], b = v.beta_rot[i0];
  double t = traj.times[i0];
  double num_a = 0, num_b = 0, num_abs = 0, den = 0;
  ComparisonMetrics out;
  for (std::size_t i = i0; i < traj.times.size() && traj.times[i] <= t_end; ++i) {
    while (t < traj.times[i] - 1e-18) {
      const double h = std::min(dt, traj.times[i] - t);
      const auto [k1a, k1b] = rhs_cat(a, b, m);
      const auto [k2a, k2b] = rhs_cat(a + 0.5 * h * k1a, b + 0.5 * h * k1b, m);
      const auto [k3a, k3b] = rhs_cat(a + 0.5 * h * k2a, b + 0.5 * h * k2b, m);
      const auto [k4a, k4b] = rhs_cat(a + h * k3a, b + h * k3b, m);
      a += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
      b += h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
      t += h;
    }
    num_a += std::norm(a - v.alpha_rot[i]);
    num_b += std::norm(b - v.beta_rot[i]);
    num_abs += std::pow(std::abs(a) - std::abs(v.alpha_rot[i]), 2);
    den += std::norm(v.alpha_rot[i]);
    ++out.samples;
  }
  if (out.samples == 0 || den == 0.0) throw ConfigError("window", "no samples with nonzero amplitude");
  out.rms_alpha = std::sqrt(num_a / den);
  out.rms_beta = std::sqrt(num_b / den);
  out.rms_rel_abs_alpha = std::sqrt(num_abs / den);
  return out;
}

}  // namespace dccat
