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
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "dccat/bessel.hpp"
#include "dccat/error.hpp"
#include "dccat/units.hpp"

namespace dccat {

/// Physical circuit parameters. All rates are angular frequencies (rad/s);
/// E_J is the Josephson energy divided by hbar.
struct CircuitParams {
  double omega_a = angular(1.1e9);
  double omega_b = angular(9.2e9);
  double omega_dc = angular(7.0e9);
  double omega_d = angular(9.2e9);
  double omega_L = angular(7.0e9);
  double phi_a = 0.24;
  double phi_b = 0.29;
  double E_J = angular(2.3e9);
  double kappa_b = angular(20e6);
  cplx eps_d{0.0, 0.0};
  double R0 = 0.0;       // ohm
  double C0 = 15.9e-12;  // farad
  double eps_L = 0.0;
  double delta_omega = 0.0;  // omega_dc - omega_L
  bool matched = true;
  double matched_tolerance = angular(1e3);

  bool operator==(const CircuitParams&) const = default;

  /// Sets omega_dc = omega_L + dw and keeps delta_omega consistent.
  void set_detuning(double dw) {
    delta_omega = dw;
    omega_dc = omega_L + dw;
  }

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(name, "must be finite and > 0");
    };
    positive(omega_a, "omega_a");
    positive(omega_b, "omega_b");
    positive(omega_dc, "omega_dc");
    positive(omega_d, "omega_d");
    positive(omega_L, "omega_L");
    // phi = 0 is accepted as the decoupled limit.
    if (!(phi_a >= 0.0 && phi_a < 1.0)) throw ConfigError("phi_zpf_a", "must lie in [0, 1)");
    if (!(phi_b >= 0.0 && phi_b < 1.0)) throw ConfigError("phi_zpf_b", "must lie in [0, 1)");
    if (!(E_J >= 0.0)) throw ConfigError("E_J", "must be >= 0");
    if (!(kappa_b >= 0.0)) throw ConfigError("kappa_b", "must be >= 0");
    if (!(eps_L >= 0.0)) throw ConfigError("eps_L", "must be >= 0");
    if (!(R0 >= 0.0)) throw ConfigError("R0", "must be >= 0");
    if (R0 > 0.0 && !(C0 > 0.0)) throw ConfigError("C0", "must be > 0 when R0 > 0");
    if (!std::isfinite(eps_d.real()) || !std::isfinite(eps_d.imag()))
      throw ConfigError("eps_d", "must be finite");
    if (std::abs(delta_omega - (omega_dc - omega_L)) > 1e-9 * omega_L)
      throw ConfigError("delta_omega", "must equal omega_dc - omega_L");
  }

  bool matched_condition_holds() const {
    return std::abs(omega_dc - (omega_b - 2.0 * omega_a)) < matched_tolerance;
  }
};

/// The parameter set of the reference design (memory 1.1 GHz, buffer 9.2 GHz).
inline CircuitParams reference_params() { return CircuitParams{}; }

/// The reference design with the RC locking branch of the noise study.
inline CircuitParams reference_locking_params() {
  CircuitParams p;
  p.R0 = 100.0;
  p.C0 = 15.9e-12;
  p.eps_L = 0.1;
  return p;
}

struct DerivedParams {
  double E_J_tilde = 0;
  cplx g2, g2_a, g2_b;
  double kappa_2 = 0;
  bool kappa_2_defined = true;
  double nu_0 = 0;
  double tau = 0;
  cplx alpha_ss;
  cplx xi_a1, xi_a2, xi_b1, xi_b2, xi_bar_a, xi_bar_b;
  double delta_A = 0, delta_B1 = 0, delta_B2 = 0;
  double delta_a = 0, delta_b = 0;  // first-order frequency shifts from the displacements
  double delta_a2 = 0, delta_b2 = 0;
  double kappa_phi = 0;
  double T_d = 0;
  std::vector<std::string> warnings;
};

/// nu_0 = E_J R0 (2e/hbar)^2 with E_J given in rad/s.
inline double locking_strength(double E_J, double R0) {
  return E_J * R0 * 4.0 * phys::e * phys::e / phys::hbar;
}

inline DerivedParams derive(const CircuitParams& p, double noise_sigma, double noise_dt) {
  p.validate();
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma", "must be >= 0");
  if (!(noise_dt > 0.0)) throw ConfigError("noise_dt", "must be > 0");

  DerivedParams d;
  const double pa2 = p.phi_a * p.phi_a;
  const double pb2 = p.phi_b * p.phi_b;
  d.E_J_tilde = p.E_J * std::exp(-0.5 * pa2 - 0.5 * pb2);
  d.g2 = d.E_J_tilde * pa2 * p.phi_b / (4.0 * I);
  d.g2_a = -(pa2 / 3.0) * d.g2;
  d.g2_b = -(pb2 / 2.0) * d.g2;
  if (p.kappa_b > 0.0) {
    d.kappa_2 = 4.0 * std::norm(d.g2) / p.kappa_b;
  } else {
    d.kappa_2 = std::numeric_limits<double>::quiet_NaN();
    d.kappa_2_defined = false;
    d.warnings.push_back("kappa_2 undefined for kappa_b = 0");
  }
  d.nu_0 = locking_strength(p.E_J, p.R0);
  d.tau = p.R0 * p.C0;
  if (std::abs(d.g2) > 0.0) d.alpha_ss = std::sqrt(-p.eps_d / std::conj(d.g2));

  const double fa = p.phi_a * d.E_J_tilde / 2.0;
  const double fb = p.phi_b * d.E_J_tilde / 2.0;
  d.xi_a1 = -fa / (I * (p.omega_a - p.omega_dc));
  d.xi_a2 = fa / (I * (p.omega_a + p.omega_dc));
  d.xi_b1 = -fb / (I * (p.omega_b - p.omega_dc));
  d.xi_b2 = fb / (I * (p.omega_b + p.omega_dc));
  d.xi_bar_a = d.xi_a1 + std::conj(d.xi_a2);
  d.xi_bar_b = d.xi_b1 + std::conj(d.xi_b2);

  d.delta_A = p.E_J * pa2 * p.eps_L / 2.0;
  d.delta_B1 = p.E_J * pb2 * p.eps_L / 2.0;
  d.delta_B2 = (p.kappa_b / 2.0) * (p.kappa_b / (4.0 * p.omega_b));

  const double shift = p.phi_a * d.xi_bar_a.imag() + p.phi_b * d.xi_bar_b.imag();
  d.delta_a = d.E_J_tilde * pa2 * shift;
  d.delta_b = d.E_J_tilde * pb2 * shift;

  const double wa = p.omega_a, wb = p.omega_b;
  const double pref = std::pow(d.E_J_tilde / 2.0, 2);
  d.delta_a2 = pref * pa2 *
               (pa2 / (wb - 4.0 * wa) - pa2 / wb - pb2 / (2.0 * wb - wa) -
                pb2 / (2.0 * wb - 3.0 * wa) - 4.0 * pb2 / (3.0 * wa));
  d.delta_b2 = pref * pb2 *
               (-pb2 / (wb + 2.0 * wa) - pb2 / (3.0 * wb - 2.0 * wa) - pa2 / (2.0 * wb - wa) +
                pa2 / (2.0 * wb - 3.0 * wa) + 2.0 * pa2 / (3.0 * wa));

  d.kappa_phi = noise_dt * noise_sigma * noise_sigma / 4.0;
  // sigma * dt * sqrt(T_d / dt) = pi / 2
  d.T_d = noise_sigma > 0.0 ? (pi / 2.0) * (pi / 2.0) / (noise_sigma * noise_sigma * noise_dt)
                            : std::numeric_limits<double>::infinity();

  if (p.matched && !p.matched_condition_holds())
    d.warnings.push_back("omega_dc differs from omega_b - 2 omega_a by more than the matched tolerance");
  return d;
}

enum class PumpParity { cos_phi, sin_phi };

struct PumpTerm {
  int harmonic;  // multiple of omega_p
  double amplitude;
  PumpParity parity;
};

/// Harmonic expansion of -E_J cos(eps_p cos(w t) + phi) into
/// sum_k amplitude_k cos(k w t) x {cos phi | sin phi}.
inline std::vector<PumpTerm> pump_expansion_coefficients(double eps_p, int n_max, double E_J = 1.0) {
  if (!(eps_p >= 0.0)) throw ConfigError("eps_p", "must be >= 0");
  if (n_max < 0) throw ConfigError("n_max", "must be >= 0");
  std::vector<PumpTerm> out;
  out.push_back({0, -E_J * bessel_j(0, eps_p), PumpParity::cos_phi});
  for (int k = 1; k <= n_max; ++k) {
    const int m = k / 2;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 1) {
      out.push_back({k, 2.0 * E_J * sign * bessel_j(k, eps_p), PumpParity::sin_phi});
    } else {
      out.push_back({k, -2.0 * E_J * sign * bessel_j(k, eps_p), PumpParity::cos_phi});
    }
  }
  return out;
}

struct LockedCoefficients {
  cplx g2, g2_a, g2_b;
  double delta_a = 0, delta_b = 0, delta_a2 = 0, delta_b2 = 0;
};

/// Couplings when the junction phase carries a residual oscillation
/// c_J cos(omega_dc t). First-order terms scale by J0 + J1, second-order
/// renormalizations by J0 (J0 - 2 J1).
inline LockedCoefficients locked_junction_coefficients(const DerivedParams& d, double c_J) {
  if (!(std::abs(c_J) < 1.0)) throw ConfigError("c_J", "must satisfy |c_J| < 1");
  const double j0 = bessel_j(0, c_J);
  const double j1 = bessel_j(1, c_J);
  const double first = j0 + j1;
  const double second = j0 * (j0 - 2.0 * j1);
  LockedCoefficients c;
  c.g2 = first * d.g2;
  c.g2_a = first * d.g2_a;
  c.g2_b = first * d.g2_b;
  c.delta_a = first * d.delta_a;
  c.delta_b = first * d.delta_b;
  c.delta_a2 = second * d.delta_a2;
  c.delta_b2 = second * d.delta_b2;
  return c;
}

/// Drive amplitude that puts the averaged steady state at |alpha|^2 = n with
/// the given drive phase.
inline cplx drive_for_photon_number(const CircuitParams& p, double n, double phase = 0.0) {
  DerivedParams d = derive(p, 0.0, 1e-11);
  return std::polar(n * std::abs(d.g2), phase);
}

/// FNV-1a hash over the parameter values; used as a provenance id.
inline std::uint64_t provenance_id(const CircuitParams& p) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](double v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof v);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  };
  for (double v : {p.omega_a, p.omega_b, p.omega_dc, p.omega_d, p.omega_L, p.phi_a, p.phi_b, p.E_J,
                   p.kappa_b, p.eps_d.real(), p.eps_d.imag(), p.R0, p.C0, p.eps_L, p.delta_omega})
    mix(v);
  return h;
}

}  // namespace dccat
