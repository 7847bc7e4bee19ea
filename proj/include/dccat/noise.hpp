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
#include <vector>

#include "dccat/error.hpp"

namespace dccat {

enum class NoiseKind { none, white_hold, constant_offset };

/// Junction frequency noise delta_omega_N(t).
struct NoiseModel {
  NoiseKind kind = NoiseKind::none;
  double sigma = 0.0;     // rad/s, white_hold only
  double hold_dt = 1e-11; // s
  std::uint64_t seed = 0;
  double offset = 0.0;    // rad/s, constant_offset only

  bool operator==(const NoiseModel&) const = default;

  static NoiseModel white(double sigma, std::uint64_t seed, double hold_dt = 1e-11) {
    return {NoiseKind::white_hold, sigma, hold_dt, seed, 0.0};
  }
  static NoiseModel constant(double dw) { return {NoiseKind::constant_offset, 0.0, 1e-11, 0, dw}; }

  void validate() const {
    if (!(sigma >= 0.0)) throw ConfigError("noise.sigma", "must be >= 0");
    if (!(hold_dt > 0.0)) throw ConfigError("noise.hold_dt", "must be > 0");
    if (!std::isfinite(offset)) throw ConfigError("noise.offset", "must be finite");
  }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Inverse of the standard normal CDF (Wichura, AS 241, ~1e-16 relative).
inline double normal_quantile(double p) {
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r + 67265.770927008700853) * r +
                45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((r * 5226.495278852545925 + 28729.085735721942674) * r + 39307.89580009271061) * r +
                21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
               1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
               0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
               0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
               7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

/// Standard normal draw for interval `index` of stream `seed`. Pure function
/// of its arguments, so paths can be evaluated in any order.
inline double standard_normal(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t key = detail::splitmix64(seed);
  const std::uint64_t bits = detail::splitmix64(key ^ detail::splitmix64(index + 0x632BE59BD9B4E019ULL));
  const double u = (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  return normal_quantile(u);
}

/// Zero-order-hold realization of a NoiseModel on [0, t_final], with the
/// running integral phi_N(t). Immutable after construction.
class NoisePath {
 public:
  NoisePath() = default;
  NoisePath(const NoiseModel& m, double t_final) : model_(m), t_final_(t_final) {
    m.validate();
    if (!(t_final > 0.0)) throw ConfigError("t_final", "must be > 0");
    if (m.kind == NoiseKind::white_hold && m.sigma > 0.0) {
      const auto n = static_cast<std::size_t>(std::ceil(t_final / m.hold_dt)) + 2;
      values_.resize(n);
      prefix_.resize(n + 1);
      prefix_[0] = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        values_[k] = m.sigma * standard_normal(m.seed, k);
        prefix_[k + 1] = prefix_[k] + values_[k] * m.hold_dt;
      }
    }
  }

  const NoiseModel& model() const { return model_; }
  double t_final() const { return t_final_; }
  bool is_zero() const {
    return model_.kind == NoiseKind::none || (model_.kind == NoiseKind::constant_offset && model_.offset == 0.0) ||
           (model_.kind == NoiseKind::white_hold && model_.sigma == 0.0);
  }

  /// delta_omega_N(t)
  double value(double t) const {
    switch (model_.kind) {
      case NoiseKind::none: return 0.0;
      case NoiseKind::constant_offset: return model_.offset;
      case NoiseKind::white_hold: {
        if (values_.empty()) return 0.0;
        return values_[index(t)];
      }
    }
    return 0.0;
  }

  /// phi_N(t) = integral of delta_omega_N over [0, t].
  double phase(double t) const {
    switch (model_.kind) {
      case NoiseKind::none: return 0.0;
      case NoiseKind::constant_offset: return model_.offset * t;
      case NoiseKind::white_hold: {
        if (values_.empty()) return 0.0;
        const std::size_t k = index(t);
        return prefix_[k] + values_[k] * (t - static_cast<double>(k) * model_.hold_dt);
      }
    }
    return 0.0;
  }

 private:
  std::size_t index(double t) const {
    if (t < 0.0) throw NumericalError("noise queried before t = 0", t);
    const auto k = static_cast<std::size_t>(t / model_.hold_dt);
    if (k >= values_.size()) throw NumericalError("noise queried beyond its horizon", t);
    return k;
  }

  NoiseModel model_;
  double t_final_ = 0.0;
  std::vector<double> values_;
  std::vector<double> prefix_;
};

inline NoisePath sample_path(const NoiseModel& m, double t_final) { return NoisePath(m, t_final); }

/// Stationary standard deviation of the locked junction phase,
/// sqrt(sigma^2 hold_dt / (eps_L nu_0)).
inline double predicted_locked_std(const NoiseModel& m, double eps_L, double nu_0) {
  if (!(eps_L * nu_0 > 0.0)) throw ConfigError("eps_L", "locking strength eps_L * nu_0 must be > 0");
  if (m.kind != NoiseKind::white_hold) return 0.0;
  return std::sqrt(m.sigma * m.sigma * m.hold_dt / (eps_L * nu_0));
}

}  // namespace dccat
