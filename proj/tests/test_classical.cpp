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

#include <catch_amalgamated.hpp>

#include "dccat/classical.hpp"
#include "oracles.hpp"

using namespace dccat;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Buffer-only circuit: no junction, so the equations are a driven damped
// oscillator with a closed-form periodic solution.
CircuitParams linear_buffer(double detuning_hz) {
  CircuitParams p;
  p.E_J = 0.0;
  p.omega_d = p.omega_b + angular(detuning_hz);
  p.eps_d = {angular(3e6), angular(-1e6)};
  return p;
}

double final_distance(const CircuitParams& p, double dt) {
  ClassicalState s;
  s.alpha = {1.0, 0.5};
  s.beta = {0.3, -0.2};
  IntegratorConfig cfg;
  cfg.dt = dt;
  const Trajectory tr = integrate(s, 0.0, 2e-9, p, NoiseModel{}, cfg);
  return std::abs(tr.states.back().alpha) + std::abs(tr.states.back().beta);
}

}  // namespace

TEST_CASE("driven buffer follows the exact periodic response", "[classical][oracle]") {
  for (double det : {0.0, 7e6, -25e6}) {
    const CircuitParams p = linear_buffer(det);
    ClassicalState s;
    s.beta = oracle::driven_buffer(p.omega_b, p.kappa_b, p.eps_d, p.omega_d, 0.0);
    const Trajectory tr = integrate(s, 0.0, 20e-9, p, NoiseModel{}, IntegratorConfig{});
    const double scale = std::abs(s.beta);
    double worst = 0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      const cplx ref = oracle::driven_buffer(p.omega_b, p.kappa_b, p.eps_d, p.omega_d, tr.times[i]);
      worst = std::max(worst, std::abs(tr.states[i].beta - ref) / scale);
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("zero drive, no junction and vacuum stay at zero", "[classical]") {
  CircuitParams p;
  p.E_J = 0.0;
  const Trajectory tr = integrate(ClassicalState{}, 0.0, 5e-9, p, NoiseModel{}, IntegratorConfig{});
  for (const auto& s : tr.states) {
    CHECK(s.alpha == cplx{});
    CHECK(s.beta == cplx{});
    CHECK(s.n_R == 0.0);
  }
}

TEST_CASE("free memory mode rotates at omega_a", "[classical][property]") {
  CircuitParams p;
  p.E_J = 0.0;
  p.phi_a = 0.0;
  ClassicalState s;
  s.alpha = std::polar(1.3, 0.4);
  const Trajectory tr = integrate(s, 0.0, 3e-9, p, NoiseModel{}, IntegratorConfig{});
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    CHECK(std::abs(tr.states[i].alpha - s.alpha * std::polar(1.0, -p.omega_a * tr.times[i])) < 1e-12);
}

TEST_CASE("RK4 converges at fourth order", "[classical][property]") {
  CircuitParams p = reference_locking_params();
  p.eps_d = drive_for_photon_number(p, 5.5);
  const double h = max_classical_step(p);
  const double a = final_distance(p, h), b = final_distance(p, h / 2), c = final_distance(p, h / 4);
  const double ratio = std::abs(a - b) / std::abs(b - c);
  CHECK(ratio > 10.0);
  CHECK(ratio < 24.0);
}

TEST_CASE("rotating and lab steppers agree on short horizons", "[classical]") {
  CircuitParams p = reference_params();
  p.eps_d = drive_for_photon_number(p, 2.0);
  ClassicalState s;
  s.alpha = {1.0, 1.0};
  IntegratorConfig lab;
  lab.stepper = Stepper::rk4_lab;
  lab.dt = 0.05e-12;
  const Trajectory x = integrate(s, 0.0, 1e-9, p, NoiseModel{}, IntegratorConfig{});
  const Trajectory y = integrate(s, 0.0, 1e-9, p, NoiseModel{}, lab);
  CHECK(std::abs(x.states.back().alpha - y.states.back().alpha) < 1e-6);
  CHECK(std::abs(x.states.back().phi_J_hat - y.states.back().phi_J_hat) < 1e-6);
}

TEST_CASE("noisy runs are bit-identical per seed", "[classical]") {
  CircuitParams p = reference_locking_params();
  p.eps_d = drive_for_photon_number(p, 5.5);
  const NoiseModel m = NoiseModel::white(angular(0.1e9), 9);
  const Trajectory a = integrate(ClassicalState{}, 0.0, 2e-9, p, m);
  const Trajectory b = integrate(ClassicalState{}, 0.0, 2e-9, p, m);
  CHECK(a.states == b.states);
  CHECK(a.times == b.times);
}

TEST_CASE("sampling follows the stride", "[classical]") {
  IntegratorConfig cfg;
  cfg.stride = 7;
  const Trajectory tr = integrate(ClassicalState{}, 0.0, 1e-10, CircuitParams{}, NoiseModel{}, cfg);
  // 200 steps: samples at 0, every 7 steps, and the final step.
  CHECK(tr.times.size() == 1 + 200 / 7 + 1);
  CHECK(tr.times.front() == 0.0);
  CHECK_THAT(tr.times.back(), WithinRel(1e-10, 1e-14));
}

TEST_CASE("integrator errors", "[classical][errors]") {
  const CircuitParams p;
  IntegratorConfig cfg;
  cfg.dt = 1e-10;
  CHECK_THROWS_AS(integrate(ClassicalState{}, 0.0, 1e-9, p, NoiseModel{}, cfg), ConfigError);
  cfg = {};
  cfg.stride = 0;
  CHECK_THROWS_AS(integrate(ClassicalState{}, 0.0, 1e-9, p, NoiseModel{}, cfg), ConfigError);
  CHECK_THROWS_AS(integrate(ClassicalState{}, 1e-9, 1e-9, p, NoiseModel{}), ConfigError);
  cfg = {};
  cfg.guard = 1.0;
  ClassicalState big;
  big.alpha = 2.0;
  try {
    integrate(big, 0.0, 1e-9, p, NoiseModel{}, cfg);
    FAIL("expected a divergence error");
  } catch (const NumericalError& e) {
    CHECK(e.time > 0.0);
  }
  ClassicalState nan;
  nan.n_R = std::nan("");
  CHECK_THROWS_AS(integrate(nan, 0.0, 1e-11, p, NoiseModel{}), NumericalError);
}

TEST_CASE("cat seeds share the slow junction phase", "[classical][property]") {
  CircuitParams p = reference_locking_params();
  p.eps_d = drive_for_photon_number(p, 5.5);
  const cplx a = derive(p, 0.0, 1e-11).alpha_ss;
  for (double psi0 : {0.0, 1.0, 3.0}) {
    Trajectory tr;
    tr.params = p;
    tr.times = {0.0};
    tr.states = {cat_seed(a, 1.0, p, psi0)};
    const double plus = fixed_point_views(tr, p).psi_slow[0];
    tr.states = {cat_seed(a, -1.0, p, psi0)};
    const double minus = fixed_point_views(tr, p).psi_slow[0];
    CHECK_THAT(plus, WithinAbs(psi0, 1e-14));
    CHECK_THAT(minus, WithinAbs(psi0, 1e-14));
  }
}

TEST_CASE("views unwrap the memory phase", "[classical]") {
  CircuitParams p;
  Trajectory tr;
  tr.params = p;
  for (int k = 0; k < 400; ++k) {
    const double t = k * 1e-11;
    tr.times.push_back(t);
    ClassicalState s;
    s.alpha = std::polar(1.0, 0.05 * k - p.omega_a * t);
    tr.states.push_back(s);
  }
  const TrajectoryViews v = fixed_point_views(tr, p);
  for (int k = 0; k < 400; ++k) CHECK_THAT(v.theta_a[k], WithinAbs(0.05 * k, 1e-9));
  CHECK_THAT(v.correlation[10], WithinAbs(2 * v.theta_a[10] - v.psi_slow[10], 1e-15));
}

TEST_CASE("c_J estimate recovers a synthetic oscillation", "[classical]") {
  CircuitParams p;
  Trajectory tr;
  tr.params = p;
  for (int k = 0; k <= 4000; ++k) {
    const double t = k * 1e-12;
    ClassicalState s;
    s.phi_J_hat = 0.3 + 1e6 * t + 0.12 * std::cos(p.omega_dc * t + 0.7) + p.omega_dc * t - p.omega_L * t;
    tr.times.push_back(t);
    tr.states.push_back(s);
  }
  CHECK_THAT(estimate_cJ(tr, p, 3e-9), WithinRel(0.12, 1e-9));
  CHECK_THROWS_AS(estimate_cJ(tr, p, 1e-10), ConfigError);
}

TEST_CASE("trajectory CSV layout", "[classical][io]") {
  const auto dir = std::filesystem::temp_directory_path() / "dccat_test_classical";
  std::filesystem::create_directories(dir);
  const Trajectory tr = integrate(ClassicalState{}, 0.0, 1e-10, CircuitParams{}, NoiseModel{});
  write_trajectory_csv(dir / "t.csv", tr);
  std::ifstream in(dir / "t.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,re_alpha,im_alpha,re_beta,im_beta,n_R,phi_J_hat,psi,theta_a");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == tr.times.size());
  std::filesystem::remove_all(dir);
}
