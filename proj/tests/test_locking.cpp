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

#include "dccat/locking.hpp"
#include "oracles.hpp"

using namespace dccat;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Synthetic map: rows locked within |dw| <= half(eps_L) + shift.
ArnoldGrid synthetic(double nu0, double shift) {
  ArnoldGrid g;
  g.delta_omega = linspace(-10.0, 10.0, 21);
  g.eps_L = linspace(0.0, 0.4, 5);
  g.nu0 = nu0;
  for (std::size_t i = 0; i < g.eps_L.size(); ++i)
    for (double dw : g.delta_omega) {
      const bool locked = std::abs(dw - shift) <= 0.5 * g.eps_L[i] * nu0 + 1e-12 && g.eps_L[i] > 0;
      g.status.push_back(locked ? CellStatus::locked : CellStatus::unlocked);
      g.psi_dot.push_back(locked ? 0.0 : dw);
    }
  return g;
}

}  // namespace

TEST_CASE("lock classifier fits the slope of psi", "[locking]") {
  std::vector<double> t, psi;
  for (int k = 0; k <= 1000; ++k) {
    t.push_back(k * 1e-9);
    psi.push_back(0.3 + 2.5e6 * k * 1e-9 + 0.01 * std::sin(k));
  }
  const LockVerdict v = classify_lock(t, psi, 1e-6, 2e-7, 1e6);
  CHECK_THAT(v.psi_dot, WithinRel(2.5e6, 1e-3));
  CHECK_FALSE(v.locked);
  CHECK(classify_lock(t, psi, 1e-6, 2e-7, 3e6).locked);
  CHECK_THROWS_AS(classify_lock(t, psi, 1e-6, 5e-7, 1e6), ConfigError);
  CHECK_THROWS_AS(classify_lock(t, psi, 2e-6, 1e-7, 1e6), ConfigError);
}

TEST_CASE("boundary extraction on a synthetic map", "[locking]") {
  const ArnoldGrid g = synthetic(20.0, 0.0);
  const auto rows = measured_edges(g);
  REQUIRE(rows.size() == 5);
  CHECK(*rows[0].plus == 0.0);
  // eps_L = 0.2: half width 2, locked cells -2..2, edges at +-2.5.
  CHECK_THAT(*rows[2].plus, WithinAbs(2.5, 1e-12));
  CHECK_THAT(*rows[2].minus, WithinAbs(-2.5, 1e-12));
  CHECK_THAT(*measured_half_width(g, 0.21), WithinAbs(2.5, 1e-12));
  const BoundaryMatch m = match_boundary(g, false);
  CHECK(m.points == 10);
  CHECK(m.fraction() == 1.0);
  CHECK(asymmetry_metric(g) == 0.0);
  CHECK(asymmetry_metric(synthetic(20.0, 1.0)) > 0.0);
  CHECK(asymmetry_metric(synthetic(20.0, -1.0)) < 0.0);
}

TEST_CASE("corrected width scales with the photon number", "[locking]") {
  ArnoldGrid g;
  g.nu0 = angular(224e6);
  g.phi_a = 0.24;
  g.alpha_sq = 6.0;
  CHECK_THAT(g.bare_half_width(0.1) / two_pi, WithinRel(11.2e6, 1e-12));
  CHECK_THAT(g.corrected_half_width(0.1), WithinRel(g.bare_half_width(0.1) * std::abs(1 - 0.0576 * 6), 1e-14));
}

TEST_CASE("small sweep locks at the centre and is order independent", "[locking]") {
  const CircuitParams p = reference_locking_params();
  TongueOptions opt;
  opt.t_f = 0.2e-6;
  opt.window = 0.05e-6;
  const std::vector<double> dw = linspace(angular(-30e6), angular(30e6), 5);
  const std::vector<double> eL = {0.0, 0.1, 0.2};
  const ArnoldGrid a = sweep_tongue(p, dw, eL, cplx{}, opt);
  opt.order = {14, 3, 7, 0, 1, 2, 4, 5, 6, 8, 9, 10, 11, 12, 13};
  opt.threads = 3;
  const ArnoldGrid b = sweep_tongue(p, dw, eL, cplx{}, opt);
  CHECK(a.status == b.status);
  CHECK(a.psi_dot == b.psi_dot);
  CHECK(a.status[a.index(1, 2)] == CellStatus::locked);
  CHECK(a.status[a.index(0, 0)] == CellStatus::unlocked);
  CHECK(a.status[a.index(2, 4)] == CellStatus::unlocked);
  // Only the eps_L = 0 row is too narrow to settle in t_f; it hits the cap.
  CHECK(a.row_t_f == std::vector<double>{4 * opt.t_f, opt.t_f, opt.t_f});
  // Unlocked eps_L = 0 row winds at the applied detuning.
  CHECK_THAT(a.psi_dot[a.index(0, 0)], WithinRel(dw[0], 0.02));

  const auto dir = std::filesystem::temp_directory_path() / "dccat_test_locking";
  std::filesystem::create_directories(dir);
  write_grid_csv(dir / "g.csv", a);
  std::ifstream in(dir / "g.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "delta_omega,eps_L,psi_dot,locked");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 15);
  const nlohmann::json meta = grid_metadata(a);
  CHECK(meta["boundaries"]["bare"].size() == 3);
  CHECK(meta["boundaries"]["bare"][1]["half_width"].get<double>() == a.bare_half_width(0.1));
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep argument errors", "[locking][errors]") {
  const std::vector<double> axis = {0.0, 1.0};
  CHECK_THROWS_AS(sweep_tongue(reference_params(), axis, axis, cplx{}), ConfigError);
  CHECK_THROWS_AS(sweep_tongue(reference_locking_params(), {1.0, 0.0}, axis, cplx{}), ConfigError);
  CHECK_THROWS_AS(sweep_tongue(reference_locking_params(), {0.0}, axis, cplx{}), ConfigError);
  TongueOptions opt;
  opt.order = {0};
  CHECK_THROWS_AS(sweep_tongue(reference_locking_params(), axis, axis, cplx{}, opt), ConfigError);
  opt.order.clear();
  opt.settle = -1.0;
  CHECK_THROWS_AS(sweep_tongue(reference_locking_params(), axis, axis, cplx{}, opt), ConfigError);
  opt.settle = 10.0;
  opt.max_stretch = 0.5;
  CHECK_THROWS_AS(sweep_tongue(reference_locking_params(), axis, axis, cplx{}, opt), ConfigError);
}
