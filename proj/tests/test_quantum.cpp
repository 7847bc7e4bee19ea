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
#include "dccat/quantum.hpp"
#include "oracles.hpp"

using namespace dccat;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

MatrixXcd projector(const VectorXcd& v) { return v * v.adjoint(); }

// Single-mode model on the memory factor only (dims {n, 1, 1} bypass the
// Hamiltonian validation, which is only for the circuit models).
FockOperators single_mode(int n) { return FockOperators::make({n, 1, 1}); }

}  // namespace

TEST_CASE("ladder operators on the product space", "[quantum]") {
  const FockOperators o = FockOperators::make({5, 3, 2});
  CHECK(o.a.rows() == 30);
  const MatrixXcd a = o.a, b = o.b, c = o.c;
  // Modes commute with each other.
  CHECK((a * b - b * a).norm() == 0.0);
  CHECK((a * c.adjoint() - c.adjoint() * a).norm() == 0.0);
  // [b, b^dag] = 1 away from the truncation edge.
  const MatrixXcd comm = b * b.adjoint() - b.adjoint() * b;
  for (int i = 0; i < 30; ++i) {
    const int nb = (i / 2) % 3;
    CHECK_THAT(comm(i, i).real(), WithinAbs(nb == 2 ? -2.0 : 1.0, 1e-14));
  }
  const MatrixXcd na = o.num_a();
  for (int i = 0; i < 30; ++i) CHECK_THAT(na(i, i).real(), WithinAbs(i / 6, 1e-14));
  CHECK_THROWS_AS(FockOperators::make({0, 1, 1}), ConfigError);
  CHECK_THROWS_AS(FockOperators::make({100, 10, 10}), ConfigError);
}

TEST_CASE("coherent amplitudes and overlaps", "[quantum][oracle]") {
  for (cplx alpha : {cplx(0.0), cplx(1.2, -0.4), cplx(-2.0, 1.5)}) {
    const VectorXcd v = coherent_amplitudes(40, alpha);
    for (int n = 0; n < 40; ++n) CHECK(std::abs(v[n] - oracle::fock_amplitude(n, alpha)) < 1e-14);
  }
  const cplx x(1.1, 0.3), y(-0.5, 0.9);
  CHECK(std::abs(coherent_state(50, y).dot(coherent_state(50, x)) - oracle::coherent_overlap(x, y)) < 1e-13);
  CHECK_THROWS_AS(coherent_state(8, 3.0), ConfigError);
}

TEST_CASE("cat states have definite parity", "[quantum]") {
  const FockDims d{20, 1, 1};
  const cplx alpha(1.0, 1.0);
  const MatrixXcd even = projector(cat_state(20, alpha, Parity::even));
  const MatrixXcd odd = projector(cat_state(20, alpha, Parity::odd));
  CHECK_THAT(parity_a(even, d), WithinAbs(1.0, 1e-12));
  CHECK_THAT(parity_a(odd, d), WithinAbs(-1.0, 1e-12));
  CHECK_THAT(cat_fidelity(even, alpha, Parity::even), WithinAbs(1.0, 1e-12));
  CHECK_THAT(cat_fidelity(even, alpha, Parity::odd), WithinAbs(0.0, 1e-12));
  CHECK_THAT(trace_distance(even, odd), WithinAbs(1.0, 1e-12));
}

TEST_CASE("partial trace over the buffer and filter", "[quantum]") {
  const FockDims d{4, 3, 2};
  VectorXcd pa(4), pb(3), pc(2);
  pa << 0.5, cplx(0, 0.5), 0.5, -0.5;
  pb << 0.6, 0.0, 0.8;
  pc << cplx(0, 1), 0.0;
  const VectorXcd psi = Eigen::kroneckerProduct(Eigen::kroneckerProduct(pa, pb).eval(), pc);
  CHECK((partial_trace_a(projector(psi), d) - projector(pa)).norm() < 1e-15);
  CHECK_THROWS_AS(partial_trace_a(MatrixXcd::Identity(5, 5), d), ConfigError);
}

TEST_CASE("pure dephasing matches the closed form", "[quantum][oracle]") {
  const FockOperators o = single_mode(10);
  const double kappa = 2.0e6;
  LindbladModel m(10);
  m.add_collapse(o.num_a(), kappa);
  const MatrixXcd rho0 = projector(coherent_state(10, cplx(0.8, 0.6)));
  const std::vector<double> times = {0.1e-6, 0.5e-6, 1e-6};
  const EvolveResult r = evolve(rho0, m, 0.0, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    double worst = 0;
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j)
        worst = std::max(worst, std::abs(r.states[k].rho(i, j) - oracle::dephased(rho0(i, j), i, j, kappa, times[k])));
    CHECK(worst < 1e-6);
  }
  const MatrixXcd rk = rk4_evolve(rho0, m, 0.0, 1e-6, 1e-9);
  CHECK((rk - r.states.back().rho).norm() < 1e-6);
}

TEST_CASE("damped rotating mode stays coherent", "[quantum][oracle]") {
  const FockOperators o = single_mode(16);
  const double w = 2.0e7, kappa = 3.0e6;
  LindbladModel m(16);
  m.add_term(o.num_a(), [w](double) { return cplx{w}; });
  m.add_collapse(o.a, kappa);
  const cplx alpha(1.5, -0.5);
  const MatrixXcd rho0 = projector(coherent_state(16, alpha));
  const double t = 0.3e-6;
  // A pure initial state puts eigenvalues at zero; tighter tolerances keep
  // the solver error below the positivity check.
  EvolveOptions opt;
  opt.bdf.rtol = 1e-10;
  opt.bdf.atol = 1e-12;
  const EvolveResult r = evolve(rho0, m, 0.0, {t}, opt);
  const cplx at = alpha * std::exp(cplx(-kappa / 2.0, -w) * t);
  CHECK(trace_distance(r.states[0].rho, projector(coherent_state(16, at))) < 1e-5);
  const StateDiagnostics d = diagnose(r.states[0].rho);
  CHECK(d.trace_error < 1e-9);
  CHECK(d.hermiticity < 1e-12);
  CHECK(d.min_eigenvalue > -1e-8);
}

TEST_CASE("effective model prepares an even cat", "[quantum]") {
  CircuitParams p = reference_params();
  p.eps_d = drive_for_photon_number(p, 2.0);
  const FockDims dims{12, 4, 1};
  const FockOperators ops = FockOperators::make(dims);
  const LindbladModel m = build_model(HamiltonianSpec{}, ops, p);
  MatrixXcd rho0 = MatrixXcd::Zero(48, 48);
  rho0(0, 0) = 1.0;
  const EvolveResult r = evolve(rho0, m, 0.0, {40e-9, 120e-9});
  const cplx alpha = derive(p, 0.0, 1e-11).alpha_ss;
  const MatrixXcd ra = partial_trace_a(r.states.back().rho, dims);
  CHECK(cat_fidelity(ra, alpha, Parity::even) > 0.99);
  // The pump conserves parity; only numerical error moves it.
  for (const QuantumState& s : r.states) CHECK_THAT(parity_a(s.rho, dims), WithinAbs(1.0, 1e-6));
  CHECK(cat_fidelity(partial_trace_a(r.states[0].rho, dims), alpha, Parity::even) <
        cat_fidelity(ra, alpha, Parity::even));
}

TEST_CASE("lab-frame generators are Hermitian", "[quantum]") {
  CircuitParams p = reference_params();
  p.eps_d = drive_for_photon_number(p, 2.0);
  HamiltonianSpec spec;
  spec.kind = HamiltonianKind::full_time_dependent;
  const FockOperators ops = FockOperators::make({8, 3, 1});
  for (double t : {0.0, 1.3e-9, 7.7e-9}) {
    const MatrixXcd h = build_hamiltonian(spec, ops, p, t);
    CHECK((h - h.adjoint()).norm() < 1e-9 * h.norm());
  }
  spec.kind = HamiltonianKind::full_with_filter;
  spec.g_bc = p.kappa_b;
  spec.kappa_c = 4.0 * p.kappa_b;
  const FockOperators f = FockOperators::make({6, 3, 2});
  const MatrixXcd h = build_hamiltonian(spec, f, p, 2e-9);
  CHECK(h.rows() == 36);
  CHECK((h - h.adjoint()).norm() < 1e-9 * h.norm());
}

TEST_CASE("Hamiltonian spec validation", "[quantum][errors]") {
  const CircuitParams p = reference_params();
  HamiltonianSpec spec;
  CHECK_THROWS_AS(spec.validate(p, {3, 4, 1}), ConfigError);
  CHECK_THROWS_AS(spec.validate(p, {12, 1, 1}), ConfigError);
  spec.max_dim = 40;
  CHECK_THROWS_AS(spec.validate(p, {12, 4, 1}), ConfigError);
  spec = {};
  spec.t_ramp = -1.0;
  CHECK_THROWS_AS(spec.validate(p, {12, 4, 1}), ConfigError);
  spec = {};
  spec.kind = HamiltonianKind::full_with_filter;
  CHECK_THROWS_AS(spec.validate(p, {12, 4, 1}), ConfigError);
  CHECK_THROWS_AS(spec.validate(p, {12, 4, 2}), ConfigError);
  spec.kappa_c = 4.0 * p.kappa_b;
  spec.g_bc = 1.2 * p.kappa_b;
  try {
    spec.validate(p, {12, 4, 2});
    FAIL("expected a filter mismatch");
  } catch (const ConfigError& e) {
    CHECK(e.field == "kappa_c");
  }
  spec.g_bc = p.kappa_b;
  CHECK_NOTHROW(spec.validate(p, {12, 4, 2}));
  spec.t_ramp = 10e-9;
  CHECK(spec.drive(p, 5e-9) == p.eps_d * 0.5);
  CHECK(spec.drive(p, 20e-9) == p.eps_d);
}

TEST_CASE("evolve rejects bad inputs", "[quantum][errors]") {
  const FockOperators o = single_mode(4);
  LindbladModel m(4);
  m.add_collapse(o.a, 1.0);
  MatrixXcd rho = MatrixXcd::Zero(4, 4);
  rho(0, 0) = 1.0;
  CHECK_THROWS_AS(evolve(MatrixXcd::Identity(3, 3), m, 0.0, {1.0}), ConfigError);
  CHECK_THROWS_AS(evolve(2.0 * rho, m, 0.0, {1.0}), ConfigError);
  CHECK_THROWS_AS(evolve(rho, m, 0.0, {1.0, 0.5}), ConfigError);
  CHECK_THROWS_AS(m.add_collapse(o.a, -1.0), ConfigError);
  CHECK_THROWS_AS(m.add_term(FockOperators::make({5, 1, 1}).a, [](double) { return cplx{1.0}; }), ConfigError);
}

TEST_CASE("Wigner function of vacuum and cats", "[quantum][oracle]") {
  const std::vector<double> axis = linspace(-3.0, 3.0, 41);
  MatrixXcd vac = MatrixXcd::Zero(6, 6);
  vac(0, 0) = 1.0;
  const WignerResult w = wigner(vac, axis, axis);
  for (std::size_t j = 0; j < axis.size(); j += 5)
    for (std::size_t i = 0; i < axis.size(); i += 5) {
      const double r2 = axis[i] * axis[i] + axis[j] * axis[j];
      CHECK_THAT(w.w(j, i), WithinAbs(2.0 / pi * std::exp(-2.0 * r2), 1e-10));
    }
  CHECK_THAT(w.integral, WithinAbs(1.0, 1e-6));
  CHECK(w.warning.empty());

  const cplx alpha(1.2, 0.5);
  const WignerResult c = wigner(projector(coherent_state(20, alpha)), axis, axis);
  CHECK_THAT(c.w(20, 20), WithinAbs(2.0 / pi * std::exp(-2.0 * std::norm(alpha)), 1e-9));
  const WignerResult odd = wigner(projector(cat_state(20, alpha, Parity::odd)), axis, axis);
  CHECK_THAT(odd.w(20, 20), WithinAbs(-2.0 / pi, 1e-9));

  const std::vector<double> narrow = linspace(-0.5, 0.5, 11);
  const WignerResult clipped = wigner(vac, narrow, narrow);
  CHECK(clipped.integral < 0.99);
  CHECK_FALSE(clipped.warning.empty());
  CHECK_THROWS_AS(wigner(vac, {0.0}, axis), ConfigError);
}

TEST_CASE("checkpoint round trip and corruption", "[quantum][io]") {
  const auto dir = std::filesystem::temp_directory_path() / "dccat_test_quantum";
  std::filesystem::create_directories(dir);
  const FockDims d{4, 2, 1};
  QuantumState s{projector(cat_state(8, cplx(0.7, 0.2), Parity::even)), 3.5e-7};
  write_checkpoint(dir / "s.bin", s, d);
  const auto [back, bd] = read_checkpoint(dir / "s.bin");
  CHECK(bd == d);
  CHECK(back.time == s.time);
  CHECK(back.rho == s.rho);
  CHECK_THROWS_AS(write_checkpoint(dir / "x.bin", s, FockDims{3, 2, 1}), ConfigError);

  const std::string bytes = oracle::slurp(dir / "s.bin");
  std::ofstream(dir / "short.bin", std::ios::binary) << bytes.substr(0, bytes.size() - 8);
  CHECK_THROWS_AS(read_checkpoint(dir / "short.bin"), Error);
  std::string bad = bytes;
  bad[0] = 'X';
  std::ofstream(dir / "magic.bin", std::ios::binary) << bad;
  CHECK_THROWS_AS(read_checkpoint(dir / "magic.bin"), Error);
  CHECK_THROWS_AS(read_checkpoint(dir / "missing.bin"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("dephasing channel check without noise", "[quantum]") {
  DephasingCheckOptions opt;
  opt.seeds = 10;
  opt.t_f = 40e-9;
  opt.checkpoints = 2;
  const DephasingReport r = dephasing_channel_check(reference_params(), opt);
  CHECK(r.kappa_phi == 0.0);
  REQUIRE(r.trace_distance.size() == 2);
  CHECK(r.max_distance < 1e-5);
  opt.seeds = 5;
  CHECK_THROWS_AS(dephasing_channel_check(reference_params(), opt), ConfigError);
}
