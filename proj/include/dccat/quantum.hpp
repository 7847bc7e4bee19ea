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
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>

#include "dccat/bdf.hpp"
#include "dccat/core.hpp"
#include "dccat/error.hpp"
#include "dccat/gmres.hpp"
#include "dccat/noise.hpp"
#include "dccat/parallel.hpp"

namespace dccat {

using SpMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

struct FockDims {
  int a = 12, b = 4, c = 1;
  std::size_t total() const { return static_cast<std::size_t>(a) * b * c; }
  bool operator==(const FockDims&) const = default;
};

inline SpMat annihilation(int n) {
  SpMat m(n, n);
  std::vector<Eigen::Triplet<cplx>> t;
  for (int k = 1; k < n; ++k) t.emplace_back(k - 1, k, std::sqrt(static_cast<double>(k)));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

inline SpMat sparse_identity(int n) {
  SpMat m(n, n);
  m.setIdentity();
  return m;
}

/// Ladder operators on the ordered product space a (x) b (x) c; basis index
/// (n_a N_b + n_b) N_c + n_c.
struct FockOperators {
  FockDims dims;
  SpMat a, b, c, id;

  static FockOperators make(FockDims d, std::size_t max_dim = 4096) {
    if (d.a < 1 || d.b < 1 || d.c < 1) throw ConfigError("dims", "every truncation must be >= 1");
    if (d.total() > max_dim) throw ConfigError("dims", "total dimension exceeds the configured maximum");
    FockOperators o;
    o.dims = d;
    const SpMat ia = sparse_identity(d.a), ib = sparse_identity(d.b), ic = sparse_identity(d.c);
    o.a = kron3(annihilation(d.a), ib, ic);
    o.b = kron3(ia, annihilation(d.b), ic);
    o.c = kron3(ia, ib, annihilation(d.c));
    o.id = sparse_identity(static_cast<int>(d.total()));
    return o;
  }

  SpMat num_a() const { return SpMat(a.adjoint()) * a; }
  SpMat num_b() const { return SpMat(b.adjoint()) * b; }
  SpMat num_c() const { return SpMat(c.adjoint()) * c; }

  static SpMat kron3(const SpMat& x, const SpMat& y, const SpMat& z) {
    SpMat xy = Eigen::kroneckerProduct(x, y);
    SpMat out = Eigen::kroneckerProduct(xy, z);
    out.makeCompressed();
    return out;
  }
};

enum class HamiltonianKind { full_time_dependent, full_with_filter, effective_rwa };

struct HamiltonianSpec {
  HamiltonianKind kind = HamiltonianKind::effective_rwa;
  double t_ramp = 0.0;  // eps_d(t) rises linearly over [0, t_ramp], then holds
  double g_bc = 0.0, kappa_c = 0.0;
  std::size_t max_dim = 4096;

  bool operator==(const HamiltonianSpec&) const = default;

  cplx drive(const CircuitParams& p, double t) const {
    if (t_ramp > 0.0 && t < t_ramp) return p.eps_d * (std::max(t, 0.0) / t_ramp);
    return p.eps_d;
  }

  void validate(const CircuitParams& p, const FockDims& d) const {
    if (!(t_ramp >= 0.0)) throw ConfigError("t_ramp", "must be >= 0");
    if (d.a < 4 || d.b < 2) throw ConfigError("dims", "need N_a >= 4 and N_b >= 2");
    if (d.total() > max_dim) throw ConfigError("dims", "total dimension exceeds the configured maximum");
    if (kind == HamiltonianKind::full_with_filter) {
      if (d.c < 2) throw ConfigError("dims", "the filter mode needs N_c >= 2");
      if (!(g_bc > 0.0 && kappa_c > 0.0)) throw ConfigError("g_bc", "filter coupling and loss must be > 0");
      const double k_eff = 4.0 * g_bc * g_bc / kappa_c;
      if (std::abs(k_eff - p.kappa_b) > 0.05 * p.kappa_b)
        throw ConfigError("kappa_c", "4 g_bc^2 / kappa_c must match kappa_b within 5%");
    }
  }
};

/// Time-dependent Lindblad generator with H(t) = sum_k coef_k(t) op_k and
/// constant collapse operators.
class LindbladModel {
 public:
  struct Term {
    SpMat op;
    std::function<cplx(double)> coef;
  };
  struct Collapse {
    SpMat op;
    double rate;
  };

  explicit LindbladModel(std::size_t dim) : dim_(dim), damp_(dim, dim) {}

  std::size_t dim() const { return dim_; }

  void add_term(SpMat op, std::function<cplx(double)> coef) {
    check(op);
    op.makeCompressed();
    terms_.push_back({std::move(op), std::move(coef)});
    term_diag_.push_back(terms_.back().op.diagonal());
    rebuild_pattern();
  }

  /// Adds `op` with coefficient `coef` and its adjoint with the conjugate.
  void add_hermitian_pair(const SpMat& op, std::function<cplx(double)> coef) {
    add_term(op, coef);
    add_term(SpMat(op.adjoint()), [coef](double t) { return std::conj(coef(t)); });
  }

  void add_collapse(const SpMat& op, double rate) {
    check(op);
    if (!(rate >= 0.0)) throw ConfigError("rate", "collapse rates must be >= 0");
    if (rate == 0.0) return;
    collapses_.push_back({op, rate});
    damp_ = damp_ + SpMat((0.5 * rate) * (SpMat(op.adjoint()) * op));
    damp_.makeCompressed();
    collapse_diag_.push_back(op.diagonal());
    rebuild_pattern();
  }

  SpMat hamiltonian(double t) const {
    SpMat h(dim_, dim_);
    for (const auto& term : terms_) h += term.coef(t) * term.op;
    h.makeCompressed();
    return h;
  }

  /// out = L(t) rho. With `hermitian` the input is assumed Hermitian and the
  /// commutator's second half is obtained by adjoint.
  void apply(double t, const MatrixXcd& rho, MatrixXcd& out, bool hermitian = false) const {
    half(t, rho, out);
    if (hermitian) {
      out += out.adjoint().eval();
    } else {
      MatrixXcd tmp;
      half(t, rho.adjoint(), tmp);
      out += tmp.adjoint();
    }
    for (const auto& c : collapses_) {
      const MatrixXcd lr = c.op * rho;
      out += c.rate * (c.op * lr.adjoint()).adjoint();
    }
  }

  /// Diagonal of the superoperator at time t, entry (m, n) of a d x d matrix.
  MatrixXcd superop_diagonal(double t) const {
    VectorXcd h = VectorXcd::Zero(dim_);
    for (std::size_t k = 0; k < terms_.size(); ++k) h += terms_[k].coef(t) * term_diag_[k];
    const VectorXcd kd = damp_.diagonal();
    const VectorXcd heff = h - I * kd;
    MatrixXcd dg(dim_, dim_);
    for (std::size_t n = 0; n < dim_; ++n)
      for (std::size_t m = 0; m < dim_; ++m) dg(m, n) = -I * heff[m] + I * std::conj(heff[n]);
    for (std::size_t k = 0; k < collapses_.size(); ++k)
      for (std::size_t n = 0; n < dim_; ++n)
        for (std::size_t m = 0; m < dim_; ++m)
          dg(m, n) += collapses_[k].rate * collapse_diag_[k][m] * std::conj(collapse_diag_[k][n]);
    return dg;
  }

 private:
  void check(const SpMat& op) const {
    if (static_cast<std::size_t>(op.rows()) != dim_ || static_cast<std::size_t>(op.cols()) != dim_)
      throw ConfigError("operator", "dimension mismatch");
  }

  // All operators are scattered into one shared sparsity pattern so that
  // -i H(t) - K is assembled by value updates and applied in one product.
  void rebuild_pattern() {
    std::vector<Eigen::Triplet<cplx>> trip;
    auto collect = [&trip](const SpMat& m) {
      for (Eigen::Index r = 0; r < m.outerSize(); ++r)
        for (SpMat::InnerIterator it(m, r); it; ++it) trip.emplace_back(it.row(), it.col(), 1.0);
    };
    for (const auto& term : terms_) collect(term.op);
    collect(damp_);
    pattern_ = SpMat(dim_, dim_);
    pattern_.setFromTriplets(trip.begin(), trip.end());
    pattern_.makeCompressed();
    auto slots_of = [this](const SpMat& m) {
      std::vector<Eigen::Index> out;
      for (Eigen::Index r = 0; r < m.outerSize(); ++r)
        for (SpMat::InnerIterator it(m, r); it; ++it) {
          const auto* first = pattern_.innerIndexPtr() + pattern_.outerIndexPtr()[r];
          const auto* last = pattern_.innerIndexPtr() + pattern_.outerIndexPtr()[r + 1];
          out.push_back(std::lower_bound(first, last, it.col()) - pattern_.innerIndexPtr());
        }
      return out;
    };
    term_slots_.clear();
    for (const auto& term : terms_) term_slots_.push_back(slots_of(term.op));
    damp_slots_ = slots_of(damp_);
  }

  // out = -i H rho - K rho with K = (1/2) sum rate L^dag L.
  void half(double t, const MatrixXcd& rho, MatrixXcd& out) const {
    SpMat g = pattern_;
    cplx* v = g.valuePtr();
    std::fill(v, v + g.nonZeros(), cplx{0.0});
    {
      const cplx* dv = damp_.valuePtr();
      for (std::size_t j = 0; j < damp_slots_.size(); ++j) v[damp_slots_[j]] -= dv[j];
    }
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      const cplx c = -I * terms_[k].coef(t);
      if (c == 0.0) continue;
      const cplx* tv = terms_[k].op.valuePtr();
      const auto& sl = term_slots_[k];
      for (std::size_t j = 0; j < sl.size(); ++j) v[sl[j]] += c * tv[j];
    }
    out.noalias() = g * rho;
  }

  std::size_t dim_;
  std::vector<Term> terms_;
  std::vector<VectorXcd> term_diag_;
  std::vector<Collapse> collapses_;
  std::vector<VectorXcd> collapse_diag_;
  SpMat damp_;
  SpMat pattern_;
  std::vector<std::vector<Eigen::Index>> term_slots_;
  std::vector<Eigen::Index> damp_slots_;
};

namespace detail {

/// cos X and sin X for the Hermitian phase operator X on the a (x) b space.
inline std::pair<MatrixXcd, MatrixXcd> cos_sin_phase(const FockDims& d, double phi_a, double phi_b) {
  const FockDims ab{d.a, d.b, 1};
  const FockOperators o = FockOperators::make(ab, std::numeric_limits<std::size_t>::max());
  const MatrixXcd x = phi_a * MatrixXcd(o.a + SpMat(o.a.adjoint())) + phi_b * MatrixXcd(o.b + SpMat(o.b.adjoint()));
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(x);
  const MatrixXcd& v = es.eigenvectors();
  const Eigen::VectorXd& lam = es.eigenvalues();
  const MatrixXcd cx = v * lam.array().cos().matrix().cast<cplx>().asDiagonal() * v.adjoint();
  const MatrixXcd sx = v * lam.array().sin().matrix().cast<cplx>().asDiagonal() * v.adjoint();
  return {cx, sx};
}

inline std::vector<double> trapezoid_weights(const std::vector<double>& x) {
  std::vector<double> w(x.size(), 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    w[i] += 0.5 * (x[i + 1] - x[i]);
    w[i + 1] += 0.5 * (x[i + 1] - x[i]);
  }
  return w;
}

inline SpMat dense_to_sparse(const MatrixXcd& m, double drop = 0.0) {
  SpMat s = m.sparseView(1.0, drop);
  s.makeCompressed();
  return s;
}

}  // namespace detail

/// Generator for the chosen Hamiltonian kind. Angular units (hbar = 1).
inline LindbladModel build_model(const HamiltonianSpec& spec, const FockOperators& ops, const CircuitParams& p) {
  spec.validate(p, ops.dims);
  const std::size_t n = ops.dims.total();
  LindbladModel m(n);
  const auto constant = [](cplx v) { return [v](double) { return v; }; };
  if (spec.kind == HamiltonianKind::effective_rwa) {
    const DerivedParams d = derive(p, 0.0, 1e-11);
    const SpMat ad = ops.a.adjoint(), bd = ops.b.adjoint();
    const SpMat a2b = SpMat(ad * ad) * ops.b;
    const SpMat pump = d.g2 * a2b + d.g2_a * SpMat(SpMat(SpMat(ad * ad) * SpMat(ad * ops.a)) * ops.b) +
                       d.g2_b * SpMat(SpMat(SpMat(bd * ops.b) * SpMat(ad * ad)) * ops.b);
    m.add_hermitian_pair(pump, constant(1.0));
    m.add_hermitian_pair(bd, [spec, p](double t) { return spec.drive(p, t); });
    m.add_collapse(ops.b, p.kappa_b);
    return m;
  }
  const SpMat ad = ops.a.adjoint(), bd = ops.b.adjoint(), cd = ops.c.adjoint();
  SpMat h0 = p.omega_a * SpMat(ad * ops.a) + p.omega_b * SpMat(bd * ops.b);
  if (spec.kind == HamiltonianKind::full_with_filter)
    h0 = h0 + p.omega_b * SpMat(cd * ops.c) + spec.g_bc * SpMat(SpMat(ops.b * cd) + SpMat(bd * ops.c));
  m.add_term(h0, constant(1.0));
  const SpMat xb = ops.b + bd;
  m.add_term(xb, [spec, p](double t) { return 2.0 * (spec.drive(p, t) * std::polar(1.0, -p.omega_d * t)).real(); });
  auto [cx, sx] = detail::cos_sin_phase(ops.dims, p.phi_a, p.phi_b);
  const SpMat ic = sparse_identity(ops.dims.c);
  const SpMat cos_op = Eigen::kroneckerProduct(detail::dense_to_sparse(cx), ic);
  const SpMat sin_op = Eigen::kroneckerProduct(detail::dense_to_sparse(sx), ic);
  const double ej = p.E_J, wdc = p.omega_dc;
  m.add_term(cos_op, [ej, wdc](double t) { return cplx{-ej * std::cos(wdc * t)}; });
  m.add_term(sin_op, [ej, wdc](double t) { return cplx{-ej * std::sin(wdc * t)}; });
  if (spec.kind == HamiltonianKind::full_with_filter)
    m.add_collapse(ops.c, spec.kappa_c);
  else
    m.add_collapse(ops.b, p.kappa_b);
  return m;
}

inline SpMat build_hamiltonian(const HamiltonianSpec& spec, const FockOperators& ops, const CircuitParams& p,
                               double t) {
  return build_model(spec, ops, p).hamiltonian(t);
}

struct QuantumState {
  MatrixXcd rho;
  double time = 0;
};

struct StateDiagnostics {
  double trace_error = 0;      // |tr rho - 1|
  double hermiticity = 0;      // max |rho - rho^dag|
  double min_eigenvalue = 0;
};

inline StateDiagnostics diagnose(const MatrixXcd& rho) {
  StateDiagnostics d;
  d.trace_error = std::abs(rho.trace() - 1.0);
  d.hermiticity = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  const MatrixXcd h = 0.5 * (rho + rho.adjoint());
  d.min_eigenvalue = Eigen::SelfAdjointEigenSolver<MatrixXcd>(h, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  return d;
}

struct EvolveOptions {
  BdfOptions bdf{};
  double gmres_rel_tol = 1e-10;
  int gmres_restart = 30;
  double trace_tol_per_us = 1e-6;
  double min_eigenvalue = -1e-8;
  bool check_states = true;
};

struct EvolveResult {
  std::vector<QuantumState> states;  // one per requested time
  BdfStats stats;
};

/// Integrates d rho / dt = L(t) rho with BDF and reports rho at each of
/// `times` (increasing, first >= t0).
inline EvolveResult evolve(const MatrixXcd& rho0, const LindbladModel& model, double t0,
                           const std::vector<double>& times, const EvolveOptions& opt = {}) {
  const auto n = static_cast<Eigen::Index>(model.dim());
  if (rho0.rows() != n || rho0.cols() != n) throw ConfigError("rho0", "dimension mismatch");
  const StateDiagnostics d0 = diagnose(rho0);
  if (d0.trace_error > 1e-8 || d0.hermiticity > 1e-10 || d0.min_eigenvalue < -1e-10)
    throw ConfigError("rho0", "must be a valid density matrix");
  for (std::size_t i = 0; i < times.size(); ++i)
    if (times[i] < t0 || (i > 0 && times[i] <= times[i - 1]))
      throw ConfigError("times", "must be increasing and not before t0");

  const auto rhs = [&model, n](double t, const VectorXcd& y, VectorXcd& out) {
    MatrixXcd o;
    model.apply(t, Eigen::Map<const MatrixXcd>(y.data(), n, n), o);
    out = Eigen::Map<const VectorXcd>(o.data(), n * n);
  };
  GmresOptions gopt;
  gopt.restart = opt.gmres_restart;
  gopt.rel_tol = opt.gmres_rel_tol;
  const auto solve = [&model, n, gopt](double c, double t, const VectorXcd& b, double abs_tol) -> std::optional<VectorXcd> {
    const MatrixXcd dg = MatrixXcd::Ones(n, n) - c * model.superop_diagonal(t);
    const VectorXcd inv = Eigen::Map<const VectorXcd>(dg.data(), n * n).cwiseInverse();
    const auto apply = [&](const VectorXcd& v, VectorXcd& w) {
      MatrixXcd o;
      model.apply(t, Eigen::Map<const MatrixXcd>(v.data(), n, n), o);
      w = v - c * Eigen::Map<const VectorXcd>(o.data(), n * n);
    };
    const auto pre = [&](VectorXcd& v) { v = v.cwiseProduct(inv); };
    GmresOptions g = gopt;
    g.abs_tol = abs_tol;
    VectorXcd x = VectorXcd::Zero(n * n);
    const GmresResult r = gmres(apply, pre, b, x, g);
    if (!r.converged) return std::nullopt;
    Eigen::Map<MatrixXcd> xm(x.data(), n, n);
    xm = (0.5 * (xm + xm.adjoint())).eval();
    return x;
  };

  Bdf solver(rhs, solve, t0, Eigen::Map<const VectorXcd>(rho0.data(), n * n), opt.bdf);
  EvolveResult out;
  for (double t : times) {
    solver.advance_to(t);
    QuantumState s{Eigen::Map<const MatrixXcd>(solver.y().data(), n, n), t};
    if (opt.check_states) {
      const StateDiagnostics d = diagnose(s.rho);
      const double bound = opt.trace_tol_per_us * std::max(1.0, (t - t0) / 1e-6);
      if (d.trace_error > bound) throw NumericalError("trace drift beyond bound", t);
      if (d.hermiticity > 1e-10) throw NumericalError("density matrix lost hermiticity", t);
      if (d.min_eigenvalue < opt.min_eigenvalue) throw NumericalError("density matrix lost positivity", t);
    }
    out.states.push_back(std::move(s));
  }
  out.stats = solver.stats();
  return out;
}

/// Fixed-step RK4 on the Lindblad equation using the half-commutator path.
/// That path maps an anti-Hermitian error A to K A - A K, which grows at the
/// largest damping gap, so the state is re-Hermitized after every step.
inline MatrixXcd rk4_evolve(const MatrixXcd& rho0, const LindbladModel& model, double t0, double t1, double h) {
  const auto steps = static_cast<std::size_t>(std::ceil((t1 - t0) / h - 1e-9));
  if (steps == 0) return rho0;
  const double dt = (t1 - t0) / static_cast<double>(steps);
  MatrixXcd rho = rho0, k1, k2, k3, k4;
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = t0 + static_cast<double>(i) * dt;
    model.apply(t, rho, k1, true);
    model.apply(t + 0.5 * dt, rho + (0.5 * dt) * k1, k2, true);
    model.apply(t + 0.5 * dt, rho + (0.5 * dt) * k2, k3, true);
    model.apply(t + dt, rho + dt * k3, k4, true);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    rho = (0.5 * (rho + rho.adjoint())).eval();
  }
  return rho;
}

inline MatrixXcd partial_trace_a(const MatrixXcd& rho, const FockDims& d) {
  if (static_cast<std::size_t>(rho.rows()) != d.total()) throw ConfigError("rho", "dimension mismatch");
  const int k = d.b * d.c;
  MatrixXcd out = MatrixXcd::Zero(d.a, d.a);
  for (int i = 0; i < d.a; ++i)
    for (int j = 0; j < d.a; ++j)
      for (int r = 0; r < k; ++r) out(i, j) += rho(i * k + r, j * k + r);
  return out;
}

/// <exp(i pi a^dag a)> for a state on the full space.
inline double parity_a(const MatrixXcd& rho, const FockDims& d) {
  const MatrixXcd ra = partial_trace_a(rho, d);
  double p = 0;
  for (int n = 0; n < d.a; ++n) p += (n % 2 ? -1.0 : 1.0) * ra(n, n).real();
  return p;
}

inline double trace_distance(const MatrixXcd& x, const MatrixXcd& y) {
  const MatrixXcd diff = x - y;
  const MatrixXcd h = 0.5 * (diff + diff.adjoint());
  return 0.5 * Eigen::SelfAdjointEigenSolver<MatrixXcd>(h, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().sum();
}

/// Truncated coherent-state amplitudes, not renormalized.
inline VectorXcd coherent_amplitudes(int n, cplx alpha) {
  VectorXcd v(n);
  cplx c = std::exp(-0.5 * std::norm(alpha));
  for (int k = 0; k < n; ++k) {
    v[k] = c;
    c *= alpha / std::sqrt(static_cast<double>(k + 1));
  }
  return v;
}

/// Coherent state in an n-level truncation, renormalized when the lost weight
/// exceeds 1e-10. Throws if the norm deficit 1 - |c| exceeds 1e-6.
inline VectorXcd coherent_state(int n, cplx alpha) {
  VectorXcd v = coherent_amplitudes(n, alpha);
  const double norm = v.norm();
  if (1.0 - norm > 1e-6) throw ConfigError("alpha", "too large for the truncation");
  if (1.0 - norm * norm > 1e-10) v /= norm;
  return v;
}

enum class Parity { even, odd };

inline VectorXcd cat_state(int n, cplx alpha, Parity parity) {
  const VectorXcd plus = coherent_state(n, alpha), minus = coherent_state(n, -alpha);
  VectorXcd c = parity == Parity::even ? VectorXcd(plus + minus) : VectorXcd(plus - minus);
  return c / c.norm();
}

/// <C|rho_a|C> for the memory-mode state rho_a.
inline double cat_fidelity(const MatrixXcd& rho_a, cplx alpha, Parity parity) {
  if (rho_a.rows() != rho_a.cols()) throw ConfigError("rho_a", "must be square");
  const VectorXcd c = cat_state(static_cast<int>(rho_a.rows()), alpha, parity);
  return std::clamp(c.dot(rho_a * c).real(), 0.0, 1.0);
}

struct WignerResult {
  Eigen::MatrixXd w;  // w(iy, ix) at beta = xs[ix] + i ys[iy]
  double integral = 0;
  std::string warning;
};

/// W(beta) = (2/pi) Tr[rho D(beta) P D(beta)^dag] on the grid xs (x) ys,
/// computed in a padded Fock space.
inline WignerResult wigner(const MatrixXcd& rho_a, const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() < 2 || ys.size() < 2) throw ConfigError("grid", "needs at least two points per axis");
  const int n = static_cast<int>(rho_a.rows());
  double r = 0;
  for (double x : xs) r = std::max(r, std::abs(x));
  for (double y : ys) r = std::max(r, std::abs(y));
  const double s = std::sqrt(static_cast<double>(n)) + r;
  const int m = n + static_cast<int>(std::ceil(s * s + 6.0 * s + 10.0));
  const MatrixXcd a = MatrixXcd(annihilation(m));
  const MatrixXcd kx = I * (a.adjoint() - a);  // D(x) = exp(-i x kx)
  const MatrixXcd ky = a + a.adjoint();        // D(iy) = exp(i y ky)
  Eigen::SelfAdjointEigenSolver<MatrixXcd> ex(kx), ey(ky);
  MatrixXcd rho = MatrixXcd::Zero(m, m);
  rho.topLeftCorner(n, n) = rho_a;
  Eigen::VectorXcd parity(m);
  for (int k = 0; k < m; ++k) parity[k] = k % 2 ? -1.0 : 1.0;

  std::vector<MatrixXcd> rx(xs.size()), qy(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const VectorXcd ph = (-I * xs[i] * ex.eigenvalues().cast<cplx>()).array().exp();
    const MatrixXcd dx = ex.eigenvectors() * ph.asDiagonal() * ex.eigenvectors().adjoint();
    rx[i] = dx.adjoint() * rho * dx;
  }
  for (std::size_t j = 0; j < ys.size(); ++j) {
    const VectorXcd ph = (I * ys[j] * ey.eigenvalues().cast<cplx>()).array().exp();
    const MatrixXcd dy = ey.eigenvectors() * ph.asDiagonal() * ey.eigenvectors().adjoint();
    qy[j] = dy * parity.asDiagonal() * dy.adjoint();
  }
  WignerResult out;
  out.w.resize(static_cast<Eigen::Index>(ys.size()), static_cast<Eigen::Index>(xs.size()));
  for (std::size_t j = 0; j < ys.size(); ++j)
    for (std::size_t i = 0; i < xs.size(); ++i)
      out.w(j, i) = (2.0 / pi) * (rx[i].cwiseProduct(qy[j].transpose())).sum().real();
  const std::vector<double> wx = detail::trapezoid_weights(xs), wy = detail::trapezoid_weights(ys);
  double sum = 0;
  for (std::size_t j = 0; j < ys.size(); ++j)
    for (std::size_t i = 0; i < xs.size(); ++i) sum += wx[i] * wy[j] * out.w(j, i);
  out.integral = sum;
  if (sum < 0.99) out.warning = "Wigner grid does not cover the state (integral " + std::to_string(sum) + ")";
  return out;
}

struct DephasingCheckOptions {
  FockDims dims{12, 4, 1};
  double n_photons = 2.0;
  double sigma = 0.0;  // rad/s
  double hold_dt = 1e-11;
  std::size_t seeds = 200;
  std::uint64_t first_seed = 1;
  double t_f = 2e-6;
  int checkpoints = 8;
  double rk4_dt = 2.5e-10;
  unsigned threads = 0;
  EvolveOptions solver{};
};

struct DephasingReport {
  double kappa_phi = 0;
  std::vector<double> times;
  std::vector<double> trace_distance;
  double max_distance = 0;
};

/// Compares kappa_phi D[a^dag a] against an ensemble of Hamiltonian runs with
/// the stochastic term (delta_omega_N / 2) a^dag a, both on top of the
/// effective model. Each run is integrated in the interaction picture of the
/// noise term, where it only dresses the pump with exp(i phi_N(t)).
inline DephasingReport dephasing_channel_check(const CircuitParams& base, const DephasingCheckOptions& opt) {
  if (opt.seeds < 10) throw ConfigError("seeds", "ensemble needs at least 10 members");
  if (opt.checkpoints < 1) throw ConfigError("checkpoints", "must be >= 1");
  CircuitParams p = base;
  p.eps_d = drive_for_photon_number(p, opt.n_photons);
  const DerivedParams d = derive(p, opt.sigma, opt.hold_dt);
  const FockOperators ops = FockOperators::make(opt.dims);
  const std::size_t dim = ops.dims.total();

  DephasingReport rep;
  rep.kappa_phi = d.kappa_phi;
  for (int k = 1; k <= opt.checkpoints; ++k) rep.times.push_back(opt.t_f * k / opt.checkpoints);

  const VectorXcd psi_a = coherent_state(opt.dims.a, d.alpha_ss);
  VectorXcd psi = VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  for (int na = 0; na < opt.dims.a; ++na) psi[na * opt.dims.b * opt.dims.c] = psi_a[na];
  const MatrixXcd rho0 = psi * psi.adjoint();

  const SpMat ad = ops.a.adjoint(), bd = ops.b.adjoint();
  const SpMat pump = d.g2 * SpMat(SpMat(ad * ad) * ops.b) +
                     d.g2_a * SpMat(SpMat(SpMat(ad * ad) * SpMat(ad * ops.a)) * ops.b) +
                     d.g2_b * SpMat(SpMat(SpMat(bd * ops.b) * SpMat(ad * ad)) * ops.b);
  const cplx eps = p.eps_d;

  LindbladModel ref(dim);
  ref.add_hermitian_pair(pump, [](double) { return cplx{1.0}; });
  ref.add_hermitian_pair(bd, [eps](double) { return eps; });
  ref.add_collapse(ops.b, p.kappa_b);
  ref.add_collapse(ops.num_a(), d.kappa_phi);
  const EvolveResult lind = evolve(rho0, ref, 0.0, rep.times, opt.solver);

  std::vector<int> n_a(dim);
  for (std::size_t i = 0; i < dim; ++i) n_a[i] = static_cast<int>(i / (opt.dims.b * opt.dims.c));
  const std::size_t nc = static_cast<std::size_t>(opt.checkpoints);
  std::vector<MatrixXcd> runs(opt.seeds * nc);
  parallel_for(opt.seeds, opt.threads, [&](std::size_t s) {
    const auto path = std::make_shared<NoisePath>(NoiseModel::white(opt.sigma, opt.first_seed + s, opt.hold_dt),
                                                  opt.t_f + 2.0 * opt.rk4_dt);
    LindbladModel m(dim);
    m.add_hermitian_pair(pump, [path](double t) { return std::polar(1.0, path->phase(t)); });
    m.add_hermitian_pair(bd, [eps](double) { return eps; });
    m.add_collapse(ops.b, p.kappa_b);
    MatrixXcd rho = rho0;
    double t = 0.0;
    for (std::size_t k = 0; k < nc; ++k) {
      rho = rk4_evolve(rho, m, t, rep.times[k], opt.rk4_dt);
      t = rep.times[k];
      const double phi = path->phase(t);
      MatrixXcd lab = rho;
      for (std::size_t j = 0; j < dim; ++j)
        for (std::size_t i = 0; i < dim; ++i) lab(i, j) *= std::polar(1.0, -0.5 * (n_a[i] - n_a[j]) * phi);
      runs[s * nc + k] = std::move(lab);
    }
  });
  for (std::size_t k = 0; k < nc; ++k) {
    MatrixXcd mean = MatrixXcd::Zero(dim, dim);
    for (std::size_t s = 0; s < opt.seeds; ++s) mean += runs[s * nc + k];
    mean /= static_cast<double>(opt.seeds);
    rep.trace_distance.push_back(trace_distance(mean, lind.states[k].rho));
    rep.max_distance = std::max(rep.max_distance, rep.trace_distance.back());
  }
  return rep;
}

/// Binary checkpoint: magic, three int32 dims, time, then the column-major
/// complex<double> entries of rho.
inline void write_checkpoint(const std::filesystem::path& path, const QuantumState& s, const FockDims& d) {
  if (static_cast<std::size_t>(s.rho.rows()) != d.total()) throw ConfigError("rho", "dimension mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  const char magic[8] = {'D', 'C', 'C', 'A', 'T', 'Q', '1', '\0'};
  out.write(magic, 8);
  const std::int32_t dims[3] = {d.a, d.b, d.c};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  out.write(reinterpret_cast<const char*>(&s.time), sizeof s.time);
  out.write(reinterpret_cast<const char*>(s.rho.data()),
            static_cast<std::streamsize>(sizeof(cplx) * static_cast<std::size_t>(s.rho.size())));
}

inline std::pair<QuantumState, FockDims> read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "DCCATQ1", 8) != 0) throw Error("not a dccat checkpoint: " + path.string());
  std::int32_t dims[3];
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  FockDims d{dims[0], dims[1], dims[2]};
  if (d.a < 1 || d.b < 1 || d.c < 1 || d.total() > (1u << 16)) throw Error("corrupt checkpoint dims");
  QuantumState s;
  in.read(reinterpret_cast<char*>(&s.time), sizeof s.time);
  const auto n = static_cast<Eigen::Index>(d.total());
  s.rho.resize(n, n);
  in.read(reinterpret_cast<char*>(s.rho.data()), static_cast<std::streamsize>(sizeof(cplx) * n * n));
  if (!in) throw Error("truncated checkpoint: " + path.string());
  return {std::move(s), d};
}

}  // namespace dccat
