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
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "dccat/units.hpp"

namespace dccat {

struct GmresOptions {
  int restart = 30;
  int max_restarts = 20;
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
};

struct GmresResult {
  bool converged = false;
  int iterations = 0;
  double residual = 0;  // final 2-norm
};

/// Restarted GMRES with right preconditioning, x <- A^{-1} b. `apply`
/// computes A v, `precond` applies an approximate inverse in place. x holds
/// the initial guess on entry.
inline GmresResult gmres(const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& apply,
                         const std::function<void(Eigen::VectorXcd&)>& precond, const Eigen::VectorXcd& b,
                         Eigen::VectorXcd& x, const GmresOptions& opt = {}) {
  const Eigen::Index n = b.size();
  const int m = opt.restart;
  GmresResult res;
  const double bnorm = b.norm();
  const double target = std::max(opt.rel_tol * bnorm, opt.abs_tol);
  if (bnorm == 0.0) {
    x.setZero(n);
    res.converged = true;
    return res;
  }
  if (x.size() != n) x.setZero(n);

  std::vector<Eigen::VectorXcd> V(m + 1, Eigen::VectorXcd(n));
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
  std::vector<cplx> cs(m), sn(m);
  Eigen::VectorXcd g(m + 1), w(n), z(n);

  for (int cycle = 0; cycle <= opt.max_restarts; ++cycle) {
    apply(x, w);
    V[0] = b - w;
    double beta = V[0].norm();
    res.residual = beta;
    if (beta <= target) {
      res.converged = true;
      return res;
    }
    V[0] /= beta;
    g.setZero();
    g[0] = beta;
    H.setZero();
    int k = 0;
    for (; k < m; ++k) {
      z = V[k];
      precond(z);
      apply(z, w);
      for (int i = 0; i <= k; ++i) {
        H(i, k) = V[i].dot(w);
        w -= H(i, k) * V[i];
      }
      const double hn = w.norm();
      H(k + 1, k) = hn;
      if (hn > 0.0) V[k + 1] = w / hn;
      for (int i = 0; i < k; ++i) {
        const cplx t = std::conj(cs[i]) * H(i, k) + std::conj(sn[i]) * H(i + 1, k);
        H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
        H(i, k) = t;
      }
      const double r = std::hypot(std::abs(H(k, k)), hn);
      cs[k] = r > 0 ? H(k, k) / r : cplx{1.0};
      sn[k] = r > 0 ? cplx{hn / r} : cplx{0.0};
      H(k, k) = r;
      H(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = std::conj(cs[k]) * g[k];
      ++res.iterations;
      res.residual = std::abs(g[k + 1]);
      if (res.residual <= target || hn == 0.0) {
        ++k;
        break;
      }
    }
    Eigen::VectorXcd yk = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    z.setZero(n);
    for (int i = 0; i < k; ++i) z += yk[i] * V[i];
    precond(z);
    x += z;
    if (res.residual <= target) {
      apply(x, w);
      res.residual = (b - w).norm();
      if (res.residual <= target * 10.0) {
        res.converged = true;
        return res;
      }
    }
  }
  return res;
}

}  // namespace dccat
