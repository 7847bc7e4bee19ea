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
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "dccat/error.hpp"

namespace dccat {

struct BdfOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  int max_order = 5;
  double first_step = 0.0;  // 0 selects automatically
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 50'000'000;

  void validate() const {
    if (!(rtol > 0.0)) throw ConfigError("solver.rtol", "must be > 0");
    if (!(atol >= 0.0)) throw ConfigError("solver.atol", "must be >= 0");
    if (max_order < 1 || max_order > 5) throw ConfigError("solver.max_order", "must be in [1, 5]");
    if (!(first_step >= 0.0)) throw ConfigError("solver.first_step", "must be >= 0");
    if (!(max_step > 0.0)) throw ConfigError("solver.max_step", "must be > 0");
  }
};

struct BdfStats {
  std::size_t steps = 0, rejected = 0, newton_failures = 0, rhs_evals = 0, linear_solves = 0;
};

/// Variable-order (1..5), variable-step backward differentiation formulas in
/// the quasi-constant step size form with modified divided differences, as
/// in the classic NDF/BDF family used by scipy's `BDF`. The Newton linear
/// systems (I - c J) x = r are delegated to `solve`, which returns nullopt
/// when it cannot reach the requested accuracy.
class Bdf {
 public:
  using Vec = Eigen::VectorXcd;
  using Rhs = std::function<void(double t, const Vec& y, Vec& out)>;
  using Solve = std::function<std::optional<Vec>(double c, double t, const Vec& rhs, double abs_tol)>;

  Bdf(Rhs f, Solve solve, double t0, const Vec& y0, const BdfOptions& opt = {})
      : f_(std::move(f)), solve_(std::move(solve)), opt_(opt), t_(t0), y_(y0) {
    opt_.validate();
    newton_tol_ = std::max(10.0 * kEps / opt_.rtol, std::min(0.03, std::sqrt(opt_.rtol)));
    kappa_ = {0.0, -0.1850, -1.0 / 9.0, -0.0823, -0.0415, 0.0};
    gamma_[0] = 0.0;
    for (int j = 1; j <= kMaxOrder; ++j) gamma_[j] = gamma_[j - 1] + 1.0 / j;
    for (int j = 0; j <= kMaxOrder; ++j) {
      alpha_[j] = (1.0 - kappa_[j]) * gamma_[j];
      error_const_[j] = kappa_[j] * gamma_[j] + 1.0 / (j + 1);
    }
    Vec f0(y0.size());
    eval(t0, y0, f0);
    h_abs_ = opt_.first_step > 0.0 ? opt_.first_step : initial_step(f0);
    h_abs_ = std::min(h_abs_, opt_.max_step);
    for (auto& d : D_) d.setZero(y0.size());
    D_[0] = y0;
    D_[1] = f0 * h_abs_;
  }

  double t() const { return t_; }
  const Vec& y() const { return y_; }
  int order() const { return order_; }
  double step_size() const { return h_abs_; }
  const BdfStats& stats() const { return stats_; }

  /// Steps until t == t_bound exactly (the last step is shortened).
  void advance_to(double t_bound) {
    if (t_bound < t_) throw ConfigError("t_bound", "must not precede the current time");
    while (t_ < t_bound) {
      if (stats_.steps >= opt_.max_steps) throw NumericalError("BDF step limit reached", t_);
      step(t_bound);
    }
  }

 private:
  static constexpr int kMaxOrder = 5;
  static constexpr int kNewtonMaxIter = 4;
  static constexpr double kMinFactor = 0.2;
  static constexpr double kMaxFactor = 10.0;
  static constexpr double kEps = std::numeric_limits<double>::epsilon();

  void eval(double t, const Vec& y, Vec& out) {
    ++stats_.rhs_evals;
    f_(t, y, out);
  }

  static double rms(const Vec& v, const Eigen::VectorXd& scale) {
    return std::sqrt((v.cwiseAbs().cwiseQuotient(scale)).squaredNorm() / static_cast<double>(v.size()));
  }

  double initial_step(const Vec& f0) {
    const Eigen::VectorXd scale = (opt_.atol + opt_.rtol * y_.cwiseAbs().array()).matrix();
    const double d0 = rms(y_, scale), d1 = rms(f0, scale);
    const double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    Vec f1(y_.size());
    eval(t_ + h0, y_ + h0 * f0, f1);
    const double d2 = rms(f1 - f0, scale) / h0;
    const double h1 = (d1 <= 1e-15 && d2 <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                                     : std::pow(0.01 / std::max(d1, d2), 1.0 / 2.0);
    return std::min(100.0 * h0, h1);
  }

  using Mat = Eigen::MatrixXd;

  static Mat compute_R(int order, double factor) {
    Mat M = Mat::Zero(order + 1, order + 1);
    for (int i = 1; i <= order; ++i)
      for (int j = 0; j <= order; ++j) M(i, j) = (i - 1 - factor * j) / i;
    M.row(0).setOnes();
    for (int i = 1; i <= order; ++i) M.row(i) = M.row(i).cwiseProduct(M.row(i - 1));
    return M;
  }

  void change_D(int order, double factor) {
    const Mat RU = compute_R(order, factor) * compute_R(order, 1.0);
    std::array<Vec, kMaxOrder + 1> tmp;
    for (int i = 0; i <= order; ++i) {
      tmp[i].setZero(y_.size());
      for (int k = 0; k <= order; ++k) tmp[i] += RU(k, i) * D_[k];
    }
    for (int i = 0; i <= order; ++i) D_[i] = std::move(tmp[i]);
  }

  struct NewtonResult {
    bool converged = false;
    int iterations = 0;
    Vec y, d;
  };

  NewtonResult newton(double t_new, const Vec& y_predict, double c, const Vec& psi, const Eigen::VectorXd& scale) {
    NewtonResult r;
    r.y = y_predict;
    r.d.setZero(y_predict.size());
    Vec fv(y_predict.size());
    std::optional<double> dy_norm_old;
    const double abs_tol = 1e-3 * newton_tol_ * scale.norm();
    for (int k = 0; k < kNewtonMaxIter; ++k) {
      r.iterations = k + 1;
      eval(t_new, r.y, fv);
      if (!fv.allFinite()) break;
      ++stats_.linear_solves;
      const std::optional<Vec> dy = solve_(c, t_new, c * fv - psi - r.d, abs_tol);
      if (!dy) break;
      const double dy_norm = rms(*dy, scale);
      std::optional<double> rate;
      if (dy_norm_old) rate = dy_norm / *dy_norm_old;
      if (rate && (*rate >= 1.0 || std::pow(*rate, kNewtonMaxIter - k) / (1.0 - *rate) * dy_norm > newton_tol_))
        break;
      r.y += *dy;
      r.d += *dy;
      if (dy_norm == 0.0 || (rate && *rate / (1.0 - *rate) * dy_norm < newton_tol_)) {
        r.converged = true;
        break;
      }
      dy_norm_old = dy_norm;
    }
    return r;
  }

  void step(double t_bound) {
    const double min_step = 10.0 * (std::nextafter(t_, std::numeric_limits<double>::infinity()) - t_);
    if (h_abs_ > opt_.max_step) {
      change_D(order_, opt_.max_step / h_abs_);
      h_abs_ = opt_.max_step;
      n_equal_steps_ = 0;
    } else if (h_abs_ < min_step) {
      change_D(order_, min_step / h_abs_);
      h_abs_ = min_step;
      n_equal_steps_ = 0;
    }

    NewtonResult nr;
    double error_norm = 0, safety = 0, t_new = 0;
    Eigen::VectorXd scale;
    for (;;) {
      if (h_abs_ < min_step) throw NumericalError("BDF step size underflow", t_);
      t_new = t_ + h_abs_;
      if (t_new > t_bound) {
        t_new = t_bound;
        change_D(order_, (t_new - t_) / h_abs_);
        n_equal_steps_ = 0;
      }
      const double h = t_new - t_;
      h_abs_ = h;

      Vec y_predict = D_[0];
      for (int i = 1; i <= order_; ++i) y_predict += D_[i];
      scale = (opt_.atol + opt_.rtol * y_predict.cwiseAbs().array()).matrix();
      Vec psi = Vec::Zero(y_.size());
      for (int i = 1; i <= order_; ++i) psi += gamma_[i] * D_[i];
      psi /= alpha_[order_];
      const double c = h / alpha_[order_];

      nr = newton(t_new, y_predict, c, psi, scale);
      if (!nr.converged) {
        ++stats_.newton_failures;
        h_abs_ *= 0.5;
        change_D(order_, 0.5);
        n_equal_steps_ = 0;
        continue;
      }
      safety = 0.9 * (2 * kNewtonMaxIter + 1) / (2 * kNewtonMaxIter + nr.iterations);
      scale = (opt_.atol + opt_.rtol * nr.y.cwiseAbs().array()).matrix();
      error_norm = rms(error_const_[order_] * nr.d, scale);
      if (error_norm > 1.0) {
        ++stats_.rejected;
        const double factor = std::max(kMinFactor, safety * std::pow(error_norm, -1.0 / (order_ + 1)));
        h_abs_ *= factor;
        change_D(order_, factor);
        n_equal_steps_ = 0;
        continue;
      }
      break;
    }

    ++stats_.steps;
    ++n_equal_steps_;
    t_ = t_new;
    y_ = nr.y;
    D_[order_ + 2] = nr.d - D_[order_ + 1];
    D_[order_ + 1] = nr.d;
    for (int i = order_; i >= 0; --i) D_[i] += D_[i + 1];

    if (n_equal_steps_ < order_ + 1) return;

    const double inf = std::numeric_limits<double>::infinity();
    const double error_m = order_ > 1 ? rms(error_const_[order_ - 1] * D_[order_], scale) : inf;
    const double error_p = order_ < opt_.max_order ? rms(error_const_[order_ + 1] * D_[order_ + 2], scale) : inf;
    const std::array<double, 3> norms = {error_m, error_norm, error_p};
    std::array<double, 3> factors{};
    for (int i = 0; i < 3; ++i)
      factors[i] = norms[i] == 0.0 ? inf : std::pow(norms[i], -1.0 / (order_ + i));
    const int best = static_cast<int>(std::max_element(factors.begin(), factors.end()) - factors.begin());
    order_ += best - 1;
    const double factor = std::min(kMaxFactor, safety * factors[best]);
    h_abs_ *= factor;
    change_D(order_, factor);
    n_equal_steps_ = 0;
  }

  Rhs f_;
  Solve solve_;
  BdfOptions opt_;
  double t_;
  Vec y_;
  double h_abs_ = 0;
  int order_ = 1;
  int n_equal_steps_ = 0;
  double newton_tol_ = 0;
  std::array<double, kMaxOrder + 1> kappa_{}, gamma_{}, alpha_{}, error_const_{};
  std::array<Vec, kMaxOrder + 3> D_;
  BdfStats stats_;
};

}  // namespace dccat
