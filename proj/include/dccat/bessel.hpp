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
#include <stdexcept>

namespace dccat {

inline constexpr int bessel_series_terms = 20;
inline constexpr double bessel_max_argument = 2.0;

/// Bessel function of the first kind J_n(x), integer n >= 0, by a fixed
/// 20-term power series. For |x| <= 2 the first omitted term is below 1e-40.
inline double bessel_j(int n, double x) {
  if (n < 0) throw std::domain_error("bessel_j: negative order");
  if (std::abs(x) > bessel_max_argument) throw std::domain_error("bessel_j: |x| > 2");
  const double half = 0.5 * x;
  // (x/2)^n / n!
  double term = 1.0;
  for (int k = 1; k <= n; ++k) term *= half / k;
  double sum = term;
  const double h2 = half * half;
  for (int k = 1; k < bessel_series_terms; ++k) {
    term *= -h2 / (static_cast<double>(k) * (k + n));
    sum += term;
  }
  return sum;
}

}  // namespace dccat
