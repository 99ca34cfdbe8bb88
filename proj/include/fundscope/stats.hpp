/* Copyright 2026 The fundscope Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */


#pragma once

#include <cstddef>
#include <span>

namespace fundscope::stats {

// Regularized incomplete beta I_x(a, b) by continued fraction (modified Lentz).
// Throws Errc::DomainError outside x in [0,1], a > 0, b > 0, and
// Errc::NonConvergence when 300 iterations do not reach 1e-12.
double incomplete_beta(double x, double a, double b);

inline constexpr int kBetaMaxIterations = 300;
inline constexpr double kBetaTolerance = 1e-12;

// CDF of Student's t with `df` degrees of freedom; Errc::InvalidDf when df < 1.
double student_t_cdf(double t, double df);

// Sample Pearson correlation (two-pass). Errc::ShapeError on length mismatch,
// Errc::InsufficientData when n < 3, Errc::DegenerateInput on zero variance.
double pearson_r(std::span<const double> x, std::span<const double> y);

// Two-tailed p-value of r under H0: rho = 0 with n - 2 degrees of freedom.
double pearson_p(double r, std::size_t n);

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

// Pooled-variance Student's t-test. Both groups constant: equal means give
// t = 0, p = 1; unequal means give t = +-inf, p = 0.
TTestResult two_sample_t(std::span<const double> a, std::span<const double> b);

// alpha / m; Errc::InvalidCount when m == 0, Errc::DomainError for alpha outside [0,1].
double bonferroni_threshold(double alpha, std::size_t m);

double mean(std::span<const double> x);
// Sample standard deviation (n - 1); 0 for a single value.
double sample_sd(std::span<const double> x);

}  // namespace fundscope::stats
