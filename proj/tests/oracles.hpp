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

// Reference implementations used only by tests. They share no code with the
// library: special functions come from numerical quadrature, statistics from
// textbook two-pass formulas.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

inline double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// Regularized incomplete beta by tanh-sinh quadrature of the Beta density.
// The density is integrated over the shorter tail to keep the result accurate
// near 1.
inline double incomplete_beta(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double lb = log_beta(a, b);
  auto density = [&](double t, double tc) {
    if (t <= 0.0 || tc <= 0.0) return 0.0;
    return std::exp((a - 1.0) * std::log(t) + (b - 1.0) * std::log(tc) - lb);
  };
  boost::math::quadrature::tanh_sinh<double> ts(15);
  const double mode = (a > 1.0 && b > 1.0) ? (a - 1.0) / (a + b - 2.0) : 0.5;
  if (x <= mode) return ts.integrate([&](double t) { return density(t, 1.0 - t); }, 0.0, x);
  // Upper tail in u = 1 - t so a singular (1 - t)^(b - 1) sits at u = 0.
  const double upper = ts.integrate([&](double u) { return density(1.0 - u, u); }, 0.0, 1.0 - x);
  return 1.0 - upper;
}

inline double t_density(double t, double df) {
  const double c = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) - 0.5 * std::log(df * std::numbers::pi);
  return std::exp(c - (df + 1.0) / 2.0 * std::log1p(t * t / df));
}

// Student t CDF: 1/2 plus the density integrated from 0 to |t| with adaptive
// Gauss-Kronrod.
inline double student_t_cdf(double t, double df) {
  if (t == 0.0) return 0.5;
  const double at = std::abs(t);
  double err = 0.0;
  const double half = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double s) { return t_density(s, df); }, 0.0, at, 15, 1e-12, &err);
  return t > 0.0 ? 0.5 + half : 0.5 - half;
}

// Upper tail P(T > |t|) as half the quadrature incomplete beta at df/(df+t^2),
// which keeps the digits of very small p-values.
inline double student_t_upper(double t, double df) {
  return 0.5 * incomplete_beta(df / (df + t * t), df / 2.0, 0.5);
}

// Two-tailed p of a correlation through the quadrature t tail.
inline double pearson_p(double r, std::size_t n) {
  if (std::abs(r) >= 1.0) return 0.0;
  const double df = static_cast<double>(n) - 2.0;
  const double t = std::abs(r) * std::sqrt(df / (1.0 - r * r));
  return 2.0 * student_t_upper(t, df);
}

// Two-pass sample correlation.
inline double pearson_r(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

struct Confusion {
  double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
};

// Support-weighted metrics straight from a confusion matrix over the label union.
inline Confusion weighted_metrics(std::span<const int> truth, std::span<const int> pred) {
  std::vector<int> labels(truth.begin(), truth.end());
  labels.insert(labels.end(), pred.begin(), pred.end());
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  const std::size_t k = labels.size();
  auto idx = [&](int l) { return static_cast<std::size_t>(std::lower_bound(labels.begin(), labels.end(), l) - labels.begin()); };
  std::vector<std::vector<double>> cm(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < truth.size(); ++i) cm[idx(truth[i])][idx(pred[i])] += 1.0;
  Confusion c;
  const double n = static_cast<double>(truth.size());
  for (std::size_t a = 0; a < k; ++a) {
    double row = 0.0, col = 0.0;
    for (std::size_t b = 0; b < k; ++b) {
      row += cm[a][b];
      col += cm[b][a];
    }
    c.accuracy += cm[a][a] / n;
    const double p = col > 0.0 ? cm[a][a] / col : 0.0;
    const double r = row > 0.0 ? cm[a][a] / row : 0.0;
    const double f = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    c.precision += row / n * p;
    c.recall += row / n * r;
    c.f1 += row / n * f;
  }
  return c;
}

}  // namespace oracle
