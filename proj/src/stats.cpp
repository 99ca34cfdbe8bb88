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


#include "fundscope/stats.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fundscope/error.hpp"

namespace fundscope::stats {

namespace {

// Continued fraction for I_x(a,b), valid for x < (a+1)/(a+b+2).
double beta_continued_fraction(double x, double a, double b) {
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kBetaMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kBetaTolerance) return h;
  }
  throw Error(Errc::NonConvergence, "incomplete beta continued fraction did not converge (x=" +
                                        std::to_string(x) + ", a=" + std::to_string(a) +
                                        ", b=" + std::to_string(b) + ")");
}

}  // namespace

double incomplete_beta(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0) || !(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw Error(Errc::DomainError, "incomplete_beta requires x in [0,1], a > 0, b > 0");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(x, a, b) / a;
  return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double student_t_cdf(double t, double df) {
  if (!(df >= 1.0)) throw Error(Errc::InvalidDf, "degrees of freedom must be >= 1");
  if (std::isnan(t)) throw Error(Errc::DomainError, "t is NaN");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  if (t == 0.0) return 0.5;
  const double tail = 0.5 * incomplete_beta(df / (df + t * t), df / 2.0, 0.5);
  return t > 0 ? 1.0 - tail : tail;
}

double mean(std::span<const double> x) {
  if (x.empty()) throw Error(Errc::InsufficientData, "mean of an empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(Errc::ShapeError, "pearson_r: length mismatch");
  if (x.size() < 3) throw Error(Errc::InsufficientData, "pearson_r needs n >= 3");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(Errc::DegenerateInput, "pearson_r: zero variance");
  const double r = sxy / std::sqrt(sxx * syy);
  return std::fmax(-1.0, std::fmin(1.0, r));
}

double pearson_p(double r, std::size_t n) {
  if (n < 3) throw Error(Errc::InsufficientData, "pearson_p needs n >= 3");
  if (!(std::fabs(r) <= 1.0)) throw Error(Errc::DomainError, "|r| must be <= 1");
  if (std::fabs(r) == 1.0) return 0.0;
  const double df = static_cast<double>(n - 2);
  const double t = std::fabs(r) * std::sqrt(df / (1.0 - r * r));
  // 2 (1 - F(|t|)) written as the lower tail to avoid cancellation.
  if (t == 0.0) return 1.0;
  return incomplete_beta(df / (df + t * t), df / 2.0, 0.5);
}

TTestResult two_sample_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(Errc::InsufficientData, "two_sample_t needs at least 2 values per group");
  }
  TTestResult r;
  r.n_a = a.size();
  r.n_b = b.size();
  r.mean_a = mean(a);
  r.mean_b = mean(b);
  r.df = static_cast<double>(a.size() + b.size() - 2);
  double ss = 0.0;
  for (double v : a) ss += (v - r.mean_a) * (v - r.mean_a);
  for (double v : b) ss += (v - r.mean_b) * (v - r.mean_b);
  const double pooled = ss / r.df;
  const double diff = r.mean_a - r.mean_b;
  const double se = std::sqrt(pooled * (1.0 / static_cast<double>(a.size()) +
                                        1.0 / static_cast<double>(b.size())));
  if (se == 0.0) {
    if (diff == 0.0) {
      r.t = 0.0;
      r.p = 1.0;
    } else {
      r.t = diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      r.p = 0.0;
    }
    return r;
  }
  r.t = diff / se;
  if (r.t == 0.0) {
    r.p = 1.0;
  } else {
    r.p = incomplete_beta(r.df / (r.df + r.t * r.t), r.df / 2.0, 0.5);
  }
  return r;
}

double bonferroni_threshold(double alpha, std::size_t m) {
  if (m == 0) throw Error(Errc::InvalidCount, "Bonferroni family size must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(Errc::DomainError, "alpha must lie in [0,1]");
  return alpha / static_cast<double>(m);
}

}  // namespace fundscope::stats
