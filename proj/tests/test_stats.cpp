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


#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fundscope/stats.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace fundscope;
using testing::code_of;

TEST_CASE("incomplete beta against quadrature") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(0.001, 0.999);
  std::uniform_real_distribution<double> ua(0.5, 60.0);
  for (int i = 0; i < 300; ++i) {
    const double x = ux(rng), a = ua(rng), b = ua(rng);
    const double want = oracle::incomplete_beta(x, a, b);
    const double got = stats::incomplete_beta(x, a, b);
    CHECK_MESSAGE(std::abs(got - want) < 1e-10, "x=", x, " a=", a, " b=", b);
  }
  CHECK(stats::incomplete_beta(0.0, 2, 3) == 0.0);
  CHECK(stats::incomplete_beta(1.0, 2, 3) == 1.0);
  CHECK(stats::incomplete_beta(0.5, 4, 4) == doctest::Approx(0.5).epsilon(1e-14));
  // I_x(1, 1) = x
  CHECK(stats::incomplete_beta(0.3, 1, 1) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(code_of([] { stats::incomplete_beta(1.5, 1, 1); }) == Errc::DomainError);
  CHECK(code_of([] { stats::incomplete_beta(0.5, 0, 1); }) == Errc::DomainError);
  CHECK(code_of([] { stats::incomplete_beta(0.5, 1, -2); }) == Errc::DomainError);
}

TEST_CASE("student t cdf against quadrature") {
  for (double df : {1.0, 2.0, 5.0, 10.0, 28.0, 98.0, 500.0}) {
    for (double t : {-6.0, -2.5, -1.0, -0.1, 0.0, 0.3, 1.0, 1.96, 3.0, 8.0}) {
      CHECK_MESSAGE(std::abs(stats::student_t_cdf(t, df) - oracle::student_t_cdf(t, df)) < 1e-10, "t=", t,
                    " df=", df);
    }
  }
  // Cauchy: F(1) = 3/4.
  CHECK(stats::student_t_cdf(1.0, 1.0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(stats::student_t_cdf(std::numeric_limits<double>::infinity(), 4) == 1.0);
  CHECK(stats::student_t_cdf(-std::numeric_limits<double>::infinity(), 4) == 0.0);
  CHECK(code_of([] { stats::student_t_cdf(1.0, 0.5); }) == Errc::InvalidDf);
  for (double t : {0.4, 1.7, 3.3}) {
    CHECK(stats::student_t_cdf(t, 7) + stats::student_t_cdf(-t, 7) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("pearson against the two-pass oracle") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(rng() % 200);
    std::vector<double> x(n), y(n);
    const double rho = (trial % 7) / 7.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = 1e4 + z(rng);
      y[i] = rho * x[i] + z(rng);
    }
    const double r = stats::pearson_r(x, y);
    CHECK(std::abs(r - oracle::pearson_r(x, y)) < 1e-12);
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);
    if (n > 3) CHECK(std::abs(stats::pearson_p(r, n) - oracle::pearson_p(r, n)) < 1e-10);
  }
}

TEST_CASE("pearson examples and errors") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{2, 4, 6, 8, 10};
  CHECK(stats::pearson_r(x, y) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(stats::pearson_p(1.0, 5) == 0.0);
  CHECK(stats::pearson_p(0.0, 30) == doctest::Approx(1.0));
  const std::vector<double> yr{10, 8, 6, 4, 2};
  CHECK(stats::pearson_r(x, yr) == doctest::Approx(-1.0).epsilon(1e-15));
  const std::vector<double> c{3, 3, 3, 3, 3};
  CHECK(code_of([&] { stats::pearson_r(x, c); }) == Errc::DegenerateInput);
  const std::vector<double> two{1, 2};
  CHECK(code_of([&] { stats::pearson_r(two, two); }) == Errc::InsufficientData);
  const std::vector<double> four{1, 2, 3, 4};
  CHECK(code_of([&] { stats::pearson_r(x, four); }) == Errc::ShapeError);
}

TEST_CASE("pearson invariances") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> z;
  std::vector<double> x(60), y(60);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = z(rng);
    y[i] = 0.4 * x[i] + z(rng);
  }
  const double r = stats::pearson_r(x, y);
  CHECK(stats::pearson_r(y, x) == doctest::Approx(r).epsilon(1e-14));
  std::vector<double> xs(x), ys(y);
  for (auto& v : xs) v = 3.0 * v - 7.0;
  for (auto& v : ys) v = 0.5 * v + 100.0;
  CHECK(stats::pearson_r(xs, ys) == doctest::Approx(r).epsilon(1e-12));
  for (auto& v : xs) v = -v;
  CHECK(stats::pearson_r(xs, ys) == doctest::Approx(-r).epsilon(1e-12));
  std::vector<std::size_t> perm(x.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> xp, yp;
  for (auto i : perm) {
    xp.push_back(x[i]);
    yp.push_back(y[i]);
  }
  CHECK(stats::pearson_r(xp, yp) == doctest::Approx(r).epsilon(1e-13));
}

TEST_CASE("two sample t") {
  const std::vector<double> a{1, 2, 3, 4, 5};
  const std::vector<double> b{3, 4, 5, 6, 7};
  const auto res = stats::two_sample_t(a, b);
  // Pooled variance 2.5, standard error 1, t = -2 on 8 df.
  CHECK(res.t == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(res.df == 8.0);
  CHECK(res.p == doctest::Approx(2.0 * oracle::student_t_cdf(-2.0, 8.0)).epsilon(1e-10));
  CHECK(res.mean_a == 3.0);
  CHECK(res.mean_b == 5.0);
  const std::vector<double> c1{2, 2, 2}, c2{2, 2}, c3{5, 5};
  const auto same = stats::two_sample_t(c1, c2);
  CHECK(same.t == 0.0);
  CHECK(same.p == 1.0);
  const auto diff = stats::two_sample_t(c1, c3);
  CHECK(std::isinf(diff.t));
  CHECK(diff.t < 0.0);
  CHECK(diff.p == 0.0);
}

TEST_CASE("bonferroni and descriptive helpers") {
  CHECK(stats::bonferroni_threshold(0.05, 80) == doctest::Approx(0.000625));
  CHECK(stats::bonferroni_threshold(0.05, 1) == 0.05);
  CHECK(code_of([] { stats::bonferroni_threshold(0.05, 0); }) == Errc::InvalidCount);
  CHECK(code_of([] { stats::bonferroni_threshold(1.5, 3); }) == Errc::DomainError);
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  CHECK(stats::mean(v) == 5.0);
  CHECK(stats::sample_sd(v) == doctest::Approx(std::sqrt(32.0 / 7.0)));
  const std::vector<double> one{3};
  CHECK(stats::sample_sd(one) == 0.0);
}
