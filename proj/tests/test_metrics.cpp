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

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "fundscope/metrics.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace fundscope;
using namespace fundscope::metrics;
using testing::code_of;

TEST_CASE("hand-computed example") {
  const std::vector<int> y{1, 1, 1, -1};
  const std::vector<int> p{1, 1, -1, -1};
  const auto m = compute_metrics(y, p);
  CHECK(m.accuracy == 0.75);
  CHECK(m.precision == doctest::Approx(0.875));
  CHECK(m.recall == 0.75);
  CHECK(m.f1 == doctest::Approx(0.7666666667));
  REQUIRE(m.per_class.size() == 2);
  CHECK(m.per_class[0].label == -1);
  CHECK(m.per_class[0].precision == 0.5);
  CHECK(m.per_class[0].recall == 1.0);
  CHECK(m.per_class[1].support == 3);

  const std::vector<int> y2{0, 0, 1, 1, 2, 2};
  const std::vector<int> p2{0, 1, 1, 1, 2, 0};
  const auto m2 = compute_metrics(y2, p2);
  CHECK(m2.accuracy == doctest::Approx(4.0 / 6.0));
  // precision: 1/2, 2/3, 1; recall 1/2, 1, 1/2
  CHECK(m2.precision == doctest::Approx((0.5 + 2.0 / 3.0 + 1.0) / 3.0));
  CHECK(m2.recall == doctest::Approx(4.0 / 6.0));
  CHECK(m2.f1 == doctest::Approx((0.5 + 0.8 + 2.0 / 3.0) / 3.0));
}

TEST_CASE("metrics agree with the confusion-matrix oracle") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 60;
    const int k = 2 + static_cast<int>(rng() % 3);
    std::vector<int> y(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(rng() % static_cast<std::uint64_t>(k)) - 2;
      p[i] = rng() % 3 ? y[i] : static_cast<int>(rng() % static_cast<std::uint64_t>(k + 1)) - 2;
    }
    const auto m = compute_metrics(y, p);
    const auto o = oracle::weighted_metrics(y, p);
    CHECK(m.accuracy == doctest::Approx(o.accuracy).epsilon(1e-12));
    CHECK(m.precision == doctest::Approx(o.precision).epsilon(1e-12));
    CHECK(m.recall == doctest::Approx(o.recall).epsilon(1e-12));
    CHECK(m.f1 == doctest::Approx(o.f1).epsilon(1e-12));
    CHECK(m.recall == doctest::Approx(m.accuracy).epsilon(1e-12));
    CHECK(m.n == n);
  }
}

TEST_CASE("undefined precision and errors") {
  const std::vector<int> y{1, 1, -1, -1};
  const std::vector<int> p{1, 1, 1, 1};
  const auto m = compute_metrics(y, p);
  CHECK(m.per_class[0].precision_undefined);
  CHECK(m.per_class[0].precision == 0.0);
  CHECK(m.precision == doctest::Approx(0.25));
  const std::vector<int> empty;
  CHECK(code_of([&] { compute_metrics(empty, empty); }) == Errc::InsufficientData);
  const std::vector<int> three{1, 1, 1};
  CHECK(code_of([&] { compute_metrics(y, three); }) == Errc::ShapeError);
}

TEST_CASE("stratified folds partition the rows") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 20 + rng() % 200;
    std::vector<int> y(n);
    for (auto& v : y) v = rng() % 4 ? 1 : -1;
    if (std::count(y.begin(), y.end(), -1) < 10) continue;
    const std::size_t k = 2 + rng() % 9;
    const auto folds = stratified_kfold(y, k, rng());
    REQUIRE(folds.k == k);
    CHECK(folds.note.empty());
    std::vector<int> seen(n, 0);
    std::size_t lo = n, hi = 0;
    for (const auto& f : folds.folds) {
      CHECK(std::is_sorted(f.begin(), f.end()));
      for (auto i : f) ++seen[i];
      lo = std::min(lo, f.size());
      hi = std::max(hi, f.size());
      std::map<int, std::size_t> per;
      for (auto i : f) ++per[y[i]];
      for (int label : {-1, 1}) {
        const auto total = static_cast<std::size_t>(std::count(y.begin(), y.end(), label));
        CHECK(per[label] >= total / k);
        CHECK(per[label] <= (total + k - 1) / k);
      }
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    CHECK(hi - lo <= 1);
  }
}

TEST_CASE("folds lower k for small classes and are seeded") {
  std::vector<int> y(30, 1);
  y[0] = y[1] = y[2] = -1;
  const auto f = stratified_kfold(y, 10, 1);
  CHECK(f.k == 3);
  CHECK_FALSE(f.note.empty());
  y[1] = y[2] = 1;
  CHECK(code_of([&] { stratified_kfold(y, 10, 1); }) == Errc::InsufficientData);
  std::vector<int> z(40);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = i % 2;
  CHECK(stratified_kfold(z, 5, 7).folds == stratified_kfold(z, 5, 7).folds);
  CHECK(stratified_kfold(z, 5, 7).folds != stratified_kfold(z, 5, 8).folds);
  CHECK(code_of([&] { stratified_kfold(z, 1, 7); }) == Errc::ConfigError);
}

TEST_CASE("stratified holdout") {
  std::vector<int> y;
  for (int i = 0; i < 75; ++i) y.push_back(1);
  for (int i = 0; i < 25; ++i) y.push_back(-1);
  const auto h = stratified_holdout(y, 0.1, 3);
  std::size_t pos = 0, neg = 0;
  for (auto i : h.test) (y[i] == 1 ? pos : neg) += 1;
  CHECK(pos == 8);  // round(7.5)
  CHECK(neg == 3);  // round(2.5)
  CHECK(h.train.size() + h.test.size() == y.size());
  std::set<std::size_t> all(h.train.begin(), h.train.end());
  for (auto i : h.test) CHECK(all.insert(i).second);
  const std::vector<int> tiny{1, 1, -1, -1};
  const auto t = stratified_holdout(tiny, 0.1, 1);
  CHECK(t.test.size() == 2);
  CHECK(code_of([&] { stratified_holdout(y, 1.0, 1); }) == Errc::ConfigError);
}
