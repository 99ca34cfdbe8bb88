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


#include "fundscope/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "fundscope/error.hpp"
#include "fundscope/util.hpp"

namespace fundscope::metrics {

Metrics compute_metrics(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size()) throw Error(Errc::ShapeError, "y_true and y_pred differ in length");
  if (y_true.empty()) throw Error(Errc::InsufficientData, "no predictions to score");
  std::map<int, ClassMetrics> by_label;
  std::size_t correct = 0;
  std::map<int, std::size_t> tp;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    by_label[y_true[i]].support++;
    by_label[y_pred[i]].predicted++;
    if (y_true[i] == y_pred[i]) {
      ++correct;
      ++tp[y_true[i]];
    }
  }
  Metrics m;
  m.n = y_true.size();
  const double n = static_cast<double>(m.n);
  m.accuracy = static_cast<double>(correct) / n;
  for (auto& [label, c] : by_label) {
    c.label = label;
    const double t = static_cast<double>(tp[label]);
    if (c.predicted == 0) {
      c.precision_undefined = true;
      c.precision = 0.0;
    } else {
      c.precision = t / static_cast<double>(c.predicted);
    }
    c.recall = c.support ? t / static_cast<double>(c.support) : 0.0;
    c.f1 = c.precision + c.recall > 0.0 ? 2.0 * c.precision * c.recall / (c.precision + c.recall) : 0.0;
    const double w = static_cast<double>(c.support) / n;
    m.precision += w * c.precision;
    m.recall += w * c.recall;
    m.f1 += w * c.f1;
    m.per_class.push_back(c);
  }
  return m;
}

Folds stratified_kfold(std::span<const int> y, std::size_t k, std::uint64_t seed) {
  if (y.size() < 2) throw Error(Errc::InsufficientData, "stratified_kfold needs at least 2 samples");
  if (k < 2) throw Error(Errc::ConfigError, "k must be >= 2");
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < y.size(); ++i) members[y[i]].push_back(i);
  std::size_t smallest = y.size();
  for (const auto& [label, idx] : members) smallest = std::min(smallest, idx.size());

  Folds out;
  out.k = k;
  if (smallest < k) {
    out.k = std::max<std::size_t>(2, smallest);
    out.note = "k lowered from " + std::to_string(k) + " to " + std::to_string(out.k) +
               " (smallest class has " + std::to_string(smallest) + " members)";
    if (smallest < 2) {
      throw Error(Errc::InsufficientData, "a class has fewer than 2 members; cannot build folds");
    }
  }
  out.folds.assign(out.k, {});
  std::mt19937_64 rng(seed);
  std::size_t next = 0;
  for (auto& [label, idx] : members) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (auto i : idx) {
      out.folds[next].push_back(i);
      next = (next + 1) % out.k;
    }
  }
  for (auto& f : out.folds) std::sort(f.begin(), f.end());
  return out;
}

Holdout stratified_holdout(std::span<const int> y, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(Errc::ConfigError, "test fraction must lie in (0,1)");
  }
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < y.size(); ++i) members[y[i]].push_back(i);
  Holdout out;
  std::mt19937_64 rng(seed);
  for (auto& [label, idx] : members) {
    std::shuffle(idx.begin(), idx.end(), rng);
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(idx.size())));
    if (n_test == 0 && idx.size() >= 2) n_test = 1;
    if (n_test >= idx.size()) n_test = idx.size() - 1;
    out.test.insert(out.test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train.insert(out.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace fundscope::metrics
