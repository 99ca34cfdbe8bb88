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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fundscope::metrics {

struct ClassMetrics {
  int label = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;         // true members of the class
  std::size_t predicted = 0;       // predictions of the class
  bool precision_undefined = false;  // no predictions; precision reported as 0
};

// Weighted averages use true-class supports as weights, so weighted recall
// equals accuracy.
struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t n = 0;
  std::vector<ClassMetrics> per_class;  // ascending label order
};

// Labels are the union of y_true and y_pred. Errc::ShapeError on length
// mismatch, Errc::InsufficientData when empty.
Metrics compute_metrics(std::span<const int> y_true, std::span<const int> y_pred);

struct Folds {
  std::vector<std::vector<std::size_t>> folds;  // each sorted ascending
  std::size_t k = 0;
  std::string note;  // set when k was lowered to the smallest class count
};

// Members of each class are shuffled with the seed and dealt round-robin,
// continuing where the previous class stopped, so each fold's per-class
// count is floor or ceil of count / k.
Folds stratified_kfold(std::span<const int> y, std::size_t k, std::uint64_t seed);

struct Holdout {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Stratified hold-out: round(test_fraction * count) members of each class
// (at least one when the class has two or more members) go to the test set.
Holdout stratified_holdout(std::span<const int> y, double test_fraction, std::uint64_t seed);

}  // namespace fundscope::metrics
