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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fundscope/util.hpp"

namespace fundscope::forest {

// Dense row-major matrix of feature values.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double>& data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class Criterion { Gini, Entropy };

struct ForestConfig {
  std::size_t n_estimators = 1000;
  std::size_t min_samples_split = 2;
  std::size_t max_features = 0;  // 0 selects ceil(sqrt(d))
  std::optional<std::size_t> max_depth;
  bool bootstrap = true;
  std::uint64_t seed = 0;
  Criterion criterion = Criterion::Gini;

  std::size_t resolved_max_features(std::size_t d) const noexcept;
  std::string describe() const;
  bool operator==(const ForestConfig&) const = default;
};

// 1 - sum (c_i / N)^2. Throws Errc::DegenerateNode when all counts are zero.
double gini(std::span<const double> counts);
// Shannon entropy in bits.
double entropy(std::span<const double> counts);
double impurity(std::span<const double> counts, Criterion criterion);

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  double decrease = 0.0;  // parent impurity minus sample-weighted child impurity
};

// Exhaustive scan of midpoints between consecutive distinct values of every
// candidate feature. `classes` holds class indices in [0, n_classes). Ties go
// to the lower feature index, then the lower threshold. std::nullopt when no
// split decreases impurity.
std::optional<Split> best_split(const Matrix& x, std::span<const int> classes,
                                std::span<const std::size_t> rows,
                                std::span<const std::size_t> candidate_features, std::size_t n_classes,
                                Criterion criterion = Criterion::Gini);

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double samples = 0.0;
  double impurity = 0.0;
  std::vector<double> counts;  // leaves only: class counts of training samples

  bool is_leaf() const noexcept { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  const TreeNode& leaf_for(std::span<const double> x) const;
  std::size_t depth() const;
  bool operator==(const DecisionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
};

// Grows one CART tree on the given sample rows (duplicates allowed).
DecisionTree grow_tree(const Matrix& x, std::span<const int> classes, std::size_t n_classes,
                       std::vector<std::size_t> rows, const ForestConfig& config, std::uint64_t tree_seed);

struct Importances {
  std::vector<double> values;  // non-negative, sums to 1 unless zero
  bool zero = false;           // no split anywhere in the forest
};

class RandomForest {
 public:
  // Trees are trained independently; serial and parallel execution produce
  // identical forests because every tree's seed derives from its index.
  static RandomForest fit(const Matrix& x, std::span<const int> labels, const ForestConfig& config,
                          Execution exec = Execution::Parallel,
                          std::vector<std::string> feature_names = {});

  std::vector<double> predict_proba(std::span<const double> x) const;
  int predict(std::span<const double> x) const;
  Matrix predict_proba(const Matrix& x, Execution exec = Execution::Parallel) const;
  std::vector<int> predict(const Matrix& x, Execution exec = Execution::Parallel) const;

  Importances feature_importances() const;

  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const ForestConfig& config() const noexcept { return config_; }
  const std::vector<std::uint64_t>& tree_seeds() const noexcept { return seeds_; }
  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
  std::size_t n_features() const noexcept { return n_features_; }
  // Training labels held a single class; every prediction is that class.
  bool constant_model() const noexcept { return labels_.size() == 1; }

  std::string to_json() const;
  static RandomForest from_json(std::string_view text);

  bool operator==(const RandomForest&) const = default;

 private:
  std::vector<DecisionTree> trees_;
  std::vector<int> labels_;
  std::vector<std::string> feature_names_;
  std::vector<std::uint64_t> seeds_;
  ForestConfig config_;
  std::size_t n_features_ = 0;
};

// Index of the largest probability; ties resolve to the lower index, which
// is the lower label since labels are kept sorted ascending.
std::size_t argmax_lowest(std::span<const double> values);

}  // namespace fundscope::forest
