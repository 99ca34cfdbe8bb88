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


#include "fundscope/forest.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>
#include <random>

#include "fundscope/error.hpp"

namespace fundscope::forest {

using nlohmann::json;

namespace {

// Splits whose impurity decrease does not exceed this are rounding noise.
constexpr double kMinDecrease = 1e-12;

double total(std::span<const double> counts) {
  double n = 0.0;
  for (double c : counts) n += c;
  return n;
}

}  // namespace

std::size_t ForestConfig::resolved_max_features(std::size_t d) const noexcept {
  if (max_features > 0) return std::min(max_features, d);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d)))));
}

std::string ForestConfig::describe() const {
  return "n_estimators=" + std::to_string(n_estimators) +
         " min_samples_split=" + std::to_string(min_samples_split) +
         " max_features=" + (max_features ? std::to_string(max_features) : std::string("ceil(sqrt(d))")) +
         " max_depth=" + (max_depth ? std::to_string(*max_depth) : std::string("none")) +
         " bootstrap=" + (bootstrap ? "true" : "false") +
         " criterion=" + (criterion == Criterion::Gini ? "gini" : "entropy") +
         " seed=" + std::to_string(seed);
}

double gini(std::span<const double> counts) {
  const double n = total(counts);
  if (!(n > 0.0)) throw Error(Errc::DegenerateNode, "gini of an empty node");
  double sq = 0.0;
  for (double c : counts) {
    if (c < 0.0) throw Error(Errc::DomainError, "negative class count");
    sq += (c / n) * (c / n);
  }
  return 1.0 - sq;
}

double entropy(std::span<const double> counts) {
  const double n = total(counts);
  if (!(n > 0.0)) throw Error(Errc::DegenerateNode, "entropy of an empty node");
  double h = 0.0;
  for (double c : counts) {
    if (c < 0.0) throw Error(Errc::DomainError, "negative class count");
    if (c > 0.0) h -= (c / n) * std::log2(c / n);
  }
  return h;
}

double impurity(std::span<const double> counts, Criterion criterion) {
  return criterion == Criterion::Gini ? gini(counts) : entropy(counts);
}

namespace {

// Impurity on raw counts without validation; the hot loop of the split search.
double fast_impurity(const double* counts, std::size_t k, double n, Criterion criterion) {
  if (n <= 0.0) return 0.0;
  if (criterion == Criterion::Gini) {
    double sq = 0.0;
    for (std::size_t c = 0; c < k; ++c) sq += counts[c] * counts[c];
    return 1.0 - sq / (n * n);
  }
  double h = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] > 0.0) h -= (counts[c] / n) * std::log2(counts[c] / n);
  }
  return h;
}

struct SplitScratch {
  std::vector<std::pair<double, int>> pairs;
  std::vector<double> left, right;
};

// Best threshold for one feature; returns false when the feature cannot split.
bool scan_feature(const Matrix& x, std::span<const int> classes, std::span<const std::size_t> rows,
                  std::size_t feature, std::size_t n_classes, Criterion criterion,
                  std::span<const double> parent_counts, double parent_impurity, SplitScratch& s,
                  double& best_threshold, double& best_decrease) {
  s.pairs.clear();
  for (auto r : rows) s.pairs.emplace_back(x(r, feature), classes[r]);
  std::sort(s.pairs.begin(), s.pairs.end());
  if (s.pairs.front().first == s.pairs.back().first) return false;

  s.left.assign(n_classes, 0.0);
  s.right.assign(parent_counts.begin(), parent_counts.end());
  const double n = static_cast<double>(s.pairs.size());
  bool found = false;
  for (std::size_t i = 0; i + 1 < s.pairs.size(); ++i) {
    const auto cls = static_cast<std::size_t>(s.pairs[i].second);
    s.left[cls] += 1.0;
    s.right[cls] -= 1.0;
    const double lo = s.pairs[i].first, hi = s.pairs[i + 1].first;
    if (!(lo < hi)) continue;
    const double nl = static_cast<double>(i + 1), nr = n - nl;
    const double decrease = parent_impurity -
                            (nl / n) * fast_impurity(s.left.data(), n_classes, nl, criterion) -
                            (nr / n) * fast_impurity(s.right.data(), n_classes, nr, criterion);
    if (decrease > kMinDecrease && (!found || decrease > best_decrease)) {
      double mid = lo + (hi - lo) / 2.0;
      if (!(mid < hi)) mid = lo;
      best_threshold = mid;
      best_decrease = decrease;
      found = true;
    }
  }
  return found;
}

std::vector<double> class_counts(std::span<const int> classes, std::span<const std::size_t> rows,
                                 std::size_t n_classes) {
  std::vector<double> counts(n_classes, 0.0);
  for (auto r : rows) counts[static_cast<std::size_t>(classes[r])] += 1.0;
  return counts;
}

std::optional<Split> best_split_impl(const Matrix& x, std::span<const int> classes,
                                     std::span<const std::size_t> rows,
                                     std::span<const std::size_t> sorted_features, std::size_t n_classes,
                                     Criterion criterion, std::span<const double> parent_counts,
                                     SplitScratch& scratch) {
  if (rows.size() < 2) return std::nullopt;
  const double parent_imp = fast_impurity(parent_counts.data(), n_classes,
                                          static_cast<double>(rows.size()), criterion);
  if (parent_imp <= kMinDecrease) return std::nullopt;
  std::optional<Split> best;
  for (auto f : sorted_features) {
    double thr = 0.0, dec = 0.0;
    if (!scan_feature(x, classes, rows, f, n_classes, criterion, parent_counts, parent_imp, scratch, thr,
                      dec)) {
      continue;
    }
    if (!best || dec > best->decrease) best = Split{f, thr, dec};
  }
  return best;
}

}  // namespace

std::optional<Split> best_split(const Matrix& x, std::span<const int> classes,
                                std::span<const std::size_t> rows,
                                std::span<const std::size_t> candidate_features, std::size_t n_classes,
                                Criterion criterion) {
  for (auto r : rows) {
    if (r >= x.rows() || classes[r] < 0 || static_cast<std::size_t>(classes[r]) >= n_classes) {
      throw Error(Errc::ShapeError, "best_split: row or class index out of range");
    }
  }
  std::vector<std::size_t> features(candidate_features.begin(), candidate_features.end());
  for (auto f : features) {
    if (f >= x.cols()) throw Error(Errc::ShapeError, "best_split: feature index out of range");
  }
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());
  const auto counts = class_counts(classes, rows, n_classes);
  SplitScratch scratch;
  return best_split_impl(x, classes, rows, features, n_classes, criterion, counts, scratch);
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes_[i];
}

std::size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  std::size_t best = 0;
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (!nodes_[i].is_leaf()) {
      stack.emplace_back(static_cast<std::size_t>(nodes_[i].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes_[i].right), d + 1);
    }
  }
  return best;
}

DecisionTree grow_tree(const Matrix& x, std::span<const int> classes, std::size_t n_classes,
                       std::vector<std::size_t> rows, const ForestConfig& config, std::uint64_t tree_seed) {
  std::mt19937_64 rng(tree_seed);
  const std::size_t d = x.cols();
  const std::size_t mtry = config.resolved_max_features(d);
  std::vector<std::size_t> perm(d);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  struct Pending {
    std::size_t node, begin, end, depth;
  };
  std::vector<TreeNode> nodes;
  nodes.emplace_back();
  std::vector<Pending> stack{{0, 0, rows.size(), 0}};
  std::vector<std::size_t> candidates;
  SplitScratch scratch;

  while (!stack.empty()) {
    const Pending p = stack.back();
    stack.pop_back();
    std::span<const std::size_t> node_rows(rows.data() + p.begin, p.end - p.begin);
    auto counts = class_counts(classes, node_rows, n_classes);
    const double n_node = static_cast<double>(node_rows.size());
    nodes[p.node].samples = n_node;
    nodes[p.node].impurity = fast_impurity(counts.data(), n_classes, n_node, config.criterion);

    std::optional<Split> split;
    const bool can_split = node_rows.size() >= config.min_samples_split &&
                           (!config.max_depth || p.depth < *config.max_depth) &&
                           nodes[p.node].impurity > kMinDecrease;
    if (can_split) {
      // Draw features without replacement until mtry non-constant ones are found.
      candidates.clear();
      for (std::size_t i = 0; i < d && candidates.size() < mtry; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, d - 1);
        std::swap(perm[i], perm[pick(rng)]);
        const std::size_t f = perm[i];
        const double first = x(node_rows.front(), f);
        bool constant = true;
        for (auto r : node_rows) {
          if (x(r, f) != first) {
            constant = false;
            break;
          }
        }
        if (!constant) candidates.push_back(f);
      }
      std::sort(candidates.begin(), candidates.end());
      split = best_split_impl(x, classes, node_rows, candidates, n_classes, config.criterion, counts, scratch);
    }

    if (!split) {
      nodes[p.node].counts = std::move(counts);
      continue;
    }
    auto mid = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(p.begin),
                              rows.begin() + static_cast<std::ptrdiff_t>(p.end),
                              [&](std::size_t r) { return x(r, split->feature) <= split->threshold; });
    const std::size_t cut = static_cast<std::size_t>(mid - rows.begin());
    const int left = static_cast<int>(nodes.size());
    nodes.emplace_back();
    const int right = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[p.node].feature = static_cast<int>(split->feature);
    nodes[p.node].threshold = split->threshold;
    nodes[p.node].left = left;
    nodes[p.node].right = right;
    stack.push_back({static_cast<std::size_t>(right), cut, p.end, p.depth + 1});
    stack.push_back({static_cast<std::size_t>(left), p.begin, cut, p.depth + 1});
  }
  return DecisionTree(std::move(nodes));
}

namespace {

void validate_config(const ForestConfig& c, std::size_t d) {
  if (c.n_estimators < 1) throw Error(Errc::ConfigError, "n_estimators must be >= 1");
  if (c.min_samples_split < 2) throw Error(Errc::ConfigError, "min_samples_split must be >= 2");
  if (c.max_features > d) throw Error(Errc::ConfigError, "max_features exceeds the feature count");
}

}  // namespace

RandomForest RandomForest::fit(const Matrix& x, std::span<const int> labels, const ForestConfig& config,
                               Execution exec, std::vector<std::string> feature_names) {
  if (labels.size() != x.rows()) throw Error(Errc::ShapeError, "labels and rows differ in length");
  if (x.cols() == 0) throw Error(Errc::InvalidMatrix, "matrix has no columns");
  if (x.rows() < 2 || x.rows() < config.min_samples_split) {
    throw Error(Errc::InsufficientData, "need at least min_samples_split rows to fit");
  }
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw Error(Errc::InvalidMatrix, "matrix contains non-finite values");
  }
  if (!feature_names.empty() && feature_names.size() != x.cols()) {
    throw Error(Errc::ShapeError, "feature names do not match the column count");
  }
  validate_config(config, x.cols());

  RandomForest model;
  model.config_ = config;
  model.n_features_ = x.cols();
  model.feature_names_ = std::move(feature_names);
  model.labels_.assign(labels.begin(), labels.end());
  std::sort(model.labels_.begin(), model.labels_.end());
  model.labels_.erase(std::unique(model.labels_.begin(), model.labels_.end()), model.labels_.end());
  std::vector<int> classes(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    classes[i] = static_cast<int>(std::lower_bound(model.labels_.begin(), model.labels_.end(), labels[i]) -
                                  model.labels_.begin());
  }
  const std::size_t k = model.labels_.size();

  model.seeds_.resize(config.n_estimators);
  for (std::size_t t = 0; t < config.n_estimators; ++t) model.seeds_[t] = derive_seed(config.seed, t);
  model.trees_.resize(config.n_estimators);

  const std::size_t n = x.rows();
  auto build = [&](std::size_t t) {
    std::vector<std::size_t> rows(n);
    if (config.bootstrap) {
      // Bootstrap draws use a stream separate from the split search.
      std::mt19937_64 boot(derive_seed(model.seeds_[t], 0x626f6f74));
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (auto& r : rows) r = pick(boot);
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    return grow_tree(x, classes, k, std::move(rows), config, model.seeds_[t]);
  };

  const auto m = static_cast<std::ptrdiff_t>(config.n_estimators);
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t t = 0; t < m; ++t) model.trees_[t] = build(static_cast<std::size_t>(t));
  } else {
    for (std::ptrdiff_t t = 0; t < m; ++t) model.trees_[t] = build(static_cast<std::size_t>(t));
  }
  return model;
}

std::vector<double> RandomForest::predict_proba(std::span<const double> x) const {
  if (x.size() != n_features_) {
    throw Error(Errc::ShapeError, "expected " + std::to_string(n_features_) + " features, got " +
                                      std::to_string(x.size()));
  }
  const std::size_t k = labels_.size();
  std::vector<double> proba(k, 0.0);
  for (const auto& tree : trees_) {
    const auto& leaf = tree.leaf_for(x);
    const double n = total(leaf.counts);
    for (std::size_t c = 0; c < k; ++c) proba[c] += leaf.counts[c] / n;
  }
  const double m = static_cast<double>(trees_.size());
  for (double& p : proba) p /= m;
  return proba;
}

std::size_t argmax_lowest(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

int RandomForest::predict(std::span<const double> x) const { return labels_[argmax_lowest(predict_proba(x))]; }

Matrix RandomForest::predict_proba(const Matrix& x, Execution exec) const {
  if (x.cols() != n_features_) throw Error(Errc::ShapeError, "feature count mismatch");
  Matrix out(x.rows(), labels_.size());
  const auto n = static_cast<std::ptrdiff_t>(x.rows());
  auto one = [&](std::ptrdiff_t i) {
    auto p = predict_proba(x.row(static_cast<std::size_t>(i)));
    std::copy(p.begin(), p.end(), out.row(static_cast<std::size_t>(i)).begin());
  };
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) one(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) one(i);
  }
  return out;
}

std::vector<int> RandomForest::predict(const Matrix& x, Execution exec) const {
  const Matrix proba = predict_proba(x, exec);
  std::vector<int> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = labels_[argmax_lowest(proba.row(i))];
  return out;
}

Importances RandomForest::feature_importances() const {
  Importances imp;
  imp.values.assign(n_features_, 0.0);
  std::size_t trees_with_splits = 0;
  for (const auto& tree : trees_) {
    const auto& nodes = tree.nodes();
    std::vector<double> local(n_features_, 0.0);
    double sum = 0.0;
    for (const auto& node : nodes) {
      if (node.is_leaf()) continue;
      const auto& l = nodes[static_cast<std::size_t>(node.left)];
      const auto& r = nodes[static_cast<std::size_t>(node.right)];
      const double dec = node.samples * node.impurity - l.samples * l.impurity - r.samples * r.impurity;
      local[static_cast<std::size_t>(node.feature)] += std::max(0.0, dec);
      sum += std::max(0.0, dec);
    }
    if (sum <= 0.0) continue;
    ++trees_with_splits;
    for (std::size_t f = 0; f < n_features_; ++f) imp.values[f] += local[f] / sum;
  }
  if (trees_with_splits == 0) {
    imp.zero = true;
    return imp;
  }
  const double s = std::accumulate(imp.values.begin(), imp.values.end(), 0.0);
  for (double& v : imp.values) v /= s;
  return imp;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr const char* kFormat = "fundscope-forest";
constexpr int kVersion = 1;

}  // namespace

std::string RandomForest::to_json() const {
  json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["n_features"] = n_features_;
  doc["labels"] = labels_;
  doc["feature_names"] = feature_names_;
  json cfg;
  cfg["n_estimators"] = config_.n_estimators;
  cfg["min_samples_split"] = config_.min_samples_split;
  cfg["max_features"] = config_.max_features;
  cfg["max_depth"] = config_.max_depth ? json(*config_.max_depth) : json(nullptr);
  cfg["bootstrap"] = config_.bootstrap;
  cfg["seed"] = config_.seed;
  cfg["criterion"] = config_.criterion == Criterion::Gini ? "gini" : "entropy";
  doc["config"] = cfg;
  doc["seeds"] = seeds_;
  json trees = json::array();
  for (const auto& t : trees_) {
    json nodes = json::array();
    for (const auto& n : t.nodes()) {
      nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.samples, n.impurity, n.counts}));
    }
    trees.push_back(nodes);
  }
  doc["trees"] = trees;
  return doc.dump();
}

RandomForest RandomForest::from_json(std::string_view text) {
  json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(Errc::SchemaError, "model is not a JSON object");
  try {
    if (doc.at("format") != kFormat) throw Error(Errc::SchemaError, "not a fundscope forest model");
    if (doc.at("version").get<int>() != kVersion) throw Error(Errc::SchemaError, "unsupported model version");
    RandomForest m;
    m.n_features_ = doc.at("n_features").get<std::size_t>();
    m.labels_ = doc.at("labels").get<std::vector<int>>();
    m.feature_names_ = doc.at("feature_names").get<std::vector<std::string>>();
    const auto& cfg = doc.at("config");
    m.config_.n_estimators = cfg.at("n_estimators").get<std::size_t>();
    m.config_.min_samples_split = cfg.at("min_samples_split").get<std::size_t>();
    m.config_.max_features = cfg.at("max_features").get<std::size_t>();
    if (!cfg.at("max_depth").is_null()) m.config_.max_depth = cfg.at("max_depth").get<std::size_t>();
    m.config_.bootstrap = cfg.at("bootstrap").get<bool>();
    m.config_.seed = cfg.at("seed").get<std::uint64_t>();
    m.config_.criterion = cfg.at("criterion") == "entropy" ? Criterion::Entropy : Criterion::Gini;
    m.seeds_ = doc.at("seeds").get<std::vector<std::uint64_t>>();
    for (const auto& t : doc.at("trees")) {
      std::vector<TreeNode> nodes;
      for (const auto& a : t) {
        TreeNode n;
        n.feature = a.at(0).get<int>();
        n.threshold = a.at(1).get<double>();
        n.left = a.at(2).get<int>();
        n.right = a.at(3).get<int>();
        n.samples = a.at(4).get<double>();
        n.impurity = a.at(5).get<double>();
        n.counts = a.at(6).get<std::vector<double>>();
        nodes.push_back(std::move(n));
      }
      // Structural checks so a corrupted file cannot index out of bounds.
      for (const auto& n : nodes) {
        if (n.is_leaf()) {
          if (n.counts.size() != m.labels_.size() || total(n.counts) <= 0.0) {
            throw Error(Errc::SchemaError, "leaf counts do not match the label set");
          }
        } else if (n.left <= 0 || n.right <= 0 || static_cast<std::size_t>(n.left) >= nodes.size() ||
                   static_cast<std::size_t>(n.right) >= nodes.size() ||
                   static_cast<std::size_t>(n.feature) >= m.n_features_) {
          throw Error(Errc::SchemaError, "tree node references are out of range");
        }
      }
      if (nodes.empty()) throw Error(Errc::SchemaError, "empty tree");
      m.trees_.emplace_back(std::move(nodes));
    }
    if (m.trees_.empty() || m.labels_.empty()) throw Error(Errc::SchemaError, "model has no trees or labels");
    return m;
  } catch (const json::exception& e) {
    throw Error(Errc::SchemaError, std::string("malformed model: ") + e.what());
  }
}

}  // namespace fundscope::forest
