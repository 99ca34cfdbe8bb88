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
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "fundscope/core.hpp"
#include "fundscope/dataset.hpp"
#include "fundscope/features.hpp"
#include "fundscope/forest.hpp"
#include "fundscope/metrics.hpp"
#include "fundscope/screening.hpp"

namespace fundscope::experiment {

enum class Setting { Basic, LIWC, Population, Face, ImageQuality, EarlyFusionAll, LateFusion };

inline constexpr std::array<Setting, 7> kAllSettings{
    Setting::Basic, Setting::LIWC,           Setting::Population, Setting::Face,
    Setting::ImageQuality, Setting::EarlyFusionAll, Setting::LateFusion};

std::string_view setting_name(Setting s) noexcept;
std::optional<Setting> parse_setting(std::string_view text) noexcept;
// Modalities feeding a setting; LateFusion lists the modalities of its members.
std::vector<Modality> setting_modalities(Setting s);
// Single-modality settings combined by late fusion, in this order.
inline constexpr std::array<Setting, 5> kLateFusionMembers{
    Setting::Basic, Setting::LIWC, Setting::Population, Setting::Face, Setting::ImageQuality};

// Launch year, month and weekday plus one-hot state and category columns.
// States are the sorted set present in `campaigns`; categories the full registry.
std::vector<FeatureVector> basic_features(const std::vector<Campaign>& campaigns,
                                          const CategoryRegistry& registry);

enum class AssemblyMode { Screened, AllFeatures };
std::string_view mode_name(AssemblyMode m) noexcept;
std::optional<AssemblyMode> parse_mode(std::string_view text) noexcept;

// How one matrix column is produced from a feature table.
struct ColumnPlan {
  std::string name;
  std::string source;
  bool indicator = false;  // 1 when the source is missing, else 0
  double fill = 0.0;       // training median used when the source is missing
};

struct AssemblyPlan {
  std::vector<ColumnPlan> columns;
  std::vector<std::string> names() const;
};

// Median imputation from `train`, plus a missingness indicator for every
// column with missing training values unless an identical column already
// exists (such as the provider's own *_missing flag).
AssemblyPlan plan_columns(const FeatureTable& train, const std::vector<std::string>& selected);
forest::Matrix apply_plan(const AssemblyPlan& plan, const FeatureTable& table);
// Same for a single feature vector; absent features count as missing.
std::vector<double> apply_plan(const AssemblyPlan& plan, const FeatureVector& row);

// Feature names a setting draws from the table. In screened mode, features of
// non-basic modalities survive only when listed in `significant`; a
// modality's *_missing flag is kept when any of its features survives.
std::vector<std::string> setting_columns(Setting setting, const FeatureTable& table, AssemblyMode mode,
                                         const std::set<std::string>& significant);

struct NamedMatrix {
  std::vector<std::string> ids;
  std::vector<std::string> names;
  forest::Matrix x;
};

struct Assembled {
  NamedMatrix matrix;
  std::vector<int> labels;
  AssemblyPlan plan;
};

// Errc::EmptySetting when no column survives filtering.
Assembled assemble(Setting setting, const FeatureTable& table, std::span<const int> labels,
                   AssemblyMode mode, const std::set<std::string>& significant);

// Column-wise concatenation in the given order; ids must match row by row.
NamedMatrix early_fuse(const std::vector<NamedMatrix>& parts);

enum class Combiner { Average, MajorityVote };
std::string_view combiner_name(Combiner c) noexcept;
std::optional<Combiner> parse_combiner(std::string_view text) noexcept;

// Equal-weight mean of member probabilities (or majority vote), then argmax
// with ties to the lower label. Errc::LabelError when label sets differ.
std::vector<double> late_fuse_proba(const std::vector<const forest::RandomForest*>& models,
                                    const std::vector<std::span<const double>>& inputs);
int late_fuse(const std::vector<const forest::RandomForest*>& models,
              const std::vector<std::span<const double>>& inputs, Combiner combiner = Combiner::Average);

struct ExperimentConfig {
  forest::ForestConfig forest;
  TargetScheme scheme = TargetScheme::TwoClass;
  AssemblyMode mode = AssemblyMode::Screened;
  Combiner combiner = Combiner::Average;
  double alpha = screening::kDefaultAlpha;
  std::vector<Setting> settings{kAllSettings.begin(), kAllSettings.end()};
  std::vector<GoalBand> basic_only_bands{GoalBand::B3, GoalBand::B4};
  std::size_t cv_folds = 10;
  double test_fraction = 0.1;
  std::size_t min_band_size = 30;
  std::uint64_t seed = 0;
  Execution exec = Execution::Parallel;

  std::string describe() const;
};

struct ReportRow {
  std::string band;  // "B1".."B4" or "Total"
  Setting setting = Setting::Basic;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  metrics::Metrics held_out;
  std::optional<metrics::Metrics> cv;  // pooled out-of-fold predictions on the training split
  std::vector<std::string> features;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;    // per band, in band then setting order
  std::vector<ReportRow> totals;  // weighted by band test size
  std::vector<std::string> notes;
  std::vector<std::pair<std::string, std::string>> meta;
};

struct ExperimentInput {
  std::vector<LabeledCampaign> data;
  FeatureTable features;  // rows aligned with data by campaign id
};

// Per band: stratified 90/10 hold-out, k-fold CV on the 90 %, held-out
// metrics per setting, then weighted totals for Basic, EarlyFusionAll and
// LateFusion. Bands without a setting's columns fall back to their Basic row
// in the totals. The input order does not matter: rows are sorted by id first.
ExperimentReport run_experiment(const ExperimentInput& input, const ExperimentConfig& config);

std::string report_to_csv(const ExperimentReport& report);
std::string report_to_json(const ExperimentReport& report);

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  std::size_t count = 0;
};

// Equal-width bins over [lo, hi]; the last bin is closed. Values outside are ignored.
std::vector<HistogramBin> histogram(std::span<const double> values, double lo, double hi, std::size_t bins);
std::string histogram_to_csv(const std::vector<HistogramBin>& bins, const std::vector<std::string>& header_lines);

// Significant features per band, unioned over categories, screened on the
// given rows only.
std::map<GoalBand, std::set<std::string>> significant_by_band(const ExperimentInput& input,
                                                             std::span<const std::size_t> rows, double alpha,
                                                             Execution exec);

}  // namespace fundscope::experiment
