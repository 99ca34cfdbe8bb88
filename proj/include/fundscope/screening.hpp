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

#include <span>
#include <string>
#include <vector>

#include "fundscope/core.hpp"
#include "fundscope/features.hpp"
#include "fundscope/stats.hpp"
#include "fundscope/util.hpp"

namespace fundscope::screening {

inline constexpr std::size_t kMinCellSize = 10;
inline constexpr double kDefaultAlpha = 0.05;

// One row of a significant-feature report.
struct SignificantFeature {
  GoalBand band = GoalBand::B1;
  std::string category;
  std::string feature;
  Modality modality = Modality::Basic;
  double mean = 0.0;
  double sd = 0.0;
  double r = 0.0;
  double p = 1.0;
  std::size_t n = 0;  // effective n after pairwise exclusion of missing values
  double threshold = 0.0;
};

struct CellResult {
  std::vector<SignificantFeature> rows;  // sorted by p, then feature name
  std::vector<std::string> notes;
  std::size_t family_size = 0;
  double threshold = 0.0;
  bool skipped = false;
};

// Screening candidates of one modality: every column except missingness flags.
std::vector<std::size_t> candidate_columns(const FeatureTable& table, Modality modality);

// Pearson screen of one (band, category, modality) cell against the success
// ratio. Retains features with p < alpha / m, m = number of candidates.
CellResult screen(const FeatureTable& cell, std::span<const double> ratios, GoalBand band,
                  const std::string& category, Modality modality, double alpha,
                  Execution exec = Execution::Parallel);

struct CellKey {
  GoalBand band;
  std::string category;
  Modality modality;
};

struct ScreeningReport {
  std::vector<SignificantFeature> rows;  // ordered by (band, category, p, name)
  std::vector<std::string> notes;
  std::vector<std::pair<CellKey, double>> thresholds;
};

// Screens every (band, category) cell present in the rows for each modality.
ScreeningReport screen_all(const FeatureTable& table, std::span<const double> ratios,
                           std::span<const GoalBand> bands, std::span<const std::string> categories,
                           const std::vector<Modality>& modalities, double alpha,
                           Execution exec = Execution::Parallel);

// CSV columns goal_band,category,feature,mean,sd,r,p,n,threshold.
std::string report_to_csv(const ScreeningReport& report, const std::vector<std::string>& header_lines);

// Small-vs-large city comparison: group a holds values of campaigns whose
// city population is <= the threshold, group b the rest; missing populations
// are excluded.
stats::TTestResult compare_by_population(std::span<const double> values,
                                         std::span<const double> populations, double threshold);

}  // namespace fundscope::screening
