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


#include "fundscope/screening.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "fundscope/error.hpp"

namespace fundscope::screening {

std::vector<std::size_t> candidate_columns(const FeatureTable& table, Modality modality) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < table.cols(); ++j) {
    const auto& c = table.column(j);
    if (c.modality == modality && !is_missingness_flag(c.name)) out.push_back(j);
  }
  return out;
}

namespace {

struct ColumnOutcome {
  std::optional<SignificantFeature> row;
  std::string note;
};

ColumnOutcome screen_column(const FeatureColumn& col, std::span<const double> ratios, double threshold) {
  ColumnOutcome out;
  std::vector<double> x, y;
  x.reserve(ratios.size());
  y.reserve(ratios.size());
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (std::isnan(col.values[i])) continue;
    x.push_back(col.values[i]);
    y.push_back(ratios[i]);
  }
  if (x.size() < kMinCellSize) {
    out.note = "feature " + col.name + " skipped: effective n=" + std::to_string(x.size());
    return out;
  }
  double r = 0.0;
  try {
    r = stats::pearson_r(x, y);
  } catch (const Error& e) {
    if (e.code() != Errc::DegenerateInput) throw;
    out.note = "feature " + col.name + " skipped: zero variance";
    return out;
  }
  const double p = stats::pearson_p(r, x.size());
  if (p < threshold) {
    SignificantFeature row;
    row.feature = col.name;
    row.modality = col.modality;
    row.mean = stats::mean(x);
    row.sd = stats::sample_sd(x);
    row.r = r;
    row.p = p;
    row.n = x.size();
    row.threshold = threshold;
    out.row = row;
  }
  return out;
}

}  // namespace

CellResult screen(const FeatureTable& cell, std::span<const double> ratios, GoalBand band,
                  const std::string& category, Modality modality, double alpha, Execution exec) {
  if (ratios.size() != cell.rows()) throw Error(Errc::ShapeError, "ratios and feature rows differ");
  CellResult result;
  const std::string where = std::string(band_name(band)) + "/" + category + "/" +
                            std::string(modality_name(modality));
  const auto candidates = candidate_columns(cell, modality);
  result.family_size = candidates.size();
  if (candidates.empty()) {
    result.skipped = true;
    result.notes.push_back(where + ": no candidate features");
    return result;
  }
  result.threshold = stats::bonferroni_threshold(alpha, candidates.size());
  if (cell.rows() < kMinCellSize) {
    result.skipped = true;
    result.notes.push_back(where + ": skipped, n=" + std::to_string(cell.rows()) + " < " +
                           std::to_string(kMinCellSize));
    return result;
  }

  std::vector<ColumnOutcome> outcomes(candidates.size());
  const auto n = static_cast<std::ptrdiff_t>(candidates.size());
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      outcomes[k] = screen_column(cell.column(candidates[k]), ratios, result.threshold);
    }
  } else {
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      outcomes[k] = screen_column(cell.column(candidates[k]), ratios, result.threshold);
    }
  }

  for (auto& o : outcomes) {
    if (!o.note.empty()) result.notes.push_back(where + ": " + o.note);
    if (o.row) {
      o.row->band = band;
      o.row->category = category;
      result.rows.push_back(std::move(*o.row));
    }
  }
  std::sort(result.rows.begin(), result.rows.end(), [](const auto& a, const auto& b) {
    if (a.p != b.p) return a.p < b.p;
    return a.feature < b.feature;
  });
  std::sort(result.notes.begin(), result.notes.end());
  return result;
}

ScreeningReport screen_all(const FeatureTable& table, std::span<const double> ratios,
                           std::span<const GoalBand> bands, std::span<const std::string> categories,
                           const std::vector<Modality>& modalities, double alpha, Execution exec) {
  if (bands.size() != table.rows() || categories.size() != table.rows() || ratios.size() != table.rows()) {
    throw Error(Errc::ShapeError, "screen_all: per-row inputs differ in length");
  }
  std::map<std::pair<int, std::string>, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < table.rows(); ++i) {
    cells[{static_cast<int>(bands[i]), categories[i]}].push_back(i);
  }
  ScreeningReport report;
  for (const auto& [key, rows] : cells) {
    const auto band = static_cast<GoalBand>(key.first);
    const FeatureTable cell = table.select_rows(rows);
    std::vector<double> y;
    y.reserve(rows.size());
    for (auto r : rows) y.push_back(ratios[r]);
    for (Modality m : modalities) {
      CellResult res = screen(cell, y, band, key.second, m, alpha, exec);
      if (res.family_size > 0) report.thresholds.push_back({{band, key.second, m}, res.threshold});
      report.rows.insert(report.rows.end(), res.rows.begin(), res.rows.end());
      report.notes.insert(report.notes.end(), res.notes.begin(), res.notes.end());
    }
  }
  std::stable_sort(report.rows.begin(), report.rows.end(), [](const auto& a, const auto& b) {
    if (a.band != b.band) return a.band < b.band;
    if (a.category != b.category) return a.category < b.category;
    if (a.p != b.p) return a.p < b.p;
    return a.feature < b.feature;
  });
  return report;
}

std::string report_to_csv(const ScreeningReport& report, const std::vector<std::string>& header_lines) {
  std::string out;
  for (const auto& h : header_lines) out += "# " + h + "\n";
  out += "goal_band,category,feature,mean,sd,r,p,n,threshold\n";
  for (const auto& row : report.rows) {
    out += csv::join({std::string(band_label(row.band)), row.category, row.feature,
                      format_fixed(row.mean, 4), format_fixed(row.sd, 4), format_fixed(row.r, 4),
                      format_double(row.p), std::to_string(row.n), format_sig2(row.threshold)}) +
           "\n";
  }
  return out;
}

stats::TTestResult compare_by_population(std::span<const double> values,
                                         std::span<const double> populations, double threshold) {
  if (values.size() != populations.size()) throw Error(Errc::ShapeError, "values and populations differ");
  std::vector<double> small, large;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isnan(populations[i]) || std::isnan(values[i])) continue;
    (populations[i] <= threshold ? small : large).push_back(values[i]);
  }
  return stats::two_sample_t(small, large);
}

}  // namespace fundscope::screening
