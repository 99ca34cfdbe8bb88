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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fundscope/core.hpp"

namespace fundscope {

// Column of a feature table; NaN marks a missing value.
struct FeatureColumn {
  std::string name;
  Modality modality = Modality::Basic;
  std::vector<double> values;
};

// Campaign-by-feature table with named, modality-tagged columns. Rows are
// keyed by campaign id.
class FeatureTable {
 public:
  FeatureTable() = default;
  explicit FeatureTable(std::vector<std::string> ids) : ids_(std::move(ids)) {}

  // Columns appear in order of first occurrence while scanning rows.
  static FeatureTable from_vectors(std::vector<std::string> ids, const std::vector<FeatureVector>& rows);

  std::size_t rows() const noexcept { return ids_.size(); }
  std::size_t cols() const noexcept { return columns_.size(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::vector<FeatureColumn>& columns() const noexcept { return columns_; }
  const FeatureColumn& column(std::size_t j) const { return columns_.at(j); }
  std::optional<std::size_t> find(std::string_view name) const noexcept;

  void add_column(FeatureColumn column);
  // Appends the other table's columns; ids must match row for row (ShapeError).
  void merge(const FeatureTable& other);

  FeatureTable select_rows(const std::vector<std::size_t>& rows) const;
  FeatureTable select_modalities(const std::vector<Modality>& modalities) const;
  FeatureTable select_columns(const std::vector<std::string>& names) const;

  // Row as a FeatureVector (missing values omitted).
  FeatureVector row_vector(std::size_t row) const;

 private:
  std::vector<std::string> ids_;
  std::vector<FeatureColumn> columns_;
};

// CSV with an `id` column followed by one column per feature; empty cells
// are missing. A "# modality:" comment line carries the modality of each
// column so the file reloads losslessly.
std::string feature_table_to_csv(const FeatureTable& table, const std::vector<std::string>& header_lines);
FeatureTable feature_table_from_csv(std::string_view content);

}  // namespace fundscope
