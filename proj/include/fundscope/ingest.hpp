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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fundscope/core.hpp"
#include "fundscope/error.hpp"
#include "fundscope/util.hpp"

namespace fundscope {

enum class RejectReason {
  Malformed,      // not a JSON object / missing or mistyped key
  InvalidGoal,
  InvalidAmount,
  InvalidDate,
  UnknownCategory,
  NonUS,
  GoalOutOfRange,
  RatioAboveMax,
};

std::string_view reason_name(RejectReason reason) noexcept;

struct Rejection {
  std::size_t line = 0;
  RejectReason reason = RejectReason::Malformed;
  std::string detail;
};

// accepted + rejected.size() == total_records. Exclusions by the analysis
// rules (non-US, goal above every band, ratio above 2.5) are rejections with
// their own reason and are also tallied separately.
struct IngestReport {
  std::size_t total_records = 0;
  std::size_t accepted = 0;
  std::vector<Rejection> rejected;
  std::size_t dropped_ratio_gt_2_5 = 0;
  std::size_t out_of_band = 0;
  std::size_t non_us = 0;

  std::size_t count(RejectReason reason) const noexcept;
};

struct IngestResult {
  std::vector<Campaign> campaigns;
  IngestReport report;
};

// Parses one JSONL record. Returns the validated campaign or the rejection.
// Analysis exclusions (country, band, ratio) are applied here as well.
struct ParsedLine {
  std::optional<Campaign> campaign;
  std::optional<Rejection> rejection;
};
ParsedLine parse_campaign_line(std::string_view line, std::size_t line_no,
                               const CategoryRegistry& registry);

// Empty lines are not records. Throws IoError / EmptyDataset.
IngestResult load_campaigns(const std::filesystem::path& path, const CategoryRegistry& registry,
                            Execution exec = Execution::Parallel);
IngestResult parse_campaigns(std::string_view content, const CategoryRegistry& registry,
                             Execution exec = Execution::Parallel);

std::string campaign_to_json(const Campaign& c);

// Lower-cased, trimmed, internal whitespace collapsed "city|state".
std::string normalize_location_key(std::string_view city, std::string_view state);

class PopulationTable {
 public:
  PopulationTable() = default;
  PopulationTable(std::map<std::string, std::int64_t> entries, std::string year_tag);

  std::optional<std::int64_t> lookup(std::string_view city, std::string_view state) const;
  std::size_t size() const noexcept { return entries_.size(); }
  const std::string& year_tag() const noexcept { return year_tag_; }
  const std::map<std::string, std::int64_t>& entries() const noexcept { return entries_; }
  // Median over table rows; splits small and large cities for the t-test.
  double median_population() const;

 private:
  std::map<std::string, std::int64_t> entries_;
  std::string year_tag_;
};

// CSV with header city,state,population. Duplicate keys keep the larger value.
PopulationTable load_population_table(const std::filesystem::path& path,
                                      std::string year_tag = "2018");

inline constexpr std::string_view kPopulationFeature = "city_population";
inline constexpr std::string_view kPopulationMissing = "population_missing";

std::vector<FeatureVector> join_population(const std::vector<Campaign>& campaigns,
                                           const PopulationTable& table);

}  // namespace fundscope
