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


#include "fundscope/core.hpp"

#include <cmath>
#include <fstream>
#include <unordered_set>

#include "fundscope/error.hpp"

namespace fundscope {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidGoal: return "InvalidGoal";
    case Errc::InvalidAmount: return "InvalidAmount";
    case Errc::InvalidRatio: return "InvalidRatio";
    case Errc::IoError: return "IoError";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::SchemaError: return "SchemaError";
    case Errc::ParseError: return "ParseError";
    case Errc::SurrogateUnavailable: return "SurrogateUnavailable";
    case Errc::ProviderError: return "ProviderError";
    case Errc::InvalidImage: return "InvalidImage";
    case Errc::RangeError: return "RangeError";
    case Errc::ShapeError: return "ShapeError";
    case Errc::DegenerateInput: return "DegenerateInput";
    case Errc::InvalidDf: return "InvalidDf";
    case Errc::DomainError: return "DomainError";
    case Errc::NonConvergence: return "NonConvergence";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::InvalidCount: return "InvalidCount";
    case Errc::DegenerateNode: return "DegenerateNode";
    case Errc::InvalidMatrix: return "InvalidMatrix";
    case Errc::LabelError: return "LabelError";
    case Errc::EmptySetting: return "EmptySetting";
    case Errc::SpecError: return "SpecError";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

BandInterval band_interval(GoalBand band) noexcept {
  switch (band) {
    case GoalBand::B1: return {0.0, 8000.0};
    case GoalBand::B2: return {8000.0, 40000.0};
    case GoalBand::B3: return {40000.0, 68000.0};
    case GoalBand::B4: return {68000.0, 100000.0};
  }
  return {0.0, 0.0};
}

std::string_view band_name(GoalBand band) noexcept {
  switch (band) {
    case GoalBand::B1: return "B1";
    case GoalBand::B2: return "B2";
    case GoalBand::B3: return "B3";
    case GoalBand::B4: return "B4";
  }
  return "?";
}

std::string_view band_label(GoalBand band) noexcept {
  switch (band) {
    case GoalBand::B1: return "(0,8000]";
    case GoalBand::B2: return "(8000,40000]";
    case GoalBand::B3: return "(40000,68000]";
    case GoalBand::B4: return "(68000,100000]";
  }
  return "?";
}

std::optional<GoalBand> parse_band(std::string_view text) noexcept {
  for (GoalBand b : kAllBands) {
    if (text == band_name(b) || text == band_label(b)) return b;
  }
  return std::nullopt;
}

std::string_view class_name(SuccessClass cls) noexcept {
  switch (cls) {
    case SuccessClass::HighlyUnsuccessful: return "highly_unsuccessful";
    case SuccessClass::Unsuccessful: return "unsuccessful";
    case SuccessClass::Successful: return "successful";
    case SuccessClass::HighlySuccessful: return "highly_successful";
  }
  return "?";
}

std::string_view scheme_name(TargetScheme scheme) noexcept {
  return scheme == TargetScheme::TwoClass ? "two-class" : "four-class";
}

std::optional<TargetScheme> parse_scheme(std::string_view text) noexcept {
  if (text == "two-class") return TargetScheme::TwoClass;
  if (text == "four-class") return TargetScheme::FourClass;
  return std::nullopt;
}

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

}  // namespace

int Date::day_of_week() const noexcept {
  // Days since 1970-01-01 (a Thursday), civil-from-days inverse.
  int y = year - (month <= 2 ? 1 : 0);
  const int era = (y >= 0 ? y : y - 399) / 400;
  const int yoe = y - era * 400;
  const int mp = (month + 9) % 12;
  const int doy = (153 * mp + 2) / 5 + day - 1;
  const int doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  const long days = static_cast<long>(era) * 146097 + doe - 719468;
  long dow = (days + 3) % 7;  // 1970-01-01 -> 3 (Thursday, Monday = 0)
  if (dow < 0) dow += 7;
  return static_cast<int>(dow);
}

std::string Date::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

Date parse_iso_date(std::string_view text) {
  auto bad = [&] { return Error(Errc::ParseError, "invalid ISO-8601 date '" + std::string(text) + "'"); };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw bad();
  auto digits = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (text[i] < '0' || text[i] > '9') throw bad();
      v = v * 10 + (text[i] - '0');
    }
    return v;
  };
  Date d{digits(0, 4), digits(5, 2), digits(8, 2)};
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month)) throw bad();
  return d;
}

CategoryRegistry::CategoryRegistry(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.size() != kExpectedSize) {
    throw Error(Errc::SchemaError, "category registry must hold " + std::to_string(kExpectedSize) +
                                       " labels, got " + std::to_string(labels_.size()));
  }
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_) {
    if (l.empty() || !seen.insert(l).second) {
      throw Error(Errc::SchemaError, "empty or duplicate category label '" + l + "'");
    }
  }
}

CategoryRegistry CategoryRegistry::builtin() {
  return CategoryRegistry({
      "Accidents & Emergencies",
      "Animals & Pets",
      "Babies, Kids & Family",
      "Business & Entrepreneurs",
      "Celebrations & Events",
      "Community & Neighbors",
      "Competitions & Pageants",
      "Creative Arts, Music & Film",
      "Dreams, Hopes & Wishes",
      "Education & Learning",
      "Funerals & Memorials",
      "Medical, Illness & Healing",
      "Missions, Faith & Church",
      "Non-Profits & Charities",
      "Other",
      "Sports, Teams & Clubs",
      "Travel & Adventure",
      "Volunteer & Service",
      "Weddings & Honeymoons",
  });
}

CategoryRegistry CategoryRegistry::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot read category registry " + path.string());
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    labels.push_back(line);
  }
  return CategoryRegistry(std::move(labels));
}

std::optional<int> CategoryRegistry::index_of(std::string_view label) const noexcept {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return static_cast<int>(i);
  }
  return std::nullopt;
}

const std::string& CategoryRegistry::label(int index) const {
  if (index < 0 || static_cast<std::size_t>(index) >= labels_.size()) {
    throw Error(Errc::SchemaError, "category index out of range: " + std::to_string(index));
  }
  return labels_[static_cast<std::size_t>(index)];
}

void validate(const Campaign& c, const CategoryRegistry& registry) {
  if (c.id.empty()) throw Error(Errc::SchemaError, "campaign id is empty");
  if (!std::isfinite(c.goal_amount) || c.goal_amount <= 0.0) {
    throw Error(Errc::InvalidGoal, "goal_amount must be finite and > 0");
  }
  if (!std::isfinite(c.raised_amount) || c.raised_amount < 0.0) {
    throw Error(Errc::InvalidAmount, "raised_amount must be finite and >= 0");
  }
  if (c.num_followers < 0 || c.num_shares < 0 || c.num_donors < 0) {
    throw Error(Errc::InvalidAmount, "counts must be non-negative");
  }
  auto idx = registry.index_of(c.category.label);
  if (!idx || *idx != c.category.index) {
    throw Error(Errc::SchemaError, "unknown category '" + c.category.label + "'");
  }
}

double compute_ratio(double raised_amount, double goal_amount) {
  if (!std::isfinite(goal_amount) || goal_amount <= 0.0) {
    throw Error(Errc::InvalidGoal, "goal_amount must be > 0");
  }
  if (!std::isfinite(raised_amount) || raised_amount < 0.0) {
    throw Error(Errc::InvalidAmount, "raised_amount must be >= 0");
  }
  return raised_amount / goal_amount;
}

std::optional<GoalBand> assign_goal_band(double goal_amount) {
  if (!std::isfinite(goal_amount) || goal_amount <= 0.0) {
    throw Error(Errc::InvalidGoal, "goal_amount must be > 0");
  }
  for (GoalBand b : kAllBands) {
    if (goal_amount <= band_interval(b).upper) return b;
  }
  return std::nullopt;
}

namespace {

void check_ratio(double ratio) {
  if (std::isnan(ratio) || ratio < 0.0) throw Error(Errc::InvalidRatio, "ratio must be >= 0");
}

}  // namespace

std::optional<SuccessClass> assign_success_class(double ratio) {
  check_ratio(ratio);
  if (ratio > kMaxRatio) return std::nullopt;
  if (ratio <= 0.5) return SuccessClass::HighlyUnsuccessful;  // zero included
  if (ratio <= 1.0) return SuccessClass::Unsuccessful;
  if (ratio <= 1.25) return SuccessClass::Successful;
  return SuccessClass::HighlySuccessful;
}

std::optional<SuccessClass> assign_binary_class(double ratio) {
  check_ratio(ratio);
  if (ratio > kMaxRatio) return std::nullopt;
  return ratio <= 1.25 ? SuccessClass::HighlyUnsuccessful : SuccessClass::HighlySuccessful;
}

std::optional<SuccessClass> assign_class(double ratio, TargetScheme scheme) {
  return scheme == TargetScheme::TwoClass ? assign_binary_class(ratio) : assign_success_class(ratio);
}

std::string_view modality_name(Modality m) noexcept {
  switch (m) {
    case Modality::Basic: return "basic";
    case Modality::Population: return "population";
    case Modality::Text: return "text";
    case Modality::ImageQuality: return "image_quality";
    case Modality::Face: return "face";
  }
  return "?";
}

std::optional<Modality> parse_modality(std::string_view text) noexcept {
  for (Modality m : kAllModalities) {
    if (modality_name(m) == text) return m;
  }
  return std::nullopt;
}

void FeatureVector::add(std::string name, double value, Modality modality) {
  if (!std::isfinite(value)) {
    throw Error(Errc::RangeError, "feature '" + name + "' is not finite");
  }
  if (contains(name)) throw Error(Errc::SchemaError, "duplicate feature '" + name + "'");
  features_.push_back({std::move(name), value, modality});
}

void FeatureVector::append(const FeatureVector& other) {
  for (const auto& f : other.features_) add(f.name, f.value, f.modality);
}

std::optional<double> FeatureVector::get(std::string_view name) const noexcept {
  for (const auto& f : features_) {
    if (f.name == name) return f.value;
  }
  return std::nullopt;
}

bool is_missingness_flag(std::string_view name) noexcept {
  return name.size() >= kMissingSuffix.size() &&
         name.substr(name.size() - kMissingSuffix.size()) == kMissingSuffix;
}

}  // namespace fundscope
