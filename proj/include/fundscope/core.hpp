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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fundscope {

// Goal-amount bands, open on the left and closed on the right, in USD.
enum class GoalBand : int { B1 = 1, B2 = 2, B3 = 3, B4 = 4 };

inline constexpr std::array<GoalBand, 4> kAllBands{GoalBand::B1, GoalBand::B2, GoalBand::B3,
                                                   GoalBand::B4};

struct BandInterval {
  double lower;  // exclusive
  double upper;  // inclusive
};

BandInterval band_interval(GoalBand band) noexcept;
std::string_view band_name(GoalBand band) noexcept;   // "B1"
std::string_view band_label(GoalBand band) noexcept;  // "(0,8000]"
std::optional<GoalBand> parse_band(std::string_view text) noexcept;

enum class SuccessClass : int {
  HighlyUnsuccessful = -2,
  Unsuccessful = -1,
  Successful = 1,
  HighlySuccessful = 2,
};

std::string_view class_name(SuccessClass cls) noexcept;

enum class TargetScheme { TwoClass, FourClass };

std::string_view scheme_name(TargetScheme scheme) noexcept;
std::optional<TargetScheme> parse_scheme(std::string_view text) noexcept;

struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  // 0 = Monday .. 6 = Sunday.
  int day_of_week() const noexcept;
  std::string iso() const;
  auto operator<=>(const Date&) const = default;
};

// Parses a strict YYYY-MM-DD calendar date; throws Errc::ParseError.
Date parse_iso_date(std::string_view text);

// The nineteen campaign categories. Labels are kept verbatim and the line
// number in the registry file is the stable index.
class CategoryRegistry {
 public:
  static CategoryRegistry builtin();
  static CategoryRegistry load(const std::filesystem::path& path);
  explicit CategoryRegistry(std::vector<std::string> labels);

  std::optional<int> index_of(std::string_view label) const noexcept;
  const std::string& label(int index) const;
  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  static constexpr std::size_t kExpectedSize = 19;

 private:
  std::vector<std::string> labels_;
};

struct CategoryId {
  int index = 0;
  std::string label;
  bool operator==(const CategoryId&) const = default;
};

struct Campaign {
  std::string id;
  Date launch_date;
  std::string city;
  std::string state;
  std::string country;
  std::string title;
  std::string description;
  CategoryId category;
  double goal_amount = 0.0;
  double raised_amount = 0.0;
  std::int64_t num_followers = 0;
  std::int64_t num_shares = 0;
  std::int64_t num_donors = 0;
  std::optional<std::string> cover_image;
};

// Throws Error on the first violated invariant.
void validate(const Campaign& campaign, const CategoryRegistry& registry);

double compute_ratio(double raised_amount, double goal_amount);

// std::nullopt means the goal lies above every band and is excluded.
std::optional<GoalBand> assign_goal_band(double goal_amount);

// std::nullopt means the campaign is dropped (ratio above 2.5).
std::optional<SuccessClass> assign_success_class(double ratio);
std::optional<SuccessClass> assign_binary_class(double ratio);
std::optional<SuccessClass> assign_class(double ratio, TargetScheme scheme);

inline constexpr double kMaxRatio = 2.5;

enum class Modality { Basic, Population, Text, ImageQuality, Face };

inline constexpr std::array<Modality, 5> kAllModalities{
    Modality::Basic, Modality::Population, Modality::Text, Modality::ImageQuality, Modality::Face};

std::string_view modality_name(Modality m) noexcept;
std::optional<Modality> parse_modality(std::string_view text) noexcept;

struct Feature {
  std::string name;
  double value = 0.0;
  Modality modality = Modality::Basic;
};

// Names are unique and values finite; absent measurements are simply not
// added rather than stored as NaN.
class FeatureVector {
 public:
  void add(std::string name, double value, Modality modality);
  void append(const FeatureVector& other);

  std::optional<double> get(std::string_view name) const noexcept;
  bool contains(std::string_view name) const noexcept { return get(name).has_value(); }
  const std::vector<Feature>& features() const noexcept { return features_; }
  std::size_t size() const noexcept { return features_.size(); }
  bool empty() const noexcept { return features_.empty(); }

 private:
  std::vector<Feature> features_;
};

// Indicator features that flag an absent measurement end with this suffix
// and are never screening candidates.
inline constexpr std::string_view kMissingSuffix = "_missing";
bool is_missingness_flag(std::string_view feature_name) noexcept;

}  // namespace fundscope
