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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fundscope/core.hpp"
#include "fundscope/util.hpp"

namespace fundscope::text {

// Lower-cased word tokens. Anything that is not a letter, a digit or an
// apostrophe between two word characters separates tokens.
std::vector<std::string> tokenize(std::string_view utf8);

struct LexiconCategory {
  int id = 0;  // the number used by entry lines in the file
  std::string name;
};

struct LexiconEntry {
  std::string pattern;  // lower-case, without the trailing '*'
  bool wildcard = false;
  std::vector<int> categories;  // positions into Lexicon::categories()
};

// LIWC .dic-compatible dictionary: a '%'-delimited header of `id<TAB>name`
// lines followed by `word[*]<TAB>id[,id...]` entries.
class Lexicon {
 public:
  Lexicon(std::vector<LexiconCategory> categories, std::vector<LexiconEntry> entries);

  const std::vector<LexiconCategory>& categories() const noexcept { return categories_; }
  const std::vector<LexiconEntry>& entries() const noexcept { return entries_; }
  std::optional<std::size_t> category_position(std::string_view name) const noexcept;

  // Category positions a single lower-case token belongs to, sorted, each at most once.
  std::vector<int> match(std::string_view token) const;

  // Content hash recorded in run reports.
  std::string fingerprint() const;

 private:
  std::vector<LexiconCategory> categories_;
  std::vector<LexiconEntry> entries_;
  std::unordered_map<std::string, std::vector<int>> exact_;
  std::unordered_map<std::string, std::vector<int>> prefix_;
  std::size_t max_prefix_ = 0;
};

Lexicon parse_lexicon(std::string_view content);
Lexicon load_lexicon(const std::filesystem::path& path);

struct TextFeatures {
  std::size_t word_count = 0;
  std::vector<std::string> names;  // category names, lexicon order
  std::vector<double> percentages;  // 100 * hits / word_count
};

TextFeatures extract(std::string_view utf8, const Lexicon& lexicon);

inline constexpr double kCloutScale = 2.0;

// Logistic map of (we% + you% - i%) used as a stand-in for the licensed Clout
// summary variable. Throws Errc::SurrogateUnavailable when the lexicon lacks
// any of the we/you/i categories.
double clout_surrogate(const TextFeatures& features);

inline constexpr std::string_view kFeaturePrefix = "liwc_";
inline constexpr std::string_view kWordCountFeature = "liwc_WC";
inline constexpr std::string_view kCloutFeature = "liwc_clout_surrogate";

// Title and description are joined with a single space before extraction.
std::string campaign_text(const Campaign& campaign);

// Feature vector (modality text) with one column per category, the word
// count and, when computable, the clout surrogate.
FeatureVector to_feature_vector(const TextFeatures& features);

std::vector<FeatureVector> featurize(const std::vector<Campaign>& campaigns, const Lexicon& lexicon,
                                     Execution exec = Execution::Parallel);

}  // namespace fundscope::text
