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


#include "fundscope/text.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "fundscope/error.hpp"

namespace fundscope::text {

namespace {

// Decodes one code point; invalid sequences decode as U+FFFD and consume a byte.
char32_t next_code_point(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) -> int {
    if (i + k >= s.size()) return -1;
    const auto b = static_cast<unsigned char>(s[i + k]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = (b0 & 0xE0) == 0xC0 ? 2 : (b0 & 0xF0) == 0xE0 ? 3 : (b0 & 0xF8) == 0xF0 ? 4 : 0;
  char32_t cp = len == 2 ? (b0 & 0x1F) : len == 3 ? (b0 & 0x0F) : (b0 & 0x07);
  for (int k = 1; k < len; ++k) {
    int c = cont(static_cast<std::size_t>(k));
    if (c < 0) {
      len = 0;
      break;
    }
    cp = (cp << 6) | static_cast<char32_t>(c);
  }
  if (len == 0) {
    ++i;
    return 0xFFFD;
  }
  i += static_cast<std::size_t>(len);
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// Latin, Greek and Cyrillic letters; punctuation blocks (dashes, quotes) are separators.
bool is_word_char(char32_t cp) {
  if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9')) return true;
  if (cp >= 0xC0 && cp <= 0x24F) return cp != 0xD7 && cp != 0xF7;
  if (cp >= 0x370 && cp <= 0x3FF) return true;
  if (cp >= 0x400 && cp <= 0x4FF) return true;
  return false;
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  if (cp >= 0x391 && cp <= 0x3AB) return cp + 32;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
  return cp;
}

bool is_apostrophe(char32_t cp) { return cp == '\'' || cp == 0x2019; }

}  // namespace

std::vector<std::string> tokenize(std::string_view utf8) {
  std::vector<char32_t> cps;
  cps.reserve(utf8.size());
  for (std::size_t i = 0; i < utf8.size();) cps.push_back(next_code_point(utf8, i));

  std::vector<std::string> tokens;
  std::string current;
  for (std::size_t k = 0; k < cps.size(); ++k) {
    const char32_t cp = cps[k];
    if (is_word_char(cp)) {
      append_utf8(current, to_lower(cp));
    } else if (is_apostrophe(cp) && !current.empty() && k + 1 < cps.size() &&
               is_word_char(cps[k + 1])) {
      current += '\'';
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Lexicon::Lexicon(std::vector<LexiconCategory> categories, std::vector<LexiconEntry> entries)
    : categories_(std::move(categories)), entries_(std::move(entries)) {
  std::unordered_set<std::string> names;
  std::unordered_set<int> ids;
  for (const auto& c : categories_) {
    if (c.name.empty() || !names.insert(c.name).second) {
      throw Error(Errc::SchemaError, "duplicate or empty category name '" + c.name + "'");
    }
    if (!ids.insert(c.id).second) {
      throw Error(Errc::SchemaError, "duplicate category id " + std::to_string(c.id));
    }
  }
  for (const auto& e : entries_) {
    if (e.pattern.empty()) throw Error(Errc::SchemaError, "empty lexicon pattern");
    if (e.categories.empty()) {
      throw Error(Errc::SchemaError, "entry '" + e.pattern + "' has no category");
    }
    auto& bucket = e.wildcard ? prefix_[e.pattern] : exact_[e.pattern];
    for (int pos : e.categories) {
      if (pos < 0 || static_cast<std::size_t>(pos) >= categories_.size()) {
        throw Error(Errc::SchemaError, "entry '" + e.pattern + "' references an unknown category");
      }
      bucket.push_back(pos);
    }
    if (e.wildcard) max_prefix_ = std::max(max_prefix_, e.pattern.size());
  }
  for (auto* map : {&exact_, &prefix_}) {
    for (auto& [key, cats] : *map) {
      std::sort(cats.begin(), cats.end());
      cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
    }
  }
}

std::optional<std::size_t> Lexicon::category_position(std::string_view name) const noexcept {
  for (std::size_t i = 0; i < categories_.size(); ++i) {
    if (categories_[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<int> Lexicon::match(std::string_view token) const {
  std::vector<int> hits;
  if (auto it = exact_.find(std::string(token)); it != exact_.end()) {
    hits = it->second;
  }
  const std::size_t longest = std::min(max_prefix_, token.size());
  std::string prefix;
  for (std::size_t len = 1; len <= longest; ++len) {
    prefix.assign(token.substr(0, len));
    if (auto it = prefix_.find(prefix); it != prefix_.end()) {
      hits.insert(hits.end(), it->second.begin(), it->second.end());
    }
  }
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  return hits;
}

std::string Lexicon::fingerprint() const {
  // Order-independent over entries so that permuting the file does not change it.
  std::vector<std::string> lines;
  for (const auto& e : entries_) {
    std::string line = e.pattern + (e.wildcard ? "*" : "");
    std::vector<std::string> cats;
    for (int pos : e.categories) cats.push_back(categories_[static_cast<std::size_t>(pos)].name);
    std::sort(cats.begin(), cats.end());
    for (const auto& c : cats) line += "\t" + c;
    lines.push_back(std::move(line));
  }
  std::sort(lines.begin(), lines.end());
  std::string blob;
  for (const auto& c : categories_) blob += std::to_string(c.id) + "\t" + c.name + "\n";
  blob += "%\n";
  for (const auto& l : lines) blob += l + "\n";
  return hex64(fnv1a64(blob));
}

Lexicon parse_lexicon(std::string_view content) {
  std::istringstream in{std::string(content)};
  std::string line;
  int section = 0;  // 0 before header, 1 inside header, 2 entries
  std::vector<LexiconCategory> categories;
  std::vector<std::pair<std::string, std::vector<int>>> raw_entries;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    return Error(Errc::SchemaError, "lexicon line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t == "%") {
      if (section == 2) throw fail("unexpected '%' after entries");
      ++section;
      continue;
    }
    if (section == 0) throw fail("lexicon must start with a '%' header block");
    // Fields separated by tabs; category ids may also be comma separated.
    std::vector<std::string> fields;
    std::string field;
    for (char ch : t) {
      if (ch == '\t' || (section == 2 && ch == ',')) {
        if (!trim(field).empty()) fields.push_back(trim(field));
        field.clear();
      } else {
        field += ch;
      }
    }
    if (!trim(field).empty()) fields.push_back(trim(field));
    if (section == 1) {
      if (fields.size() != 2) throw fail("header lines are 'id<TAB>name'");
      int id = 0;
      try {
        std::size_t used = 0;
        id = std::stoi(fields[0], &used);
        if (used != fields[0].size()) throw std::invalid_argument("id");
      } catch (const std::exception&) {
        throw fail("non-numeric category id '" + fields[0] + "'");
      }
      categories.push_back({id, fields[1]});
    } else {
      if (fields.size() < 2) throw fail("entry lines are 'word<TAB>id[,id...]'");
      std::vector<int> ids;
      for (std::size_t k = 1; k < fields.size(); ++k) {
        try {
          std::size_t used = 0;
          ids.push_back(std::stoi(fields[k], &used));
          if (used != fields[k].size()) throw std::invalid_argument("id");
        } catch (const std::exception&) {
          throw fail("non-numeric category reference '" + fields[k] + "'");
        }
      }
      raw_entries.emplace_back(fields[0], std::move(ids));
    }
  }
  if (section < 2) throw Error(Errc::SchemaError, "lexicon header block is not closed by '%'");

  // Map file ids onto positions; duplicate category names are rejected by the ctor.
  std::unordered_map<int, int> position;
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (!position.emplace(categories[i].id, static_cast<int>(i)).second) {
      throw Error(Errc::SchemaError, "duplicate category id " + std::to_string(categories[i].id));
    }
  }
  std::vector<LexiconEntry> entries;
  for (auto& [word, ids] : raw_entries) {
    LexiconEntry e;
    e.pattern = to_lower_ascii(word);
    if (!e.pattern.empty() && e.pattern.back() == '*') {
      e.wildcard = true;
      e.pattern.pop_back();
    }
    for (int id : ids) {
      auto it = position.find(id);
      if (it == position.end()) {
        throw Error(Errc::SchemaError, "entry '" + word + "' references unknown category " +
                                           std::to_string(id) + " of " +
                                           std::to_string(categories.size()));
      }
      e.categories.push_back(it->second);
    }
    entries.push_back(std::move(e));
  }
  return Lexicon(std::move(categories), std::move(entries));
}

Lexicon load_lexicon(const std::filesystem::path& path) { return parse_lexicon(read_file(path)); }

TextFeatures extract(std::string_view utf8, const Lexicon& lexicon) {
  TextFeatures out;
  const auto& cats = lexicon.categories();
  out.names.reserve(cats.size());
  for (const auto& c : cats) out.names.push_back(c.name);
  std::vector<std::size_t> hits(cats.size(), 0);
  const auto tokens = tokenize(utf8);
  out.word_count = tokens.size();
  for (const auto& tok : tokens) {
    for (int pos : lexicon.match(tok)) ++hits[static_cast<std::size_t>(pos)];
  }
  out.percentages.assign(cats.size(), 0.0);
  if (out.word_count > 0) {
    for (std::size_t i = 0; i < cats.size(); ++i) {
      out.percentages[i] = 100.0 * static_cast<double>(hits[i]) / static_cast<double>(out.word_count);
    }
  }
  return out;
}

double clout_surrogate(const TextFeatures& features) {
  auto pct = [&](std::string_view name) -> double {
    for (std::size_t i = 0; i < features.names.size(); ++i) {
      if (features.names[i] == name) return features.percentages[i];
    }
    throw Error(Errc::SurrogateUnavailable, "lexicon has no '" + std::string(name) + "' category");
  };
  const double z = (pct("we") + pct("you") - pct("i")) / kCloutScale;
  return 100.0 / (1.0 + std::exp(-z));
}

std::string campaign_text(const Campaign& campaign) {
  return campaign.title + " " + campaign.description;
}

FeatureVector to_feature_vector(const TextFeatures& features) {
  FeatureVector fv;
  for (std::size_t i = 0; i < features.names.size(); ++i) {
    fv.add(std::string(kFeaturePrefix) + features.names[i], features.percentages[i], Modality::Text);
  }
  fv.add(std::string(kWordCountFeature), static_cast<double>(features.word_count), Modality::Text);
  try {
    fv.add(std::string(kCloutFeature), clout_surrogate(features), Modality::Text);
  } catch (const Error& e) {
    if (e.code() != Errc::SurrogateUnavailable) throw;
  }
  return fv;
}

std::vector<FeatureVector> featurize(const std::vector<Campaign>& campaigns, const Lexicon& lexicon,
                                     Execution exec) {
  std::vector<FeatureVector> out(campaigns.size());
  const auto n = static_cast<std::ptrdiff_t>(campaigns.size());
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      out[i] = to_feature_vector(extract(campaign_text(campaigns[i]), lexicon));
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      out[i] = to_feature_vector(extract(campaign_text(campaigns[i]), lexicon));
    }
  }
  return out;
}

}  // namespace fundscope::text
