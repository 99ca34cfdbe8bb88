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


#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fundscope/text.hpp"
#include "test_support.hpp"

using namespace fundscope;
using testing::code_of;

namespace {
const std::string kFixtures = FUNDSCOPE_TEST_FIXTURES;

double pct(const text::TextFeatures& f, const std::string& name) {
  auto it = std::find(f.names.begin(), f.names.end(), name);
  REQUIRE(it != f.names.end());
  return f.percentages[static_cast<std::size_t>(it - f.names.begin())];
}

std::string upper(std::string s) {
  for (char& c : s) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return s;
}
}  // namespace

TEST_CASE("tokenize") {
  CHECK(text::tokenize("We think\xE2\x80\x94we KNOW!") == std::vector<std::string>{"we", "think", "we", "know"});
  CHECK(text::tokenize("don't") == std::vector<std::string>{"don't"});
  CHECK(text::tokenize("don\xE2\x80\x99t") == std::vector<std::string>{"don't"});
  CHECK(text::tokenize("").empty());
  CHECK(text::tokenize("'quoted' rock'n'roll '") == std::vector<std::string>{"quoted", "rock'n'roll"});
  CHECK(text::tokenize("Caf\xC3\xA9 2019") == std::vector<std::string>{"caf\xC3\xA9", "2019"});
}

TEST_CASE("lexicon loading") {
  const auto lex = text::load_lexicon(kFixtures + "/lexicon_small.dic");
  CHECK(lex.categories().size() == 3);
  CHECK(lex.entries().size() == 5);
  const auto& think = lex.entries()[0];
  CHECK(think.pattern == "think");
  CHECK(think.wildcard);
  CHECK_FALSE(lex.entries()[2].wildcard);
  CHECK(lex.match("friend") == std::vector<int>{1, 2});
  CHECK(lex.match("thinking") == std::vector<int>{0});
  CHECK(lex.match("thin").empty());
}

TEST_CASE("lexicon validation") {
  CHECK(code_of([] { text::parse_lexicon("%\n1\ta\n2\tb\n3\tc\n%\nword\t99\n"); }) == Errc::SchemaError);
  CHECK(code_of([] { text::parse_lexicon("%\n1\ta\n2\ta\n%\nword\t1\n"); }) == Errc::SchemaError);
  CHECK(code_of([] { text::parse_lexicon("%\n1\ta\nword\t1\n"); }) == Errc::SchemaError);
}

TEST_CASE("the demo lexicon covers the screened categories") {
  const auto lex = text::load_lexicon(FUNDSCOPE_DATA_DIR "/demo_lexicon.dic");
  for (const char* name : {"i", "we", "you", "social", "insight", "bio", "shehe", "focusfuture", "anx", "achieve",
                           "affect", "posemo", "negemo", "money"}) {
    CHECK_MESSAGE(lex.category_position(name).has_value(), name);
  }
}

TEST_CASE("extract") {
  const auto lex = text::load_lexicon(kFixtures + "/lexicon_small.dic");
  auto f = text::extract("We think we know", lex);
  CHECK(f.word_count == 4);
  CHECK(pct(f, "insight") == 50.0);
  CHECK(pct(f, "social") == 50.0);
  CHECK(pct(text::extract("thinking", lex), "insight") == 100.0);
  auto e = text::extract("", lex);
  CHECK(e.word_count == 0);
  for (double p : e.percentages) CHECK(p == 0.0);
  // One token in two categories counts once in each.
  auto fr = text::extract("friend indeed", lex);
  CHECK(pct(fr, "social") == 50.0);
  CHECK(pct(fr, "posemo") == 50.0);
}

TEST_CASE("extract properties") {
  const auto lex = text::load_lexicon(FUNDSCOPE_DATA_DIR "/demo_lexicon.dic");
  auto entries = lex.entries();
  std::mt19937_64 rng(9);
  std::shuffle(entries.begin(), entries.end(), rng);
  const text::Lexicon shuffled(lex.categories(), entries);
  CHECK(shuffled.fingerprint() == lex.fingerprint());
  const std::vector<std::string> texts{
      "We think our family needs your help after the accident; we know you care.",
      "I am so happy and grateful. Thank you, friends, for the love and the prayers!",
      "Money for school, work and the future of our kids; they will succeed.", ""};
  for (const auto& t : texts) {
    const auto base = text::extract(t, lex);
    CHECK(text::extract(t, shuffled).percentages == base.percentages);
    const auto doubled = text::extract(t + " " + t, lex);
    CHECK(doubled.word_count == 2 * base.word_count);
    for (std::size_t i = 0; i < base.percentages.size(); ++i) {
      CHECK(doubled.percentages[i] == doctest::Approx(base.percentages[i]).epsilon(1e-12));
      CHECK(base.percentages[i] >= 0.0);
      CHECK(base.percentages[i] <= 100.0);
    }
    CHECK(text::extract(upper(t), lex).percentages == base.percentages);
  }
}

TEST_CASE("clout surrogate") {
  text::TextFeatures f;
  f.names = {"i", "we", "you"};
  f.percentages = {0, 0, 0};
  CHECK(text::clout_surrogate(f) == 50.0);
  f.percentages = {4, 4, 0};
  CHECK(text::clout_surrogate(f) == 50.0);
  f.percentages = {0, 100, 100};
  CHECK(text::clout_surrogate(f) == doctest::Approx(100.0).epsilon(1e-12));
  f.percentages = {0, 2, 0};
  CHECK(text::clout_surrogate(f) == doctest::Approx(100.0 / (1.0 + std::exp(-1.0))));
  text::TextFeatures missing;
  missing.names = {"we", "you"};
  missing.percentages = {1, 1};
  CHECK(code_of([&] { text::clout_surrogate(missing); }) == Errc::SurrogateUnavailable);
  const auto fv = text::to_feature_vector(missing);
  CHECK_FALSE(fv.contains(text::kCloutFeature));
  CHECK(fv.contains("liwc_we"));
  CHECK(fv.contains(text::kWordCountFeature));
}

TEST_CASE("featurize joins title and description; serial equals parallel") {
  const auto lex = text::load_lexicon(FUNDSCOPE_DATA_DIR "/demo_lexicon.dic");
  std::vector<Campaign> cs(120);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    cs[i].id = std::to_string(i);
    cs[i].title = "Help us " + std::to_string(i);
    cs[i].description = i % 3 ? "we think you know our family" : "";
  }
  CHECK(text::campaign_text(cs[1]) == "Help us 1 we think you know our family");
  const auto a = text::featurize(cs, lex, Execution::Serial);
  const auto b = text::featurize(cs, lex, Execution::Parallel);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    REQUIRE(a[i].size() == b[i].size());
    for (std::size_t k = 0; k < a[i].size(); ++k) {
      CHECK(a[i].features()[k].name == b[i].features()[k].name);
      CHECK(a[i].features()[k].value == b[i].features()[k].value);
    }
  }
}
