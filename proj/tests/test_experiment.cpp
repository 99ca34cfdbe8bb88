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
#include <limits>
#include <random>

#include "fundscope/experiment.hpp"
#include "synth_input.hpp"
#include "test_support.hpp"

using namespace fundscope;
using namespace fundscope::experiment;
using testing::code_of;

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

// Forest with one single-leaf tree per row of `leaf_counts`.
forest::RandomForest leaf_model(const std::vector<int>& labels, const std::vector<std::vector<double>>& leaf_counts) {
  nlohmann::json trees = nlohmann::json::array();
  std::vector<std::uint64_t> seeds;
  for (const auto& c : leaf_counts) {
    double n = 0;
    for (double v : c) n += v;
    trees.push_back(nlohmann::json::array({nlohmann::json::array({-1, 0.0, -1, -1, n, 0.0, c})}));
    seeds.push_back(seeds.size());
  }
  nlohmann::json doc{{"format", "fundscope-forest"},
                     {"version", 1},
                     {"n_features", 1},
                     {"labels", labels},
                     {"feature_names", nlohmann::json::array()},
                     {"config",
                      {{"n_estimators", leaf_counts.size()},
                       {"min_samples_split", 2},
                       {"max_features", 0},
                       {"max_depth", nullptr},
                       {"bootstrap", true},
                       {"seed", 0},
                       {"criterion", "gini"}}},
                     {"seeds", seeds},
                     {"trees", trees}};
  return forest::RandomForest::from_json(doc.dump());
}

FeatureTable small_table() {
  FeatureTable t({"a", "b", "c", "d"});
  t.add_column({"launch_year", Modality::Basic, {2018, 2019, 2018, 2017}});
  t.add_column({"liwc_we", Modality::Text, {1, kNaN, 3, 10}});
  t.add_column({"liwc_you", Modality::Text, {0, 0, 1, 0}});
  t.add_column({"quality_aesthetic", Modality::ImageQuality, {kNaN, 5, kNaN, 7}});
  t.add_column({"quality_missing", Modality::ImageQuality, {1, 0, 1, 0}});
  return t;
}

synth::SyntheticDataset small_synth(std::uint64_t seed, std::size_t n = 160) {
  const auto registry = CategoryRegistry::builtin();
  const auto lex = text::load_lexicon(FUNDSCOPE_DATA_DIR "/demo_lexicon.dic");
  synth::SyntheticSpec spec;
  spec.cells = {{GoalBand::B1, "Medical, Illness & Healing", n}, {GoalBand::B2, "Medical, Illness & Healing", n}};
  spec.effects = {{"liwc_insight", -0.5, 0.0, std::nullopt, ""}};
  return synth::generate_synthetic(spec, lex, registry, seed);
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.forest.n_estimators = 15;
  cfg.cv_folds = 3;
  cfg.seed = 7;
  cfg.basic_only_bands = {};
  return cfg;
}

}  // namespace

TEST_CASE("setting names round trip") {
  for (Setting s : kAllSettings) CHECK(parse_setting(setting_name(s)) == s);
  CHECK_FALSE(parse_setting("nope").has_value());
  CHECK(parse_mode("all-features") == AssemblyMode::AllFeatures);
  CHECK(parse_combiner("vote") == Combiner::MajorityVote);
}

TEST_CASE("basic features") {
  std::vector<Campaign> cs(2);
  cs[0].launch_date = parse_iso_date("2018-06-01");
  cs[0].state = "TX";
  cs[0].category = {0, CategoryRegistry::builtin().label(0)};
  cs[1].launch_date = parse_iso_date("2019-01-31");
  cs[1].state = "CA";
  cs[1].category = {3, CategoryRegistry::builtin().label(3)};
  const auto rows = basic_features(cs, CategoryRegistry::builtin());
  CHECK(rows[0].get("launch_year") == 2018.0);
  CHECK(rows[0].get("launch_month") == 6.0);
  CHECK(rows[0].get("state=TX") == 1.0);
  CHECK(rows[0].get("state=CA") == 0.0);
  CHECK(rows[1].get("category=" + CategoryRegistry::builtin().label(3)) == 1.0);
  CHECK(rows[0].size() == 3 + 2 + 19);
  for (const auto& f : rows[0].features()) CHECK(f.modality == Modality::Basic);
}

TEST_CASE("plan imputes medians and adds indicators") {
  const auto t = small_table();
  const auto plan = plan_columns(t, {"liwc_we", "quality_aesthetic", "quality_missing"});
  CHECK(plan.names() == std::vector<std::string>{"liwc_we", "quality_aesthetic", "quality_missing", "liwc_we__missing"});
  CHECK(plan.columns[0].fill == 3.0);
  CHECK(plan.columns[1].fill == 6.0);
  const auto x = apply_plan(plan, t);
  CHECK(x(1, 0) == 3.0);
  CHECK(x(0, 1) == 6.0);
  CHECK(x(1, 3) == 1.0);
  CHECK(x(0, 3) == 0.0);
  FeatureVector row;
  row.add("liwc_we", 4.0, Modality::Text);
  CHECK(apply_plan(plan, row) == std::vector<double>{4.0, 6.0, 6.0 * 0 + plan.columns[2].fill, 0.0});
  CHECK(code_of([&] { plan_columns(t, {"absent"}); }) == Errc::SchemaError);
}

TEST_CASE("setting columns and assembly") {
  const auto t = small_table();
  const std::vector<int> y{2, -2, 2, -2};
  CHECK(setting_columns(Setting::Basic, t, AssemblyMode::Screened, {}) == std::vector<std::string>{"launch_year"});
  CHECK(setting_columns(Setting::LIWC, t, AssemblyMode::Screened, {"liwc_you"}) ==
        std::vector<std::string>{"liwc_you"});
  CHECK(setting_columns(Setting::ImageQuality, t, AssemblyMode::Screened, {}).empty());
  CHECK(setting_columns(Setting::ImageQuality, t, AssemblyMode::Screened, {"quality_aesthetic"}) ==
        std::vector<std::string>{"quality_aesthetic", "quality_missing"});
  CHECK(setting_columns(Setting::LIWC, t, AssemblyMode::AllFeatures, {}).size() == 2);

  const auto a = assemble(Setting::LIWC, t, y, AssemblyMode::AllFeatures, {});
  CHECK(a.matrix.names == std::vector<std::string>{"liwc_we", "liwc_you", "liwc_we__missing"});
  CHECK(a.matrix.x.rows() == 4);
  CHECK(code_of([&] { assemble(Setting::Face, t, y, AssemblyMode::Screened, {}); }) == Errc::EmptySetting);
  CHECK(code_of([&] { assemble(Setting::ImageQuality, t, y, AssemblyMode::Screened, {}); }) == Errc::EmptySetting);

  const auto e = assemble(Setting::EarlyFusionAll, t, y, AssemblyMode::AllFeatures, {});
  CHECK(e.matrix.names == std::vector<std::string>{"launch_year", "liwc_we", "liwc_you", "liwc_we__missing",
                                                   "quality_aesthetic", "quality_missing"});
}

TEST_CASE("early fusion concatenates") {
  NamedMatrix a{{"r1", "r2"}, {"a1", "a2", "a3"}, forest::Matrix(2, 3, 1.0)};
  NamedMatrix b{{"r1", "r2"}, {"b1", "b2"}, forest::Matrix(2, 2, 2.0)};
  const auto f = early_fuse({a, b});
  CHECK(f.x.cols() == 5);
  CHECK(f.names == std::vector<std::string>{"a1", "a2", "a3", "b1", "b2"});
  CHECK(f.x(1, 2) == 1.0);
  CHECK(f.x(1, 3) == 2.0);
  NamedMatrix c{{"r1"}, {"c"}, forest::Matrix(1, 1)};
  CHECK(code_of([&] { early_fuse({a, c}); }) == Errc::ShapeError);
  NamedMatrix d{{"r2", "r1"}, {"d"}, forest::Matrix(2, 1)};
  CHECK(code_of([&] { early_fuse({a, d}); }) == Errc::ShapeError);
}

TEST_CASE("early fusion then fit equals fitting the concatenated matrix") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  NamedMatrix a{{}, {"a1", "a2"}, forest::Matrix(60, 2)};
  NamedMatrix b{{}, {"b1"}, forest::Matrix(60, 1)};
  forest::Matrix whole(60, 3);
  std::vector<int> y(60);
  for (std::size_t i = 0; i < 60; ++i) {
    a.ids.push_back(std::to_string(i));
    b.ids.push_back(std::to_string(i));
    y[i] = i % 2 ? 2 : -2;
    for (std::size_t j = 0; j < 3; ++j) whole(i, j) = z(rng) + (j == 2 ? y[i] : 0.0);
    a.x(i, 0) = whole(i, 0);
    a.x(i, 1) = whole(i, 1);
    b.x(i, 0) = whole(i, 2);
  }
  forest::ForestConfig cfg;
  cfg.n_estimators = 10;
  cfg.seed = 4;
  const auto fused = early_fuse({a, b});
  CHECK(fused.x == whole);
  CHECK(forest::RandomForest::fit(fused.x, y, cfg) == forest::RandomForest::fit(whole, y, cfg));
}

TEST_CASE("late fusion examples") {
  const auto m1 = leaf_model({-2, 2}, {{6, 4}});
  const auto m2 = leaf_model({-2, 2}, {{2, 8}});
  const std::vector<double> in{0.0};
  const std::vector<std::span<const double>> inputs{in, in};
  const auto p = late_fuse_proba({&m1, &m2}, inputs);
  CHECK(p[0] == doctest::Approx(0.4));
  CHECK(p[1] == doctest::Approx(0.6));
  CHECK(late_fuse({&m1, &m2}, inputs) == 2);
  CHECK(late_fuse({&m1, &m2}, inputs, Combiner::MajorityVote) == -2);
  const auto t1 = leaf_model({-2, 2}, {{5, 5}});
  CHECK(late_fuse({&t1, &t1}, inputs) == -2);
  const auto four = leaf_model({-2, -1, 1, 2}, {{1, 1, 1, 1}});
  CHECK(code_of([&] { late_fuse({&m1, &four}, inputs); }) == Errc::LabelError);
  CHECK(code_of([&] { late_fuse({&m1}, inputs); }) == Errc::ShapeError);
  // Member order does not matter for averaging.
  const auto m3 = leaf_model({-2, 2}, {{7, 3}, {1, 9}});
  const std::vector<std::span<const double>> three{in, in, in};
  const auto fwd = late_fuse_proba({&m1, &m2, &m3}, three);
  const auto rev = late_fuse_proba({&m3, &m1, &m2}, three);
  for (std::size_t c = 0; c < fwd.size(); ++c) CHECK(fwd[c] == doctest::Approx(rev[c]).epsilon(1e-15));
}

TEST_CASE("histogram") {
  const std::vector<double> v{0.0, 0.1, 0.5, 0.99, 1.0, 1.5, -1.0};
  const auto h = histogram(v, 0.0, 1.0, 2);
  REQUIRE(h.size() == 2);
  CHECK(h[0].count == 2);
  CHECK(h[1].count == 3);
  CHECK(h[1].right == 1.0);
}

TEST_CASE("experiment runs and is reproducible") {
  const auto registry = CategoryRegistry::builtin();
  const auto d = small_synth(3);
  const auto in = testing::experiment_input(d, registry);
  const auto cfg = small_config();
  const auto rep = run_experiment(in, cfg);
  REQUIRE_FALSE(rep.rows.empty());
  for (const auto& row : rep.rows) {
    CHECK(row.n_test > 0);
    CHECK(row.n_train + row.n_test == 160);
    CHECK(row.held_out.accuracy >= 0.0);
    CHECK(row.held_out.accuracy <= 1.0);
    REQUIRE(row.cv.has_value());
    CHECK(row.cv->n == row.n_train);
  }
  REQUIRE(rep.totals.size() == 3);
  CHECK(rep.totals[0].band == "Total");
  CHECK(rep.totals[0].n_test == 2 * rep.rows[0].n_test);

  const std::string csv = report_to_csv(rep);
  CHECK(report_to_csv(run_experiment(in, cfg)) == csv);
  auto par = cfg;
  par.exec = Execution::Serial;
  CHECK(report_to_csv(run_experiment(in, par)) == csv);

  auto shuffled = in;
  std::vector<std::size_t> perm(in.data.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::mt19937_64 rng(5);
  std::shuffle(perm.begin(), perm.end(), rng);
  shuffled.data.clear();
  for (auto i : perm) shuffled.data.push_back(in.data[i]);
  shuffled.features = in.features.select_rows(perm);
  CHECK(report_to_csv(run_experiment(shuffled, cfg)) == csv);
  CHECK(report_to_json(run_experiment(shuffled, cfg)) == report_to_json(rep));

  auto other = cfg;
  other.seed = 8;
  CHECK(report_to_csv(run_experiment(in, other)) != csv);
}

TEST_CASE("experiment input validation and basic-only bands") {
  const auto registry = CategoryRegistry::builtin();
  const auto d = small_synth(4, 60);
  auto in = testing::experiment_input(d, registry);
  auto cfg = small_config();
  cfg.basic_only_bands = {GoalBand::B2};
  cfg.cv_folds = 0;
  const auto rep = run_experiment(in, cfg);
  for (const auto& row : rep.rows) {
    CHECK_FALSE(row.cv.has_value());
    if (row.band == "B2") CHECK(row.setting == Setting::Basic);
  }
  cfg.min_band_size = 100;
  const auto none = run_experiment(in, cfg);
  CHECK(none.rows.empty());
  CHECK_FALSE(none.notes.empty());

  in.data.pop_back();
  CHECK(code_of([&] { run_experiment(in, small_config()); }) == Errc::ShapeError);
}
