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

#include "fundscope/screening.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace fundscope;
using namespace fundscope::screening;
using testing::code_of;

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Cell {
  FeatureTable table;
  std::vector<double> ratio;
};

// Column "signal" carries the ratio plus noise, "noise_k" are independent.
Cell planted(std::size_t n, std::size_t noise_cols, std::uint64_t seed, double missing_rate = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u;
  std::vector<std::string> ids;
  Cell c;
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("r" + std::to_string(i));
    f[i] = z(rng);
    c.ratio.push_back(2.0 * f[i] + 0.3 * z(rng));
  }
  c.table = FeatureTable(ids);
  FeatureColumn sig{"liwc_signal", Modality::Text, f};
  for (auto& v : sig.values)
    if (u(rng) < missing_rate) v = kNaN;
  c.table.add_column(sig);
  for (std::size_t k = 0; k < noise_cols; ++k) {
    FeatureColumn col{"liwc_noise" + std::to_string(k), Modality::Text, {}};
    for (std::size_t i = 0; i < n; ++i) col.values.push_back(z(rng));
    c.table.add_column(col);
  }
  FeatureColumn flag{"liwc_missing", Modality::Text, std::vector<double>(n, 0.0)};
  flag.values[0] = 1.0;
  c.table.add_column(flag);
  c.table.add_column({"face_num", Modality::Face, std::vector<double>(n, 1.0)});
  return c;
}

}  // namespace

TEST_CASE("candidate columns exclude missingness flags and other modalities") {
  const auto c = planted(20, 3, 1);
  const auto cand = candidate_columns(c.table, Modality::Text);
  CHECK(cand == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(candidate_columns(c.table, Modality::Face) == std::vector<std::size_t>{5});
  CHECK(candidate_columns(c.table, Modality::Population).empty());
}

TEST_CASE("planted signal is recovered with oracle statistics") {
  const auto c = planted(200, 20, 42);
  const auto res = screen(c.table, c.ratio, GoalBand::B2, "Medical, Illness & Healing", Modality::Text, 0.05,
                          Execution::Serial);
  CHECK(res.family_size == 21);
  CHECK(res.threshold == doctest::Approx(0.05 / 21));
  REQUIRE(!res.rows.empty());
  const auto& top = res.rows.front();
  CHECK(top.feature == "liwc_signal");
  CHECK(top.r > 0.9);
  const auto& f = c.table.column(0).values;
  const double r = oracle::pearson_r(f, c.ratio);
  CHECK(top.r == doctest::Approx(r).epsilon(1e-12));
  CHECK(top.n == 200);
  CHECK(top.band == GoalBand::B2);
  for (const auto& row : res.rows) {
    CHECK(row.p < res.threshold);
    const auto j = *c.table.find(row.feature);
    const double rr = oracle::pearson_r(c.table.column(j).values, c.ratio);
    CHECK(std::abs(row.p - oracle::pearson_p(rr, 200)) < 1e-10);
  }
  // Every column not retained has an oracle p at or above the threshold.
  for (std::size_t j = 1; j <= 20; ++j) {
    const auto& col = c.table.column(j);
    const bool kept = std::any_of(res.rows.begin(), res.rows.end(), [&](auto& row) { return row.feature == col.name; });
    const double p = oracle::pearson_p(oracle::pearson_r(col.values, c.ratio), 200);
    CHECK(kept == (p < res.threshold));
  }
}

TEST_CASE("missing values are excluded pairwise") {
  const auto c = planted(120, 2, 9, 0.25);
  const auto res = screen(c.table, c.ratio, GoalBand::B1, "Sports", Modality::Text, 0.05, Execution::Serial);
  REQUIRE(!res.rows.empty());
  const auto& f = c.table.column(0).values;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!std::isnan(f[i])) {
      x.push_back(f[i]);
      y.push_back(c.ratio[i]);
    }
  CHECK(res.rows.front().n == x.size());
  CHECK(res.rows.front().r == doctest::Approx(oracle::pearson_r(x, y)).epsilon(1e-12));
}

TEST_CASE("small cells and degenerate columns") {
  const auto small = planted(5, 2, 3);
  const auto res = screen(small.table, small.ratio, GoalBand::B4, "Sports", Modality::Text, 0.05);
  CHECK(res.skipped);
  CHECK(res.rows.empty());
  REQUIRE(res.notes.size() == 1);
  CHECK(res.notes[0].find("n=5") != std::string::npos);

  const auto c = planted(40, 0, 4);
  const auto face = screen(c.table, c.ratio, GoalBand::B1, "Sports", Modality::Face, 0.05);
  CHECK_FALSE(face.skipped);
  CHECK(face.rows.empty());
  REQUIRE(face.notes.size() == 1);
  CHECK(face.notes[0].find("zero variance") != std::string::npos);

  const auto none = screen(c.table, c.ratio, GoalBand::B1, "Sports", Modality::Population, 0.05);
  CHECK(none.skipped);
  CHECK(none.family_size == 0);

  std::vector<double> short_ratio(3, 0.0);
  CHECK(code_of([&] { screen(c.table, short_ratio, GoalBand::B1, "x", Modality::Text, 0.05); }) ==
        Errc::ShapeError);
}

TEST_CASE("screening ignores row order; serial equals parallel") {
  const auto c = planted(150, 30, 77);
  const auto base = screen(c.table, c.ratio, GoalBand::B3, "Sports", Modality::Text, 0.05, Execution::Serial);
  const auto par = screen(c.table, c.ratio, GoalBand::B3, "Sports", Modality::Text, 0.05, Execution::Parallel);
  REQUIRE(par.rows.size() == base.rows.size());
  for (std::size_t k = 0; k < base.rows.size(); ++k) {
    CHECK(par.rows[k].feature == base.rows[k].feature);
    CHECK(par.rows[k].p == base.rows[k].p);
  }
  std::vector<std::size_t> perm(c.ratio.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::mt19937_64 rng(1);
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto shuffled = c.table.select_rows(perm);
  std::vector<double> y;
  for (auto i : perm) y.push_back(c.ratio[i]);
  const auto res = screen(shuffled, y, GoalBand::B3, "Sports", Modality::Text, 0.05, Execution::Serial);
  REQUIRE(res.rows.size() == base.rows.size());
  for (std::size_t k = 0; k < base.rows.size(); ++k) {
    CHECK(res.rows[k].feature == base.rows[k].feature);
    CHECK(res.rows[k].r == doctest::Approx(base.rows[k].r).epsilon(1e-12));
  }
}

TEST_CASE("screen_all groups by band and category") {
  auto a = planted(60, 2, 5);
  std::vector<GoalBand> bands(60, GoalBand::B1);
  std::vector<std::string> cats(60, "Sports");
  for (std::size_t i = 30; i < 60; ++i) bands[i] = GoalBand::B2;
  for (std::size_t i = 0; i < 4; ++i) cats[i] = "Animals & Pets";
  const auto rep = screen_all(a.table, a.ratio, bands, cats, {Modality::Text, Modality::Face}, 0.05,
                              Execution::Serial);
  bool tiny_note = false;
  for (const auto& n : rep.notes) tiny_note |= n.find("Animals & Pets") != std::string::npos && n.find("n=4") != std::string::npos;
  CHECK(tiny_note);
  for (std::size_t k = 1; k < rep.rows.size(); ++k) CHECK(rep.rows[k - 1].band <= rep.rows[k].band);
  CHECK(rep.thresholds.size() == 6);
  const std::string csv = report_to_csv(rep, {"seed=1"});
  CHECK(csv.rfind("# seed=1\ngoal_band,category,feature,mean,sd,r,p,n,threshold\n", 0) == 0);
}

TEST_CASE("threshold formatting") {
  CHECK(format_sig2(stats::bonferroni_threshold(0.05, 92)) == "5.4E-4");
  CHECK(format_sig2(stats::bonferroni_threshold(0.05, 2)) == "0.025");
  CHECK(format_sig2(stats::bonferroni_threshold(0.05, 1)) == "0.05");
}

TEST_CASE("population comparison splits at the threshold") {
  const std::vector<double> values{1, 2, 3, 10, 11, 12, 99};
  const std::vector<double> pops{100, 200, 300, 5000, 6000, 7000, kNaN};
  const auto t = compare_by_population(values, pops, 300);
  CHECK(t.n_a == 3);
  CHECK(t.n_b == 3);
  CHECK(t.mean_a == 2.0);
  CHECK(t.mean_b == 11.0);
  CHECK(t.t < 0.0);
}
