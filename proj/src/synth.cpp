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


#include "fundscope/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include <json.hpp>

#include "fundscope/error.hpp"
#include "fundscope/util.hpp"

namespace fundscope::synth {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 12> kCityNames{
    "Riverside", "Fairview",  "Greenville", "Franklin", "Clinton", "Madison",
    "Georgetown", "Salem",    "Marion",     "Ashland",  "Oakdale", "Burlington"};

constexpr std::array<std::string_view, 36> kFiller{
    "the",    "a",      "and",    "of",     "to",     "in",    "for",    "on",     "with",
    "this",   "that",   "is",     "was",    "be",     "at",    "from",   "by",     "an",
    "campaign", "page", "update", "story",  "day",    "year",  "town",   "street", "car",
    "house",  "week",   "road",   "photo",  "link",   "share", "city",   "team",   "fund"};

[[noreturn]] void spec_error(const std::string& what) { throw Error(Errc::SpecError, what); }

double number(const json& j, const char* key, double fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) spec_error(std::string("'") + key + "' must be a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) spec_error(std::string("'") + key + "' must be finite");
  return v;
}

std::string string_field(const json& j, const char* key, bool required) {
  auto it = j.find(key);
  if (it == j.end()) {
    if (required) spec_error(std::string("missing '") + key + "'");
    return {};
  }
  if (!it->is_string()) spec_error(std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      spec_error("unknown key '" + it.key() + "' in " + where);
    }
  }
}

GoalBand band_field(const json& j, const char* key) {
  const std::string s = string_field(j, key, true);
  auto b = parse_band(s);
  if (!b) spec_error("unknown band '" + s + "'");
  return *b;
}

}  // namespace

SyntheticSpec parse_spec(std::string_view json_text, const CategoryRegistry& registry) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    spec_error(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) spec_error("spec must be a JSON object");
  check_keys(j,
             {"cells", "effects", "interactions", "intercept", "noise_sigma", "image_rate", "face_rate",
              "population_rate", "states", "cities_per_state", "min_words", "max_words"},
             "spec");
  SyntheticSpec spec;
  auto cells = j.find("cells");
  if (cells == j.end() || !cells->is_array() || cells->empty()) spec_error("'cells' must be a non-empty array");
  std::set<std::pair<int, std::string>> seen;
  for (const auto& c : *cells) {
    if (!c.is_object()) spec_error("cell must be an object");
    check_keys(c, {"band", "category", "n"}, "cell");
    CellSpec cell;
    cell.band = band_field(c, "band");
    cell.category = string_field(c, "category", true);
    if (!registry.index_of(cell.category)) spec_error("unknown category '" + cell.category + "'");
    auto n = c.find("n");
    if (n == c.end() || !n->is_number_unsigned() || n->get<std::size_t>() == 0) {
      spec_error("cell 'n' must be a positive integer");
    }
    cell.n = n->get<std::size_t>();
    if (!seen.insert({static_cast<int>(cell.band), cell.category}).second) {
      spec_error("duplicate cell " + std::string(band_name(cell.band)) + "/" + cell.category);
    }
    spec.cells.push_back(cell);
  }
  if (auto e = j.find("effects"); e != j.end()) {
    if (!e->is_array()) spec_error("'effects' must be an array");
    for (const auto& x : *e) {
      if (!x.is_object()) spec_error("effect must be an object");
      check_keys(x, {"feature", "slope", "sigma", "band", "category"}, "effect");
      EffectSpec eff;
      eff.feature = string_field(x, "feature", true);
      eff.slope = number(x, "slope", 0.0);
      eff.sigma = number(x, "sigma", 0.0);
      if (eff.sigma < 0.0) spec_error("effect sigma must be >= 0");
      if (x.contains("band")) eff.band = band_field(x, "band");
      eff.category = string_field(x, "category", false);
      if (!eff.category.empty() && !registry.index_of(eff.category)) {
        spec_error("unknown category '" + eff.category + "' in effect");
      }
      spec.effects.push_back(eff);
    }
  }
  if (auto e = j.find("interactions"); e != j.end()) {
    if (!e->is_array()) spec_error("'interactions' must be an array");
    for (const auto& x : *e) {
      if (!x.is_object()) spec_error("interaction must be an object");
      check_keys(x, {"text_feature", "image_feature", "amplitude"}, "interaction");
      spec.interactions.push_back(
          {string_field(x, "text_feature", true), string_field(x, "image_feature", true), number(x, "amplitude", 0.0)});
    }
  }
  spec.intercept = number(j, "intercept", spec.intercept);
  spec.noise_sigma = number(j, "noise_sigma", spec.noise_sigma);
  if (spec.noise_sigma < 0.0) spec_error("noise_sigma must be >= 0");
  for (auto [key, target] : {std::pair{"image_rate", &spec.image_rate}, std::pair{"face_rate", &spec.face_rate},
                             std::pair{"population_rate", &spec.population_rate}}) {
    *target = number(j, key, *target);
    if (*target < 0.0 || *target > 1.0) spec_error(std::string("'") + key + "' must lie in [0,1]");
  }
  if (auto s = j.find("states"); s != j.end()) {
    if (!s->is_array() || s->empty()) spec_error("'states' must be a non-empty array");
    spec.states.clear();
    for (const auto& x : *s) {
      if (!x.is_string() || x.get<std::string>().empty()) spec_error("state must be a non-empty string");
      spec.states.push_back(x.get<std::string>());
    }
  }
  spec.cities_per_state = static_cast<int>(number(j, "cities_per_state", spec.cities_per_state));
  if (spec.cities_per_state < 1 || spec.cities_per_state > static_cast<int>(kCityNames.size())) {
    spec_error("'cities_per_state' must lie in [1," + std::to_string(kCityNames.size()) + "]");
  }
  spec.min_words = static_cast<int>(number(j, "min_words", spec.min_words));
  spec.max_words = static_cast<int>(number(j, "max_words", spec.max_words));
  if (spec.min_words < 1 || spec.max_words < spec.min_words) spec_error("need 1 <= min_words <= max_words");
  return spec;
}

SyntheticSpec load_spec(const std::filesystem::path& path, const CategoryRegistry& registry) {
  return parse_spec(read_file(path), registry);
}

namespace {

class MemoryFaceProvider final : public image::FaceProvider {
 public:
  explicit MemoryFaceProvider(const std::map<std::string, std::vector<image::FaceAttributes>>& faces)
      : faces_(faces) {}
  std::string name() const override { return "stub"; }
  std::vector<image::FaceAttributes> analyze(const std::string& ref) const override {
    auto it = faces_.find(ref);
    return it == faces_.end() ? std::vector<image::FaceAttributes>{} : it->second;
  }

 private:
  const std::map<std::string, std::vector<image::FaceAttributes>>& faces_;
};

double round_to(double v, int decimals) {
  const double s = std::pow(10.0, decimals);
  return std::round(v * s) / s;
}

struct WordPools {
  std::vector<std::vector<std::string>> by_category;
  std::vector<std::string> filler;
};

WordPools word_pools(const text::Lexicon& lexicon) {
  WordPools pools;
  pools.by_category.resize(lexicon.categories().size());
  for (const auto& e : lexicon.entries()) {
    const auto hits = lexicon.match(e.pattern);
    for (int c : hits) pools.by_category[static_cast<std::size_t>(c)].push_back(e.pattern);
  }
  for (auto& p : pools.by_category) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
  }
  for (auto w : kFiller) {
    if (lexicon.match(w).empty()) pools.filler.emplace_back(w);
  }
  if (pools.filler.empty()) pools.filler.emplace_back("zzyzx");
  return pools;
}

std::vector<image::FaceAttributes> make_faces(std::mt19937_64& rng, std::size_t count) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> age(1, 80);
  std::vector<image::FaceAttributes> faces;
  for (std::size_t f = 0; f < count; ++f) {
    image::FaceAttributes a;
    a.gender = u01(rng) < 0.5 ? image::Gender::Female : image::Gender::Male;
    a.age = age(rng);
    a.beauty_female_rater = round_to(20.0 + 70.0 * u01(rng), 2);
    a.beauty_male_rater = round_to(20.0 + 70.0 * u01(rng), 2);
    a.smile = u01(rng) < 0.5;
    std::array<double, 7> raw{};
    double sum = 0.0;
    for (double& r : raw) {
      r = u01(rng);
      r *= r;
      sum += r;
    }
    double acc = 0.0;
    std::size_t largest = 0;
    for (std::size_t k = 0; k < raw.size(); ++k) {
      a.emotion[k] = round_to(100.0 * raw[k] / sum, 2);
      acc += a.emotion[k];
      if (a.emotion[k] > a.emotion[largest]) largest = k;
    }
    a.emotion[largest] = round_to(a.emotion[largest] + (100.0 - acc), 2);
    faces.push_back(a);
  }
  return faces;
}

bool effect_applies(const EffectSpec& e, const CellSpec& cell) {
  if (e.band && *e.band != cell.band) return false;
  return e.category.empty() || e.category == cell.category;
}

}  // namespace

SyntheticDataset generate_synthetic(const SyntheticSpec& spec, const text::Lexicon& lexicon,
                                    const CategoryRegistry& registry, std::uint64_t seed) {
  if (spec.cells.empty()) spec_error("no cells");
  const WordPools pools = word_pools(lexicon);
  std::mt19937_64 rng(derive_seed(seed, 0x67656e));
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  SyntheticDataset out;
  // Census: cities_per_state named cities per state.
  std::uniform_real_distribution<double> log_pop(std::log(1000.0), std::log(5.0e6));
  for (const auto& st : spec.states) {
    for (int k = 0; k < spec.cities_per_state; ++k) {
      out.census.push_back({std::string(kCityNames[static_cast<std::size_t>(k)]), st,
                            static_cast<std::int64_t>(std::llround(std::exp(log_pop(rng))))});
    }
  }

  std::size_t serial = 0;
  std::vector<std::size_t> cell_of;
  for (std::size_t ci = 0; ci < spec.cells.size(); ++ci) {
    const CellSpec& cell = spec.cells[ci];
    const BandInterval iv = band_interval(cell.band);
    const auto cat_index = registry.index_of(cell.category);
    if (!cat_index) spec_error("unknown category '" + cell.category + "'");
    std::uniform_int_distribution<long long> goal(static_cast<long long>(iv.lower) + 1,
                                                  static_cast<long long>(iv.upper));
    for (std::size_t i = 0; i < cell.n; ++i) {
      Campaign c;
      char id[32];
      std::snprintf(id, sizeof id, "syn%06zu", ++serial);
      c.id = id;
      c.launch_date = {2015 + static_cast<int>(u01(rng) * 5.0), 1 + static_cast<int>(u01(rng) * 12.0),
                       1 + static_cast<int>(u01(rng) * 28.0)};
      c.state = spec.states[static_cast<std::size_t>(u01(rng) * static_cast<double>(spec.states.size()))];
      if (u01(rng) < spec.population_rate) {
        c.city = std::string(kCityNames[static_cast<std::size_t>(u01(rng) * spec.cities_per_state)]);
      } else {
        c.city = "Hollow " + std::to_string(1 + static_cast<int>(u01(rng) * 50.0));
      }
      c.country = "US";
      c.category = {*cat_index, cell.category};
      c.goal_amount = static_cast<double>(goal(rng));

      std::vector<double> rates(pools.by_category.size());
      double total = 0.0;
      for (std::size_t k = 0; k < rates.size(); ++k) {
        rates[k] = pools.by_category[k].empty() ? 0.0 : 0.04 * u01(rng);
        total += rates[k];
      }
      if (total > 0.7) {
        for (double& r : rates) r *= 0.7 / total;
      }
      std::uniform_int_distribution<int> words(spec.min_words, spec.max_words);
      const int w = words(rng);
      std::vector<std::string> tokens;
      for (int t = 0; t < w; ++t) {
        double u = u01(rng);
        const std::vector<std::string>* pool = &pools.filler;
        for (std::size_t k = 0; k < rates.size(); ++k) {
          if (u < rates[k]) {
            pool = &pools.by_category[k];
            break;
          }
          u -= rates[k];
        }
        tokens.push_back((*pool)[static_cast<std::size_t>(u01(rng) * static_cast<double>(pool->size()))]);
      }
      const std::size_t title_len = std::min<std::size_t>(5, tokens.size());
      for (std::size_t t = 0; t < tokens.size(); ++t) {
        std::string& dst = t < title_len ? c.title : c.description;
        if (!dst.empty()) dst += ' ';
        dst += tokens[t];
      }

      if (u01(rng) < spec.image_rate) {
        const std::string ref = c.id + ".jpg";
        c.cover_image = ref;
        out.quality[ref] = {round_to(1.0 + 9.0 * u01(rng), 4), round_to(1.0 + 9.0 * u01(rng), 4),
                            std::string(image::kPrecomputedQualityProvider)};
        const std::size_t nf = u01(rng) < spec.face_rate ? 1 + static_cast<std::size_t>(u01(rng) * 3.0) : 0;
        out.faces[ref] = make_faces(rng, nf);
      }
      out.campaigns.push_back(std::move(c));
      cell_of.push_back(ci);
    }
  }

  // Features through the regular extraction code.
  std::map<std::string, std::int64_t> census_map;
  for (const auto& r : out.census) census_map[normalize_location_key(r.city, r.state)] = r.population;
  const PopulationTable pop(census_map, "synthetic");
  auto text_rows = text::featurize(out.campaigns, lexicon, Execution::Serial);
  auto pop_rows = join_population(out.campaigns, pop);
  auto quality_rows = image::quality_features(out.campaigns, image::PrecomputedQualityProvider(out.quality),
                                              Execution::Serial);
  auto face_rows = image::face_features(out.campaigns, MemoryFaceProvider(out.faces), 1);
  std::vector<std::string> ids;
  std::vector<FeatureVector> rows;
  for (std::size_t i = 0; i < out.campaigns.size(); ++i) {
    ids.push_back(out.campaigns[i].id);
    FeatureVector v = text_rows[i];
    v.append(pop_rows[i]);
    v.append(quality_rows[i]);
    v.append(face_rows[i]);
    rows.push_back(std::move(v));
  }
  out.features = FeatureTable::from_vectors(ids, rows);

  auto column_of = [&](const std::string& name) {
    auto j = out.features.find(name);
    if (!j) spec_error("feature '" + name + "' is not produced by the generator");
    return &out.features.column(*j).values;
  };
  for (const auto& e : spec.effects) column_of(e.feature);
  for (const auto& x : spec.interactions) {
    column_of(x.text_feature);
    column_of(x.image_feature);
  }

  std::vector<double> signal(out.campaigns.size(), spec.intercept);
  std::mt19937_64 noise_rng(derive_seed(seed, 0x6e6f697365));
  std::normal_distribution<double> normal(0.0, 1.0);
  json effects_json = json::array();
  for (std::size_t ci = 0; ci < spec.cells.size(); ++ci) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < cell_of.size(); ++i) {
      if (cell_of[i] == ci) members.push_back(i);
    }
    for (const auto& e : spec.effects) {
      if (!effect_applies(e, spec.cells[ci])) continue;
      const auto& values = *column_of(e.feature);
      std::vector<double> present;
      for (auto i : members) {
        if (!std::isnan(values[i])) present.push_back(values[i]);
      }
      double m = 0.0, sd = 0.0;
      if (present.size() >= 2) {
        for (double v : present) m += v;
        m /= static_cast<double>(present.size());
        for (double v : present) sd += (v - m) * (v - m);
        sd = std::sqrt(sd / static_cast<double>(present.size() - 1));
      }
      for (auto i : members) {
        const double z = (sd > 0.0 && !std::isnan(values[i])) ? (values[i] - m) / sd : 0.0;
        signal[i] += e.slope * z + e.sigma * normal(noise_rng);
      }
      effects_json.push_back({{"band", band_name(spec.cells[ci].band)},
                              {"category", spec.cells[ci].category},
                              {"feature", e.feature},
                              {"slope", e.slope},
                              {"sigma", e.sigma},
                              {"feature_mean", m},
                              {"feature_sd", sd},
                              {"sign", e.slope > 0 ? 1 : (e.slope < 0 ? -1 : 0)}});
    }
    for (const auto& x : spec.interactions) {
      auto median_of = [&](const std::vector<double>& values) {
        std::vector<double> present;
        for (auto i : members) {
          if (!std::isnan(values[i])) present.push_back(values[i]);
        }
        if (present.empty()) return 0.0;
        std::sort(present.begin(), present.end());
        const std::size_t k = present.size();
        return k % 2 ? present[k / 2] : 0.5 * (present[k / 2 - 1] + present[k / 2]);
      };
      const auto& tv = *column_of(x.text_feature);
      const auto& iv = *column_of(x.image_feature);
      const double tm = median_of(tv), im = median_of(iv);
      for (auto i : members) {
        const bool a = !std::isnan(tv[i]) && tv[i] > tm;
        const bool b = !std::isnan(iv[i]) && iv[i] > im;
        signal[i] += (a != b) ? x.amplitude : -x.amplitude;
      }
    }
  }
  for (std::size_t i = 0; i < out.campaigns.size(); ++i) {
    double ratio = signal[i] + spec.noise_sigma * normal(noise_rng);
    ratio = std::clamp(ratio, 0.0, kMaxRatio);
    Campaign& c = out.campaigns[i];
    c.raised_amount = std::floor(ratio * c.goal_amount * 100.0) / 100.0;
    const double r = compute_ratio(c.raised_amount, c.goal_amount);
    out.ratios.push_back(r);
    const double avg_gift = 40.0 + 120.0 * u01(rng);
    c.num_donors = static_cast<std::int64_t>(std::llround(c.raised_amount / avg_gift));
    c.num_shares = static_cast<std::int64_t>(std::llround(static_cast<double>(c.num_donors) * (0.5 + 2.5 * u01(rng))));
    c.num_followers = c.num_donors + static_cast<std::int64_t>(u01(rng) * 20.0);
  }

  json cells = json::array();
  for (const auto& cell : spec.cells) {
    cells.push_back({{"band", band_name(cell.band)}, {"category", cell.category}, {"n", cell.n}});
  }
  json interactions = json::array();
  for (const auto& x : spec.interactions) {
    interactions.push_back(
        {{"text_feature", x.text_feature}, {"image_feature", x.image_feature}, {"amplitude", x.amplitude}});
  }
  json manifest{{"seed", seed},
                {"campaigns", out.campaigns.size()},
                {"intercept", spec.intercept},
                {"noise_sigma", spec.noise_sigma},
                {"image_rate", spec.image_rate},
                {"face_rate", spec.face_rate},
                {"population_rate", spec.population_rate},
                {"lexicon_fingerprint", lexicon.fingerprint()},
                {"cells", cells},
                {"effects", effects_json},
                {"interactions", interactions}};
  out.manifest = manifest.dump(2) + "\n";
  return out;
}

void write_synthetic(const SyntheticDataset& data, const std::filesystem::path& dir, std::string_view lexicon_text,
                     std::uint64_t seed) {
  std::string campaigns;
  for (const auto& c : data.campaigns) campaigns += campaign_to_json(c) + "\n";
  write_file(dir / "campaigns.jsonl", campaigns);

  std::string census = "city,state,population\n";
  for (const auto& r : data.census) {
    census += csv::join({r.city, r.state, std::to_string(r.population)}) + "\n";
  }
  write_file(dir / "census.csv", census);

  std::string quality = "image_ref,aesthetic,technical\n";
  for (const auto& [ref, q] : data.quality) {
    quality += csv::join({ref, format_double(q.aesthetic), format_double(q.technical)}) + "\n";
  }
  write_file(dir / "quality.csv", quality);

  std::filesystem::create_directories(dir / "faces");
  for (const auto& [ref, faces] : data.faces) image::write_sidecar(dir / "faces", ref, faces);

  write_file(dir / "lexicon.dic", lexicon_text);
  write_file(dir / "manifest.json", data.manifest);

  std::string ini;
  ini += "[run]\nseed = " + std::to_string(seed) + "\nout = out\n";
  ini += "\n[paths]\ncampaigns = campaigns.jsonl\ncensus = census.csv\nlexicon = lexicon.dic\n";
  ini += "quality = quality.csv\nfaces = faces\n";
  ini += "\n[providers]\nquality = precomputed\nface = stub\n";
  ini += "\n[forest]\nn_estimators = 100\n";
  write_file(dir / "run.ini", ini);
}

}  // namespace fundscope::synth
