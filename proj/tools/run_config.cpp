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


#include "run_config.hpp"

#include <map>
#include <set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fundscope/error.hpp"
#include "fundscope/util.hpp"

namespace fundscope::cli {

namespace pt = boost::property_tree;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(Errc::ConfigError, what); }

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (v.empty() || v[0] == '-') throw std::invalid_argument(v);
    const auto n = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    config_error("'" + key + "' expects a non-negative integer, got '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    config_error("'" + key + "' expects a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string t = to_lower_ascii(v);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  config_error("'" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v + ",") {
    if (c == ',') {
      if (auto t = trim(cur); !t.empty()) out.push_back(t);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"run", {"seed", "out", "jobs"}},
      {"paths", {"campaigns", "dataset", "categories", "census", "census_year", "lexicon", "quality", "images",
                 "faces"}},
      {"providers", {"quality", "face", "face_url", "face_concurrency"}},
      {"forest", {"n_estimators", "max_features", "min_samples_split", "max_depth", "criterion", "bootstrap"}},
      {"experiment", {"scheme", "mode", "alpha", "combiner", "settings", "basic_only_bands", "cv_folds",
                      "test_fraction", "min_band_size"}}};
  return s;
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) config_error("config file not found: " + path.string());
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    config_error(std::string("cannot parse config: ") + e.what());
  }
  RunConfig cfg;
  cfg.config_dir = std::filesystem::absolute(path).parent_path();
  auto resolve = [&](const std::string& v) {
    std::filesystem::path p(v);
    return p.is_absolute() ? p : cfg.config_dir / p;
  };

  for (const auto& [section, keys] : tree) {
    auto sit = schema().find(section);
    if (sit == schema().end()) config_error("unknown config section [" + section + "]");
    if (keys.empty() && !keys.data().empty()) config_error("key '" + section + "' outside a section");
    for (const auto& [key, node] : keys) {
      if (!sit->second.count(key)) config_error("unknown key '" + key + "' in [" + section + "]");
      const std::string v = trim(node.data());
      const std::string full = section + "." + key;
      auto& ex = cfg.experiment;
      if (section == "run") {
        if (key == "seed") cfg.seed = to_u64(full, v);
        else if (key == "out") cfg.out = resolve(v);
        else if (key == "jobs") cfg.jobs = static_cast<int>(to_u64(full, v));
      } else if (section == "paths") {
        if (key == "census_year") cfg.census_year = v;
        else if (v.empty()) continue;
        else if (key == "campaigns") cfg.campaigns = resolve(v);
        else if (key == "dataset") cfg.dataset = resolve(v);
        else if (key == "categories") cfg.categories = resolve(v);
        else if (key == "census") cfg.census = resolve(v);
        else if (key == "lexicon") cfg.lexicon = resolve(v);
        else if (key == "quality") cfg.quality = resolve(v);
        else if (key == "images") cfg.images = resolve(v);
        else if (key == "faces") cfg.faces = resolve(v);
      } else if (section == "providers") {
        if (key == "quality") {
          cfg.quality_provider = to_lower_ascii(v);
          if (cfg.quality_provider != "precomputed" && cfg.quality_provider != "builtin" &&
              cfg.quality_provider != "none") {
            config_error("providers.quality must be precomputed, builtin or none");
          }
        } else if (key == "face") {
          cfg.face_provider = to_lower_ascii(v);
          if (cfg.face_provider != "stub" && cfg.face_provider != "remote" && cfg.face_provider != "none") {
            config_error("providers.face must be stub, remote or none");
          }
        } else if (key == "face_url") {
          cfg.face_url = v;
        } else if (key == "face_concurrency") {
          cfg.face_concurrency = static_cast<int>(to_u64(full, v));
          if (cfg.face_concurrency < 1) config_error("providers.face_concurrency must be >= 1");
        }
      } else if (section == "forest") {
        auto& f = ex.forest;
        if (key == "n_estimators") f.n_estimators = to_u64(full, v);
        else if (key == "max_features") f.max_features = to_u64(full, v);
        else if (key == "min_samples_split") f.min_samples_split = to_u64(full, v);
        else if (key == "max_depth") {
          if (v.empty() || to_lower_ascii(v) == "none") f.max_depth.reset();
          else f.max_depth = to_u64(full, v);
        } else if (key == "criterion") {
          const std::string c = to_lower_ascii(v);
          if (c == "gini") f.criterion = forest::Criterion::Gini;
          else if (c == "entropy") f.criterion = forest::Criterion::Entropy;
          else config_error("forest.criterion must be gini or entropy");
        } else if (key == "bootstrap") {
          f.bootstrap = to_bool(full, v);
        }
        if (f.n_estimators == 0) config_error("forest.n_estimators must be >= 1");
        if (f.min_samples_split < 2) config_error("forest.min_samples_split must be >= 2");
      } else if (section == "experiment") {
        if (key == "scheme") {
          auto s = parse_scheme(v);
          if (!s) config_error("experiment.scheme must be two-class or four-class");
          ex.scheme = *s;
        } else if (key == "mode") {
          auto m = experiment::parse_mode(v);
          if (!m) config_error("experiment.mode must be screened or all-features");
          ex.mode = *m;
        } else if (key == "alpha") {
          ex.alpha = to_double(full, v);
          if (!(ex.alpha > 0.0 && ex.alpha < 1.0)) config_error("experiment.alpha must lie in (0,1)");
        } else if (key == "combiner") {
          auto c = experiment::parse_combiner(v);
          if (!c) config_error("experiment.combiner must be average or vote");
          ex.combiner = *c;
        } else if (key == "settings") {
          ex.settings.clear();
          for (const auto& s : split_list(v)) {
            auto parsed = experiment::parse_setting(s);
            if (!parsed) config_error("unknown setting '" + s + "'");
            ex.settings.push_back(*parsed);
          }
          if (ex.settings.empty()) config_error("experiment.settings is empty");
        } else if (key == "basic_only_bands") {
          ex.basic_only_bands.clear();
          for (const auto& s : split_list(v)) {
            auto b = parse_band(s);
            if (!b) config_error("unknown band '" + s + "'");
            ex.basic_only_bands.push_back(*b);
          }
        } else if (key == "cv_folds") {
          ex.cv_folds = to_u64(full, v);
        } else if (key == "test_fraction") {
          ex.test_fraction = to_double(full, v);
          if (!(ex.test_fraction > 0.0 && ex.test_fraction < 1.0)) {
            config_error("experiment.test_fraction must lie in (0,1)");
          }
        } else if (key == "min_band_size") {
          ex.min_band_size = to_u64(full, v);
        }
      }
    }
  }
  return cfg;
}

std::string RunConfig::describe() const {
  std::string s;
  s += "seed=" + (seed ? std::to_string(*seed) : std::string("unset"));
  s += " quality_provider=" + quality_provider + " face_provider=" + face_provider;
  s += " census_year=" + census_year;
  s += " " + experiment.describe();
  return s;
}

std::string RunConfig::fingerprint() const { return hex64(fnv1a64(describe())); }

}  // namespace fundscope::cli
