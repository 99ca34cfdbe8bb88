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


#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "fundscope/core.hpp"
#include "fundscope/dataset.hpp"
#include "fundscope/error.hpp"
#include "fundscope/experiment.hpp"
#include "fundscope/features.hpp"
#include "fundscope/forest.hpp"
#include "fundscope/image.hpp"
#include "fundscope/ingest.hpp"
#include "fundscope/screening.hpp"
#include "fundscope/synth.hpp"
#include "fundscope/text.hpp"
#include "fundscope/util.hpp"
#include "run_config.hpp"

#ifndef FUNDSCOPE_DATA_DIR
#define FUNDSCOPE_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fundscope;

namespace {

enum ExitCode { kOk = 0, kRuntime = 1, kConfig = 2, kData = 3 };

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::ConfigError:
    case Errc::IoError:
    case Errc::SpecError:
      return kConfig;
    case Errc::EmptyDataset:
    case Errc::SchemaError:
    case Errc::ParseError:
    case Errc::ShapeError:
    case Errc::LabelError:
    case Errc::RangeError:
    case Errc::InvalidMatrix:
    case Errc::InvalidImage:
    case Errc::InvalidGoal:
    case Errc::InvalidAmount:
    case Errc::InvalidRatio:
      return kData;
    default:
      return kRuntime;
  }
}

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string out;
  std::string spec;
  std::string model;
  std::string campaigns;
  std::optional<double> alpha;
};

[[noreturn]] void config_error(const std::string& what) { throw Error(Errc::ConfigError, what); }

cli::RunConfig effective_config(const Flags& flags, bool need_seed) {
  cli::RunConfig cfg = flags.config.empty() ? cli::RunConfig{} : cli::load_run_config(flags.config);
  if (flags.seed) cfg.seed = flags.seed;
  if (flags.jobs) cfg.jobs = *flags.jobs;
  if (!flags.out.empty()) cfg.out = flags.out;
  if (flags.alpha) {
    if (!(*flags.alpha > 0.0 && *flags.alpha < 1.0)) config_error("--alpha must lie in (0,1)");
    cfg.experiment.alpha = *flags.alpha;
  }
  if (need_seed && !cfg.seed) config_error("a seed is required (--seed or [run] seed)");
  cfg.experiment.seed = cfg.seed.value_or(0);
  if (cfg.jobs > 0) set_max_threads(cfg.jobs);
  return cfg;
}

void require_file(const fs::path& p, const std::string& what) {
  if (p.empty()) config_error(what + " path is not configured");
  if (!fs::exists(p)) config_error(what + " not found: " + p.string());
}

CategoryRegistry registry_for(const cli::RunConfig& cfg) {
  if (cfg.categories.empty()) return CategoryRegistry::builtin();
  require_file(cfg.categories, "category registry");
  return CategoryRegistry::load(cfg.categories);
}

fs::path lexicon_path(const cli::RunConfig& cfg) {
  return cfg.lexicon.empty() ? fs::path(FUNDSCOPE_DATA_DIR) / "demo_lexicon.dic" : cfg.lexicon;
}

std::vector<std::string> header(const cli::RunConfig& cfg, const std::string& command) {
  return {"tool=fundscope", "command=" + command,
          "seed=" + (cfg.seed ? std::to_string(*cfg.seed) : std::string("unset")),
          "config_fingerprint=" + cfg.fingerprint()};
}

std::vector<LabeledCampaign> load_dataset(const cli::RunConfig& cfg, const CategoryRegistry& registry) {
  const fs::path p = cfg.dataset_path();
  require_file(p, "dataset (run `fundscope ingest` first)");
  return dataset_from_jsonl(read_file(p), registry);
}

fs::path feature_file(const cli::RunConfig& cfg, Modality m) {
  return cfg.out / ("features_" + std::string(modality_name(m)) + ".csv");
}

constexpr std::array<Modality, 5> kModalityOrder{Modality::Basic, Modality::Text, Modality::Population,
                                                 Modality::Face, Modality::ImageQuality};

// Loads every feature file present under the output directory; basic is required.
FeatureTable load_features(const cli::RunConfig& cfg, const std::vector<LabeledCampaign>& data) {
  std::vector<std::string> ids;
  for (const auto& d : data) ids.push_back(d.campaign.id);
  FeatureTable table(ids);
  for (Modality m : kModalityOrder) {
    const fs::path p = feature_file(cfg, m);
    if (!fs::exists(p)) {
      if (m == Modality::Basic) config_error("feature file not found: " + p.string() + " (run `fundscope featurize`)");
      continue;
    }
    FeatureTable part = feature_table_from_csv(read_file(p));
    if (part.ids() != ids) throw Error(Errc::ShapeError, p.string() + " rows do not match the dataset");
    table.merge(part);
  }
  return table;
}

// Feature vectors for campaigns with every configured provider.
struct Featurized {
  std::map<Modality, std::vector<FeatureVector>> rows;
  std::vector<std::string> tags;
};

Featurized featurize_campaigns(const cli::RunConfig& cfg, const std::vector<Campaign>& campaigns,
                               const CategoryRegistry& registry) {
  Featurized f;
  f.rows[Modality::Basic] = experiment::basic_features(campaigns, registry);
  const fs::path lex = lexicon_path(cfg);
  require_file(lex, "lexicon");
  const text::Lexicon lexicon = text::load_lexicon(lex);
  f.rows[Modality::Text] = text::featurize(campaigns, lexicon);
  f.tags.push_back("lexicon_fingerprint=" + lexicon.fingerprint());
  if (!cfg.census.empty()) {
    require_file(cfg.census, "census file");
    const PopulationTable table = load_population_table(cfg.census, cfg.census_year);
    f.rows[Modality::Population] = join_population(campaigns, table);
    f.tags.push_back("census=" + file_fingerprint(cfg.census) + " year=" + cfg.census_year);
  }
  if (cfg.quality_provider == "precomputed") {
    require_file(cfg.quality, "quality score file");
    image::PrecomputedQualityProvider provider(image::load_precomputed_quality(cfg.quality));
    f.rows[Modality::ImageQuality] = image::quality_features(campaigns, provider);
    f.tags.push_back("quality_provider=" + provider.name());
  } else if (cfg.quality_provider == "builtin") {
    require_file(cfg.images, "image directory");
    image::BuiltinQualityProvider provider(cfg.images);
    f.rows[Modality::ImageQuality] = image::quality_features(campaigns, provider);
    f.tags.push_back("quality_provider=" + provider.name());
  }
  if (cfg.face_provider == "stub") {
    require_file(cfg.faces, "face sidecar directory");
    image::StubFaceProvider provider(cfg.faces);
    f.rows[Modality::Face] = image::face_features(campaigns, provider, 1);
    f.tags.push_back("face_provider=stub");
  } else if (cfg.face_provider == "remote") {
    if (cfg.face_url.empty()) config_error("providers.face_url is required for the remote face provider");
    image::RemoteFaceOptions opts;
    opts.base_url = cfg.face_url;
    opts.image_root = cfg.images;
    opts.cache_dir = cfg.faces.empty() ? cfg.out / "faces_cache" : cfg.faces;
    image::RemoteFaceProvider provider(opts);
    f.rows[Modality::Face] = image::face_features(campaigns, provider, cfg.face_concurrency);
    f.tags.push_back("face_provider=remote");
  }
  return f;
}

int cmd_ingest(const Flags& flags) {
  auto cfg = effective_config(flags, true);
  const auto registry = registry_for(cfg);
  require_file(cfg.campaigns, "campaign snapshot");
  if (!cfg.census.empty()) require_file(cfg.census, "census file");
  IngestResult result = load_campaigns(cfg.campaigns, registry);
  const auto data = label_campaigns(result.campaigns);
  auto meta = std::vector<std::pair<std::string, std::string>>{
      {"tool", "fundscope"},
      {"source", file_fingerprint(cfg.campaigns)},
      {"seed", std::to_string(*cfg.seed)},
      {"config_fingerprint", cfg.fingerprint()}};
  write_file(cfg.out / "dataset.jsonl", dataset_to_jsonl(data, meta));

  const auto& r = result.report;
  json reasons = json::object();
  for (auto reason : {RejectReason::Malformed, RejectReason::InvalidGoal, RejectReason::InvalidAmount,
                      RejectReason::InvalidDate, RejectReason::UnknownCategory, RejectReason::NonUS,
                      RejectReason::GoalOutOfRange, RejectReason::RatioAboveMax}) {
    reasons[std::string(reason_name(reason))] = r.count(reason);
  }
  json rejected = json::array();
  for (const auto& rej : r.rejected) {
    rejected.push_back({{"line", rej.line}, {"reason", reason_name(rej.reason)}, {"detail", rej.detail}});
  }
  json bands = json::object();
  for (auto b : kAllBands) {
    bands[std::string(band_name(b))] =
        std::count_if(data.begin(), data.end(), [&](const auto& d) { return d.band == b; });
  }
  json report{{"_meta", {{"source", file_fingerprint(cfg.campaigns)}, {"config_fingerprint", cfg.fingerprint()}}},
              {"total_records", r.total_records},
              {"accepted", r.accepted},
              {"non_us", r.non_us},
              {"out_of_band", r.out_of_band},
              {"dropped_ratio_gt_2_5", r.dropped_ratio_gt_2_5},
              {"by_reason", reasons},
              {"by_band", bands},
              {"rejected", rejected}};
  write_file(cfg.out / "ingest_report.json", report.dump(2) + "\n");

  std::vector<double> goals, ratios;
  for (const auto& d : data) {
    goals.push_back(d.campaign.goal_amount);
    ratios.push_back(d.ratio);
  }
  auto h = header(cfg, "ingest");
  write_file(cfg.out / "hist_goal.csv",
             experiment::histogram_to_csv(experiment::histogram(goals, 0.0, 100000.0, 20), h));
  write_file(cfg.out / "hist_ratio.csv",
             experiment::histogram_to_csv(experiment::histogram(ratios, 0.0, kMaxRatio, 25), h));
  std::cout << "ingest: " << r.total_records << " records, " << r.accepted << " accepted, " << r.rejected.size()
            << " rejected (non_us " << r.non_us << ", out_of_band " << r.out_of_band << ", ratio>2.5 "
            << r.dropped_ratio_gt_2_5 << ")\n";
  return kOk;
}

int cmd_featurize(const Flags& flags) {
  auto cfg = effective_config(flags, true);
  const auto registry = registry_for(cfg);
  const auto data = load_dataset(cfg, registry);
  const auto campaigns = campaigns_of(data);
  Featurized f = featurize_campaigns(cfg, campaigns, registry);
  std::vector<std::string> ids;
  for (const auto& c : campaigns) ids.push_back(c.id);
  auto h = header(cfg, "featurize");
  h.push_back("dataset=" + file_fingerprint(cfg.dataset_path()));
  h.insert(h.end(), f.tags.begin(), f.tags.end());
  for (const auto& [m, rows] : f.rows) {
    const FeatureTable table = FeatureTable::from_vectors(ids, rows);
    write_file(feature_file(cfg, m), feature_table_to_csv(table, h));
    std::cout << "featurize: " << modality_name(m) << " " << table.rows() << "x" << table.cols() << "\n";
  }
  return kOk;
}

int cmd_screen(const Flags& flags) {
  auto cfg = effective_config(flags, true);
  const auto registry = registry_for(cfg);
  const auto data = load_dataset(cfg, registry);
  const FeatureTable table = load_features(cfg, data);
  std::vector<double> ratios;
  std::vector<GoalBand> bands;
  std::vector<std::string> categories;
  for (const auto& d : data) {
    ratios.push_back(d.ratio);
    bands.push_back(d.band);
    categories.push_back(d.campaign.category.label);
  }
  std::vector<Modality> modalities;
  for (Modality m : kModalityOrder) {
    if (m == Modality::Basic) continue;
    if (std::any_of(table.columns().begin(), table.columns().end(), [&](const auto& c) { return c.modality == m; })) {
      modalities.push_back(m);
    }
  }
  const auto report = screening::screen_all(table, ratios, bands, categories, modalities, cfg.experiment.alpha);
  auto h = header(cfg, "screen");
  h.push_back("alpha=" + format_double(cfg.experiment.alpha));
  write_file(cfg.out / "screening.csv", screening::report_to_csv(report, h));
  std::string notes;
  for (const auto& n : report.notes) notes += n + "\n";
  write_file(cfg.out / "screening_notes.txt", notes);
  std::cout << "screen: " << report.rows.size() << " significant features, " << report.notes.size() << " notes\n";

  if (auto pj = table.find(kPopulationFeature); pj && !cfg.census.empty()) {
    require_file(cfg.census, "census file");
    const PopulationTable census = load_population_table(cfg.census, cfg.census_year);
    const double threshold = census.median_population();
    const auto& pops = table.column(*pj).values;
    std::vector<double> shares, donors;
    for (const auto& d : data) {
      shares.push_back(static_cast<double>(d.campaign.num_shares));
      donors.push_back(static_cast<double>(d.campaign.num_donors));
    }
    std::string out;
    for (const auto& line : h) out += "# " + line + "\n";
    out += "# population_threshold=" + format_double(threshold) + "\n";
    out += "metric,n_small,n_large,mean_small,mean_large,t,df,p\n";
    for (const auto& [name, values] : {std::pair{"ratio", &ratios}, std::pair{"num_shares", &shares},
                                       std::pair{"num_donors", &donors}}) {
      const auto t = screening::compare_by_population(*values, pops, threshold);
      out += csv::join({name, std::to_string(t.n_a), std::to_string(t.n_b), format_fixed(t.mean_a, 4),
                        format_fixed(t.mean_b, 4), format_fixed(t.t, 4), format_double(t.df), format_double(t.p)}) +
             "\n";
    }
    write_file(cfg.out / "population_ttest.csv", out);
  }
  return kOk;
}

json plan_json(const experiment::AssemblyPlan& plan) {
  json cols = json::array();
  for (const auto& c : plan.columns) {
    cols.push_back({{"name", c.name}, {"source", c.source}, {"indicator", c.indicator}, {"fill", c.fill}});
  }
  return cols;
}

experiment::AssemblyPlan plan_from_json(const json& j) {
  if (!j.is_array()) throw Error(Errc::SchemaError, "model plan must be an array");
  experiment::AssemblyPlan plan;
  for (const auto& c : j) {
    try {
      plan.columns.push_back({c.at("name").get<std::string>(), c.at("source").get<std::string>(),
                              c.at("indicator").get<bool>(), c.at("fill").get<double>()});
    } catch (const json::exception& e) {
      throw Error(Errc::SchemaError, std::string("malformed plan column: ") + e.what());
    }
  }
  return plan;
}

int cmd_train(const Flags& flags) {
  auto cfg = effective_config(flags, true);
  const auto registry = registry_for(cfg);
  const auto data = load_dataset(cfg, registry);
  const FeatureTable table = load_features(cfg, data);
  experiment::ExperimentInput input{data, table};
  const auto& ex = cfg.experiment;
  std::size_t written = 0;
  for (GoalBand band : kAllBands) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data[i].band == band) rows.push_back(i);
    }
    if (rows.size() < ex.min_band_size) {
      std::cout << "train: " << band_name(band) << " skipped (" << rows.size() << " campaigns)\n";
      continue;
    }
    std::set<std::string> significant;
    if (ex.mode == experiment::AssemblyMode::Screened) {
      significant = experiment::significant_by_band(input, rows, ex.alpha, ex.exec)[band];
    }
    const FeatureTable sub = table.select_rows(rows);
    std::vector<int> y;
    for (auto r : rows) y.push_back(data[r].label(ex.scheme));
    const bool basic_only =
        std::find(ex.basic_only_bands.begin(), ex.basic_only_bands.end(), band) != ex.basic_only_bands.end();
    for (auto setting : ex.settings) {
      if (setting == experiment::Setting::LateFusion) continue;
      if (basic_only && setting != experiment::Setting::Basic) continue;
      experiment::Assembled a;
      try {
        a = experiment::assemble(setting, sub, y, ex.mode, significant);
      } catch (const Error& e) {
        if (e.code() != Errc::EmptySetting) throw;
        std::cout << "train: " << band_name(band) << " " << experiment::setting_name(setting)
                  << " has no features; skipped\n";
        continue;
      }
      forest::ForestConfig fc = ex.forest;
      fc.seed = derive_seed(*cfg.seed, static_cast<std::uint64_t>(band) * 16 + static_cast<std::uint64_t>(setting));
      const auto model = forest::RandomForest::fit(a.matrix.x, a.labels, fc, ex.exec, a.matrix.names);
      json doc{{"format", "fundscope-model"},
               {"version", 1},
               {"goal_band", band_name(band)},
               {"setting", experiment::setting_name(setting)},
               {"scheme", scheme_name(ex.scheme)},
               {"mode", experiment::mode_name(ex.mode)},
               {"config_fingerprint", cfg.fingerprint()},
               {"plan", plan_json(a.plan)},
               {"forest", json::parse(model.to_json())}};
      const fs::path p = cfg.out / "models" /
                         (std::string(band_name(band)) + "_" + std::string(experiment::setting_name(setting)) + ".json");
      write_file(p, doc.dump() + "\n");
      ++written;
    }
  }
  std::cout << "train: " << written << " models written to " << (cfg.out / "models").string() << "\n";
  return kOk;
}

int cmd_evaluate(const Flags& flags) {
  auto cfg = effective_config(flags, true);
  const auto registry = registry_for(cfg);
  const auto data = load_dataset(cfg, registry);
  const FeatureTable table = load_features(cfg, data);
  auto report = experiment::run_experiment({data, table}, cfg.experiment);
  report.meta.insert(report.meta.begin(), {"tool", "fundscope"});
  report.meta.push_back({"providers", "quality=" + cfg.quality_provider + " face=" + cfg.face_provider});
  for (Modality m : kModalityOrder) {
    const fs::path p = feature_file(cfg, m);
    if (fs::exists(p)) report.meta.push_back({"features_" + std::string(modality_name(m)), file_fingerprint(p)});
  }
  write_file(cfg.out / "report.csv", experiment::report_to_csv(report));
  write_file(cfg.out / "report.json", experiment::report_to_json(report));
  for (const auto& n : report.notes) std::cout << "note: " << n << "\n";
  std::cout << "evaluate: " << report.rows.size() << " band rows, " << report.totals.size() << " total rows\n";
  return kOk;
}

int cmd_predict(const Flags& flags) {
  auto cfg = effective_config(flags, false);
  const auto registry = registry_for(cfg);
  if (flags.model.empty()) config_error("--model is required");
  if (flags.campaigns.empty()) config_error("--campaigns is required");
  require_file(flags.model, "model file");
  require_file(flags.campaigns, "campaign file");
  json doc = json::parse(read_file(flags.model), nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || doc.value("format", "") != "fundscope-model") {
    throw Error(Errc::SchemaError, "not a fundscope model file: " + flags.model);
  }
  const auto plan = plan_from_json(doc.at("plan"));
  const auto model = forest::RandomForest::from_json(doc.at("forest").dump());
  if (model.n_features() != plan.columns.size() ||
      (!model.feature_names().empty() && model.feature_names() != plan.names())) {
    throw Error(Errc::ShapeError, "model features do not match its assembly plan");
  }
  IngestResult in = load_campaigns(flags.campaigns, registry);
  Featurized f = featurize_campaigns(cfg, in.campaigns, registry);

  const auto imp = model.feature_importances();
  std::vector<std::size_t> order(plan.columns.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return imp.values[a] > imp.values[b]; });

  std::string out;
  for (const auto& line : header(cfg, "predict")) out += "# " + line + "\n";
  out += "# model=" + file_fingerprint(flags.model) + "\n";
  out += "id,predicted,probability,top_features,imputed\n";
  for (std::size_t i = 0; i < in.campaigns.size(); ++i) {
    FeatureVector v;
    for (const auto& [m, rows] : f.rows) v.append(rows[i]);
    // One-hot columns absent from this batch are zeros, not missing values.
    for (const auto& col : plan.columns) {
      if (!v.contains(col.source) && (col.source.rfind("state=", 0) == 0 || col.source.rfind("category=", 0) == 0)) {
        v.add(col.source, 0.0, Modality::Basic);
      }
    }
    const auto x = experiment::apply_plan(plan, v);
    const auto proba = model.predict_proba(x);
    const std::size_t k = forest::argmax_lowest(proba);
    std::string top, imputed;
    for (std::size_t t = 0, shown = 0; t < order.size() && shown < 3; ++t) {
      if (imp.zero) break;
      top += (shown++ ? ";" : "") + plan.columns[order[t]].name;
    }
    std::set<std::string> missing;
    for (const auto& col : plan.columns) {
      if (!v.contains(col.source)) missing.insert(col.source);
    }
    for (const auto& m : missing) imputed += (imputed.empty() ? "" : ";") + m;
    out += csv::join({in.campaigns[i].id, std::to_string(model.labels()[k]), format_fixed(proba[k], 4), top, imputed}) +
           "\n";
  }
  write_file(cfg.out / "predictions.csv", out);
  std::cout << "predict: " << in.campaigns.size() << " campaigns scored, " << in.report.rejected.size()
            << " rejected\n";
  return kOk;
}

int cmd_synth(const Flags& flags) {
  auto cfg = effective_config(flags, true);
  const auto registry = registry_for(cfg);
  if (flags.spec.empty()) config_error("--spec is required");
  require_file(flags.spec, "synthetic spec");
  const auto spec = synth::load_spec(flags.spec, registry);
  const fs::path lex = lexicon_path(cfg);
  require_file(lex, "lexicon");
  const std::string lex_text = read_file(lex);
  const auto lexicon = text::parse_lexicon(lex_text);
  const auto data = synth::generate_synthetic(spec, lexicon, registry, *cfg.seed);
  synth::write_synthetic(data, cfg.out, lex_text, *cfg.seed);
  std::cout << "synth: " << data.campaigns.size() << " campaigns written to " << cfg.out.string() << "\n";
  return kOk;
}

int cmd_report(const Flags& flags) {
  auto cfg = effective_config(flags, false);
  const fs::path p = cfg.out / "report.json";
  require_file(p, "report (run `fundscope evaluate` first)");
  json doc = json::parse(read_file(p), nullptr, false);
  if (doc.is_discarded() || !doc.contains("rows")) throw Error(Errc::SchemaError, "malformed report " + p.string());
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-6s %-15s %6s %6s %8s %9s %8s %8s\n", "band", "setting", "train", "test",
                "accuracy", "precision", "recall", "f1");
  out += line;
  auto emit = [&](const json& r) {
    const json& m = r.at("held_out");
    std::snprintf(line, sizeof line, "%-6s %-15s %6zu %6zu %8.4f %9.4f %8.4f %8.4f\n",
                  r.at("goal_band").get<std::string>().c_str(), r.at("setting").get<std::string>().c_str(),
                  r.at("n_train").get<std::size_t>(), r.at("n_test").get<std::size_t>(), m.at("accuracy").get<double>(),
                  m.at("precision").get<double>(), m.at("recall").get<double>(), m.at("f1").get<double>());
    out += line;
  };
  for (const auto& r : doc.at("rows")) emit(r);
  for (const auto& r : doc.at("totals")) emit(r);
  for (const auto& n : doc.value("notes", json::array())) out += "note: " + n.get<std::string>() + "\n";
  write_file(cfg.out / "summary.txt", out);
  std::cout << out;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fundscope: crowdfunding campaign success analysis"};
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--config", flags.config, "INI run configuration");
  app.add_option("--seed", flags.seed, "random seed (overrides the config)");
  app.add_option("--jobs", flags.jobs, "worker threads (default: all cores)")->check(CLI::PositiveNumber);
  app.add_option("--out", flags.out, "output directory (overrides the config)");

  auto* ingest = app.add_subcommand("ingest", "parse a campaign snapshot into the canonical dataset");
  auto* featurize = app.add_subcommand("featurize", "extract per-modality feature files");
  auto* screen = app.add_subcommand("screen", "Pearson screening with Bonferroni correction");
  screen->add_option("--alpha", flags.alpha, "family-wise significance level");
  auto* train = app.add_subcommand("train", "fit one forest per band and setting");
  auto* evaluate = app.add_subcommand("evaluate", "hold-out and cross-validated evaluation report");
  auto* predict = app.add_subcommand("predict", "score new campaigns with a trained model");
  predict->add_option("--model", flags.model, "model JSON written by train")->required();
  predict->add_option("--campaigns", flags.campaigns, "campaign JSONL to score")->required();
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset from a spec");
  synth->add_option("--spec", flags.spec, "synthetic spec JSON")->required();
  auto* report = app.add_subcommand("report", "print the evaluation report as a table");

  // Shared flags are accepted after the subcommand name as well.
  for (auto* sub : {ingest, featurize, screen, train, evaluate, predict, synth, report}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*ingest) return cmd_ingest(flags);
    if (*featurize) return cmd_featurize(flags);
    if (*screen) return cmd_screen(flags);
    if (*train) return cmd_train(flags);
    if (*evaluate) return cmd_evaluate(flags);
    if (*predict) return cmd_predict(flags);
    if (*synth) return cmd_synth(flags);
    if (*report) return cmd_report(flags);
  } catch (const Error& e) {
    std::cerr << "fundscope: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "fundscope: " << e.what() << "\n";
    return kRuntime;
  }
  return kRuntime;
}
