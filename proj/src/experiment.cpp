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


#include "fundscope/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <json.hpp>

#include "fundscope/error.hpp"
#include "fundscope/util.hpp"

namespace fundscope::experiment {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Modality member_modality(Setting s) {
  switch (s) {
    case Setting::Basic: return Modality::Basic;
    case Setting::LIWC: return Modality::Text;
    case Setting::Population: return Modality::Population;
    case Setting::Face: return Modality::Face;
    case Setting::ImageQuality: return Modality::ImageQuality;
    default: break;
  }
  throw Error(Errc::ConfigError, "setting has no single modality");
}

bool is_fusion(Setting s) { return s == Setting::EarlyFusionAll || s == Setting::LateFusion; }

}  // namespace

std::string_view setting_name(Setting s) noexcept {
  switch (s) {
    case Setting::Basic: return "Basic";
    case Setting::LIWC: return "LIWC";
    case Setting::Population: return "Population";
    case Setting::Face: return "Face";
    case Setting::ImageQuality: return "ImageQuality";
    case Setting::EarlyFusionAll: return "EarlyFusionAll";
    case Setting::LateFusion: return "LateFusion";
  }
  return "?";
}

std::optional<Setting> parse_setting(std::string_view text) noexcept {
  const std::string lower = to_lower_ascii(trim(text));
  for (Setting s : kAllSettings) {
    if (to_lower_ascii(setting_name(s)) == lower) return s;
  }
  return std::nullopt;
}

std::vector<Modality> setting_modalities(Setting s) {
  if (!is_fusion(s)) return {member_modality(s)};
  std::vector<Modality> out;
  for (Setting m : kLateFusionMembers) out.push_back(member_modality(m));
  return out;
}

std::string_view mode_name(AssemblyMode m) noexcept {
  return m == AssemblyMode::Screened ? "screened" : "all-features";
}

std::optional<AssemblyMode> parse_mode(std::string_view text) noexcept {
  const std::string t = to_lower_ascii(trim(text));
  if (t == "screened") return AssemblyMode::Screened;
  if (t == "all-features" || t == "all") return AssemblyMode::AllFeatures;
  return std::nullopt;
}

std::string_view combiner_name(Combiner c) noexcept { return c == Combiner::Average ? "average" : "vote"; }

std::optional<Combiner> parse_combiner(std::string_view text) noexcept {
  const std::string t = to_lower_ascii(trim(text));
  if (t == "average" || t == "avg") return Combiner::Average;
  if (t == "vote" || t == "majority") return Combiner::MajorityVote;
  return std::nullopt;
}

std::vector<FeatureVector> basic_features(const std::vector<Campaign>& campaigns,
                                          const CategoryRegistry& registry) {
  std::set<std::string> states;
  for (const auto& c : campaigns) states.insert(c.state);
  std::vector<FeatureVector> out;
  out.reserve(campaigns.size());
  for (const auto& c : campaigns) {
    FeatureVector v;
    v.add("launch_year", c.launch_date.year, Modality::Basic);
    v.add("launch_month", c.launch_date.month, Modality::Basic);
    v.add("launch_dow", c.launch_date.day_of_week(), Modality::Basic);
    for (const auto& s : states) v.add("state=" + s, c.state == s ? 1.0 : 0.0, Modality::Basic);
    for (std::size_t k = 0; k < registry.size(); ++k) {
      const std::string& label = registry.label(static_cast<int>(k));
      v.add("category=" + label, c.category.label == label ? 1.0 : 0.0, Modality::Basic);
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<std::string> AssemblyPlan::names() const {
  std::vector<std::string> out;
  out.reserve(columns.size());
  for (const auto& c : columns) out.push_back(c.name);
  return out;
}

AssemblyPlan plan_columns(const FeatureTable& train, const std::vector<std::string>& selected) {
  AssemblyPlan plan;
  std::vector<std::vector<double>> emitted;  // training values of each planned column, for dedupe
  std::vector<std::pair<std::string, std::vector<double>>> indicators;
  for (const auto& name : selected) {
    auto j = train.find(name);
    if (!j) throw Error(Errc::SchemaError, "feature '" + name + "' not in table");
    const auto& values = train.column(*j).values;
    std::vector<double> present;
    bool any_missing = false;
    for (double v : values) {
      if (std::isnan(v)) any_missing = true;
      else present.push_back(v);
    }
    double fill = 0.0;
    if (!present.empty()) {
      std::sort(present.begin(), present.end());
      const std::size_t m = present.size();
      fill = m % 2 ? present[m / 2] : 0.5 * (present[m / 2 - 1] + present[m / 2]);
    }
    plan.columns.push_back({name, name, false, fill});
    std::vector<double> filled = values;
    for (double& v : filled) if (std::isnan(v)) v = fill;
    emitted.push_back(std::move(filled));
    if (any_missing) {
      std::vector<double> ind(values.size());
      for (std::size_t i = 0; i < values.size(); ++i) ind[i] = std::isnan(values[i]) ? 1.0 : 0.0;
      indicators.emplace_back(name, std::move(ind));
    }
  }
  // Indicators go after the value columns; one identical to an existing
  // column adds nothing.
  for (auto& [source, ind] : indicators) {
    if (std::find(emitted.begin(), emitted.end(), ind) != emitted.end()) continue;
    plan.columns.push_back({source + "__missing", source, true, 0.0});
    emitted.push_back(std::move(ind));
  }
  return plan;
}

forest::Matrix apply_plan(const AssemblyPlan& plan, const FeatureTable& table) {
  forest::Matrix x(table.rows(), plan.columns.size());
  for (std::size_t c = 0; c < plan.columns.size(); ++c) {
    const auto& col = plan.columns[c];
    auto j = table.find(col.source);
    for (std::size_t r = 0; r < table.rows(); ++r) {
      const double v = j ? table.column(*j).values[r] : kNaN;
      const bool missing = std::isnan(v);
      x(r, c) = col.indicator ? (missing ? 1.0 : 0.0) : (missing ? col.fill : v);
    }
  }
  return x;
}

std::vector<double> apply_plan(const AssemblyPlan& plan, const FeatureVector& row) {
  std::vector<double> out;
  out.reserve(plan.columns.size());
  for (const auto& col : plan.columns) {
    auto v = row.get(col.source);
    out.push_back(col.indicator ? (v ? 0.0 : 1.0) : v.value_or(col.fill));
  }
  return out;
}

std::vector<std::string> setting_columns(Setting setting, const FeatureTable& table, AssemblyMode mode,
                                         const std::set<std::string>& significant) {
  std::vector<std::string> out;
  for (Modality m : setting_modalities(setting)) {
    std::vector<std::string> kept, flags;
    for (const auto& col : table.columns()) {
      if (col.modality != m) continue;
      if (is_missingness_flag(col.name)) {
        flags.push_back(col.name);
      } else if (m == Modality::Basic || mode == AssemblyMode::AllFeatures || significant.count(col.name)) {
        kept.push_back(col.name);
      }
    }
    if (kept.empty() && (mode == AssemblyMode::Screened && m != Modality::Basic)) continue;
    out.insert(out.end(), kept.begin(), kept.end());
    out.insert(out.end(), flags.begin(), flags.end());
  }
  return out;
}

namespace {

// Plan for a setting; early fusion concatenates the member plans in order.
AssemblyPlan plan_setting(Setting setting, const FeatureTable& train, AssemblyMode mode,
                          const std::set<std::string>& significant) {
  if (setting == Setting::LateFusion) throw Error(Errc::ConfigError, "late fusion has no single matrix");
  if (setting != Setting::EarlyFusionAll) {
    return plan_columns(train, setting_columns(setting, train, mode, significant));
  }
  AssemblyPlan plan;
  for (Setting m : kLateFusionMembers) {
    AssemblyPlan part = plan_columns(train, setting_columns(m, train, mode, significant));
    plan.columns.insert(plan.columns.end(), part.columns.begin(), part.columns.end());
  }
  return plan;
}

}  // namespace

Assembled assemble(Setting setting, const FeatureTable& table, std::span<const int> labels, AssemblyMode mode,
                   const std::set<std::string>& significant) {
  if (labels.size() != table.rows()) throw Error(Errc::ShapeError, "labels and feature rows differ");
  Assembled out;
  out.labels.assign(labels.begin(), labels.end());
  if (setting == Setting::EarlyFusionAll) {
    std::vector<NamedMatrix> parts;
    for (Setting m : kLateFusionMembers) {
      AssemblyPlan p = plan_setting(m, table, mode, significant);
      if (p.columns.empty()) continue;
      parts.push_back({table.ids(), p.names(), apply_plan(p, table)});
      out.plan.columns.insert(out.plan.columns.end(), p.columns.begin(), p.columns.end());
    }
    if (parts.empty()) throw Error(Errc::EmptySetting, "EarlyFusionAll has no features");
    out.matrix = early_fuse(parts);
    return out;
  }
  out.plan = plan_setting(setting, table, mode, significant);
  if (out.plan.columns.empty()) {
    throw Error(Errc::EmptySetting, std::string(setting_name(setting)) + " has no features");
  }
  out.matrix = {table.ids(), out.plan.names(), apply_plan(out.plan, table)};
  return out;
}

NamedMatrix early_fuse(const std::vector<NamedMatrix>& parts) {
  if (parts.empty()) throw Error(Errc::EmptySetting, "nothing to fuse");
  NamedMatrix out;
  out.ids = parts.front().ids;
  std::size_t cols = 0;
  for (const auto& p : parts) {
    if (p.x.rows() != out.ids.size() || p.ids != out.ids) {
      throw Error(Errc::ShapeError, "early fusion parts disagree on rows");
    }
    if (p.names.size() != p.x.cols()) throw Error(Errc::ShapeError, "column names do not match matrix");
    cols += p.x.cols();
  }
  out.x = forest::Matrix(out.ids.size(), cols);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    for (std::size_t r = 0; r < p.x.rows(); ++r) {
      auto src = p.x.row(r);
      std::copy(src.begin(), src.end(), out.x.row(r).begin() + static_cast<std::ptrdiff_t>(offset));
    }
    out.names.insert(out.names.end(), p.names.begin(), p.names.end());
    offset += p.x.cols();
  }
  return out;
}

namespace {

std::vector<double> combine(const std::vector<std::vector<double>>& probas, Combiner combiner) {
  const std::size_t k = probas.front().size();
  std::vector<double> out(k, 0.0);
  for (const auto& p : probas) {
    if (combiner == Combiner::Average) {
      for (std::size_t c = 0; c < k; ++c) out[c] += p[c];
    } else {
      out[forest::argmax_lowest(p)] += 1.0;
    }
  }
  for (double& v : out) v /= static_cast<double>(probas.size());
  return out;
}

void check_members(const std::vector<const forest::RandomForest*>& models,
                   const std::vector<std::span<const double>>& inputs) {
  if (models.empty()) throw Error(Errc::EmptySetting, "late fusion needs at least one model");
  if (models.size() != inputs.size()) throw Error(Errc::ShapeError, "one input row per model required");
  for (const auto* m : models) {
    if (m->labels() != models.front()->labels()) {
      throw Error(Errc::LabelError, "late fusion members were trained on different label sets");
    }
  }
}

}  // namespace

std::vector<double> late_fuse_proba(const std::vector<const forest::RandomForest*>& models,
                                    const std::vector<std::span<const double>>& inputs) {
  check_members(models, inputs);
  std::vector<std::vector<double>> probas;
  for (std::size_t i = 0; i < models.size(); ++i) probas.push_back(models[i]->predict_proba(inputs[i]));
  return combine(probas, Combiner::Average);
}

int late_fuse(const std::vector<const forest::RandomForest*>& models,
              const std::vector<std::span<const double>>& inputs, Combiner combiner) {
  check_members(models, inputs);
  std::vector<std::vector<double>> probas;
  for (std::size_t i = 0; i < models.size(); ++i) probas.push_back(models[i]->predict_proba(inputs[i]));
  return models.front()->labels()[forest::argmax_lowest(combine(probas, combiner))];
}

std::string ExperimentConfig::describe() const {
  std::string s = forest.describe();
  s += " scheme=" + std::string(scheme_name(scheme));
  s += " mode=" + std::string(mode_name(mode));
  s += " combiner=" + std::string(combiner_name(combiner));
  s += " alpha=" + format_double(alpha);
  s += " settings=";
  for (std::size_t i = 0; i < settings.size(); ++i) s += (i ? "|" : "") + std::string(setting_name(settings[i]));
  s += " basic_only=";
  for (std::size_t i = 0; i < basic_only_bands.size(); ++i) {
    s += (i ? "|" : "") + std::string(band_name(basic_only_bands[i]));
  }
  s += " cv_folds=" + std::to_string(cv_folds);
  s += " test_fraction=" + format_double(test_fraction);
  s += " min_band_size=" + std::to_string(min_band_size);
  s += " seed=" + std::to_string(seed);
  return s;
}

std::map<GoalBand, std::set<std::string>> significant_by_band(const ExperimentInput& input,
                                                             std::span<const std::size_t> rows, double alpha,
                                                             Execution exec) {
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  const FeatureTable sub = input.features.select_rows(idx);
  std::vector<double> ratios;
  std::vector<GoalBand> bands;
  std::vector<std::string> categories;
  for (auto r : idx) {
    ratios.push_back(input.data[r].ratio);
    bands.push_back(input.data[r].band);
    categories.push_back(input.data[r].campaign.category.label);
  }
  const std::vector<Modality> modalities{Modality::Text, Modality::Population, Modality::Face,
                                         Modality::ImageQuality};
  const auto report = screening::screen_all(sub, ratios, bands, categories, modalities, alpha, exec);
  std::map<GoalBand, std::set<std::string>> out;
  for (auto b : kAllBands) out[b];
  for (const auto& row : report.rows) out[row.band].insert(row.feature);
  return out;
}

namespace {

// Probabilities of one fitted setting on the evaluation rows.
struct Prediction {
  std::vector<int> labels;                // model label order
  std::vector<std::vector<double>> proba;  // one row per evaluation row
  std::vector<std::string> features;
};

class BandRunner {
 public:
  BandRunner(const ExperimentInput& input, const ExperimentConfig& config, GoalBand band)
      : input_(input), config_(config), band_(band) {}

  // Fits `setting` on train rows, predicts eval rows. Late fusion reuses
  // cached member predictions for the same split.
  std::optional<Prediction> run(Setting setting, int split, const std::vector<std::size_t>& train,
                                const std::vector<std::size_t>& eval, const std::set<std::string>& significant) {
    const auto key = std::make_pair(static_cast<int>(setting), split);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    std::optional<Prediction> out;
    if (setting == Setting::LateFusion) {
      std::vector<Prediction> members;
      for (Setting m : kLateFusionMembers) {
        if (auto p = run(m, split, train, eval, significant)) members.push_back(*p);
      }
      if (!members.empty()) {
        Prediction fused;
        fused.labels = members.front().labels;
        for (const auto& m : members) {
          if (m.labels != fused.labels) throw Error(Errc::LabelError, "late fusion label sets differ");
          fused.features.insert(fused.features.end(), m.features.begin(), m.features.end());
        }
        for (std::size_t r = 0; r < eval.size(); ++r) {
          std::vector<std::vector<double>> probas;
          for (const auto& m : members) probas.push_back(m.proba[r]);
          fused.proba.push_back(combine(probas, config_.combiner));
        }
        out = std::move(fused);
      }
    } else {
      const FeatureTable train_table = input_.features.select_rows(train);
      AssemblyPlan plan = plan_setting(setting, train_table, config_.mode, significant);
      if (!plan.columns.empty()) {
        std::vector<int> y;
        for (auto r : train) y.push_back(input_.data[r].label(config_.scheme));
        const forest::Matrix xtr = apply_plan(plan, train_table);
        forest::ForestConfig fc = config_.forest;
        fc.seed = derive_seed(derive_seed(config_.seed, static_cast<std::uint64_t>(band_) + 1),
                              static_cast<std::uint64_t>(setting) * 1024 + static_cast<std::uint64_t>(split + 1));
        const auto model = forest::RandomForest::fit(xtr, y, fc, config_.exec, plan.names());
        const forest::Matrix xev = apply_plan(plan, input_.features.select_rows(eval));
        const forest::Matrix p = model.predict_proba(xev, config_.exec);
        Prediction pred;
        pred.labels = model.labels();
        pred.features = plan.names();
        for (std::size_t r = 0; r < p.rows(); ++r) pred.proba.emplace_back(p.row(r).begin(), p.row(r).end());
        out = std::move(pred);
      }
    }
    cache_[key] = out;
    return out;
  }

 private:
  const ExperimentInput& input_;
  const ExperimentConfig& config_;
  GoalBand band_;
  std::map<std::pair<int, int>, std::optional<Prediction>> cache_;
};

std::vector<int> decide(const Prediction& p) {
  std::vector<int> out;
  out.reserve(p.proba.size());
  for (const auto& row : p.proba) out.push_back(p.labels[forest::argmax_lowest(row)]);
  return out;
}

metrics::Metrics weighted(const std::vector<std::pair<const metrics::Metrics*, double>>& parts) {
  metrics::Metrics out;
  double total = 0.0;
  for (const auto& [m, w] : parts) {
    out.accuracy += w * m->accuracy;
    out.precision += w * m->precision;
    out.recall += w * m->recall;
    out.f1 += w * m->f1;
    out.n += m->n;
    total += w;
  }
  if (total > 0.0) {
    out.accuracy /= total;
    out.precision /= total;
    out.recall /= total;
    out.f1 /= total;
  }
  return out;
}

std::string dataset_fingerprint(const std::vector<LabeledCampaign>& data) {
  std::uint64_t h = fnv1a64("");
  for (const auto& d : data) {
    h = fnv1a64(d.campaign.id, h);
    h = fnv1a64(format_double(d.ratio), h);
  }
  return hex64(h);
}

}  // namespace

ExperimentReport run_experiment(const ExperimentInput& input, const ExperimentConfig& config) {
  if (input.features.rows() != input.data.size()) {
    throw Error(Errc::ShapeError, "feature table and dataset differ in row count");
  }
  for (std::size_t i = 0; i < input.data.size(); ++i) {
    if (input.features.ids()[i] != input.data[i].campaign.id) {
      throw Error(Errc::ShapeError, "feature table row " + std::to_string(i) + " does not match dataset id");
    }
  }
  if (config.settings.empty()) throw Error(Errc::ConfigError, "no settings selected");

  std::vector<std::size_t> order(input.data.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](auto a, auto b) { return input.data[a].campaign.id < input.data[b].campaign.id; });
  ExperimentInput sorted;
  for (auto i : order) sorted.data.push_back(input.data[i]);
  sorted.features = input.features.select_rows(order);

  ExperimentReport report;
  report.meta = {{"seed", std::to_string(config.seed)},
                 {"config", config.describe()},
                 {"config_fingerprint", hex64(fnv1a64(config.describe()))},
                 {"dataset_fingerprint", dataset_fingerprint(sorted.data)},
                 {"campaigns", std::to_string(sorted.data.size())}};

  const bool screened = config.mode == AssemblyMode::Screened;
  std::map<GoalBand, std::vector<ReportRow>> by_band;
  for (GoalBand band : kAllBands) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < sorted.data.size(); ++i) {
      if (sorted.data[i].band == band) rows.push_back(i);
    }
    const std::string bname(band_name(band));
    if (rows.size() < config.min_band_size) {
      report.notes.push_back(bname + ": " + std::to_string(rows.size()) + " campaigns, below the minimum of " +
                             std::to_string(config.min_band_size) + "; band skipped");
      continue;
    }
    std::vector<int> y;
    for (auto r : rows) y.push_back(sorted.data[r].label(config.scheme));
    const auto split = metrics::stratified_holdout(y, config.test_fraction,
                                                   derive_seed(config.seed, 0x686f6c64ULL + static_cast<std::uint64_t>(band)));
    std::vector<std::size_t> train, test;
    for (auto i : split.train) train.push_back(rows[i]);
    for (auto i : split.test) test.push_back(rows[i]);
    std::vector<int> y_train, y_test;
    for (auto r : train) y_train.push_back(sorted.data[r].label(config.scheme));
    for (auto r : test) y_test.push_back(sorted.data[r].label(config.scheme));

    std::optional<metrics::Folds> folds;
    if (config.cv_folds >= 2) {
      try {
        folds = metrics::stratified_kfold(y_train, config.cv_folds,
                                          derive_seed(config.seed, 0x666f6c64ULL + static_cast<std::uint64_t>(band)));
        if (!folds->note.empty()) report.notes.push_back(bname + ": " + folds->note);
      } catch (const Error& e) {
        if (e.code() != Errc::InsufficientData) throw;
        report.notes.push_back(bname + ": cross-validation skipped (" + e.what() + ")");
      }
    }

    std::set<std::string> sig_holdout;
    std::vector<std::set<std::string>> sig_folds;
    std::vector<std::vector<std::size_t>> fold_train, fold_eval;
    if (folds) {
      for (std::size_t f = 0; f < folds->k; ++f) {
        std::vector<bool> held(train.size(), false);
        for (auto i : folds->folds[f]) held[i] = true;
        std::vector<std::size_t> tr, ev;
        for (std::size_t i = 0; i < train.size(); ++i) (held[i] ? ev : tr).push_back(train[i]);
        fold_train.push_back(std::move(tr));
        fold_eval.push_back(std::move(ev));
      }
    }
    if (screened) {
      sig_holdout = significant_by_band(sorted, train, config.alpha, config.exec)[band];
      for (const auto& tr : fold_train) {
        sig_folds.push_back(significant_by_band(sorted, tr, config.alpha, config.exec)[band]);
      }
    } else {
      sig_folds.assign(fold_train.size(), {});
    }

    const bool basic_only =
        std::find(config.basic_only_bands.begin(), config.basic_only_bands.end(), band) != config.basic_only_bands.end();
    BandRunner runner(sorted, config, band);
    for (Setting setting : config.settings) {
      if (basic_only && setting != Setting::Basic) continue;
      auto held = runner.run(setting, -1, train, test, sig_holdout);
      if (!held) {
        report.notes.push_back(bname + ": " + std::string(setting_name(setting)) +
                               " has no features after screening; setting skipped");
        continue;
      }
      ReportRow row;
      row.band = bname;
      row.setting = setting;
      row.n_train = train.size();
      row.n_test = test.size();
      row.held_out = metrics::compute_metrics(y_test, decide(*held));
      row.features = held->features;
      if (folds) {
        std::vector<int> truth, pred;
        bool complete = true;
        for (std::size_t f = 0; f < fold_train.size(); ++f) {
          auto p = runner.run(setting, static_cast<int>(f), fold_train[f], fold_eval[f], sig_folds[f]);
          if (!p) {
            complete = false;
            break;
          }
          auto d = decide(*p);
          pred.insert(pred.end(), d.begin(), d.end());
          for (auto r : fold_eval[f]) truth.push_back(sorted.data[r].label(config.scheme));
        }
        if (complete) {
          row.cv = metrics::compute_metrics(truth, pred);
        } else {
          report.notes.push_back(bname + ": " + std::string(setting_name(setting)) +
                                 " lost all features in a fold; no cross-validation metrics");
        }
      }
      by_band[band].push_back(row);
      report.rows.push_back(std::move(row));
    }
  }

  for (Setting setting : {Setting::Basic, Setting::EarlyFusionAll, Setting::LateFusion}) {
    if (std::find(config.settings.begin(), config.settings.end(), setting) == config.settings.end()) continue;
    std::vector<std::pair<const metrics::Metrics*, double>> held, cv;
    bool cv_complete = true;
    ReportRow total;
    total.band = "Total";
    total.setting = setting;
    for (const auto& [band, rows] : by_band) {
      const ReportRow* chosen = nullptr;
      const ReportRow* basic = nullptr;
      for (const auto& r : rows) {
        if (r.setting == setting) chosen = &r;
        if (r.setting == Setting::Basic) basic = &r;
      }
      if (!chosen && basic) {
        chosen = basic;
        if (setting != Setting::Basic) {
          report.notes.push_back("Total " + std::string(setting_name(setting)) + ": " +
                                 std::string(band_name(band)) + " contributes its Basic row");
        }
      }
      if (!chosen) continue;
      held.emplace_back(&chosen->held_out, static_cast<double>(chosen->n_test));
      if (chosen->cv) cv.emplace_back(&*chosen->cv, static_cast<double>(chosen->n_train));
      else cv_complete = false;
      total.n_train += chosen->n_train;
      total.n_test += chosen->n_test;
    }
    if (held.empty()) continue;
    total.held_out = weighted(held);
    if (cv_complete && !cv.empty()) total.cv = weighted(cv);
    report.totals.push_back(std::move(total));
  }
  return report;
}

std::string report_to_csv(const ExperimentReport& report) {
  std::string out;
  for (const auto& [k, v] : report.meta) out += "# " + k + "=" + v + "\n";
  out += "goal_band,setting,n_train,n_test,accuracy,precision,recall,f1,cv_accuracy,cv_precision,cv_recall,cv_f1,"
         "n_features\n";
  auto emit = [&](const ReportRow& r) {
    auto f = [](double v) { return format_fixed(v, 4); };
    csv::Row row{r.band, std::string(setting_name(r.setting)), std::to_string(r.n_train), std::to_string(r.n_test),
                 f(r.held_out.accuracy), f(r.held_out.precision), f(r.held_out.recall), f(r.held_out.f1)};
    if (r.cv) {
      for (double v : {r.cv->accuracy, r.cv->precision, r.cv->recall, r.cv->f1}) row.push_back(f(v));
    } else {
      row.insert(row.end(), 4, "");
    }
    row.push_back(r.band == "Total" ? "" : std::to_string(r.features.size()));
    out += csv::join(row) + "\n";
  };
  for (const auto& r : report.rows) emit(r);
  for (const auto& r : report.totals) emit(r);
  return out;
}

namespace {

json metrics_json(const metrics::Metrics& m) {
  json j{{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"n", m.n}};
  json classes = json::array();
  for (const auto& c : m.per_class) {
    classes.push_back({{"label", c.label},
                       {"precision", c.precision},
                       {"recall", c.recall},
                       {"f1", c.f1},
                       {"support", c.support},
                       {"predicted", c.predicted},
                       {"precision_undefined", c.precision_undefined}});
  }
  if (!classes.empty()) j["per_class"] = classes;
  return j;
}

json row_json(const ReportRow& r) {
  json j{{"goal_band", r.band},
         {"setting", setting_name(r.setting)},
         {"n_train", r.n_train},
         {"n_test", r.n_test},
         {"held_out", metrics_json(r.held_out)}};
  if (r.cv) j["cv"] = metrics_json(*r.cv);
  if (r.band != "Total") j["features"] = r.features;
  return j;
}

}  // namespace

std::string report_to_json(const ExperimentReport& report) {
  json meta = json::object();
  for (const auto& [k, v] : report.meta) meta[k] = v;
  json rows = json::array(), totals = json::array();
  for (const auto& r : report.rows) rows.push_back(row_json(r));
  for (const auto& r : report.totals) totals.push_back(row_json(r));
  json j{{"_meta", meta}, {"rows", rows}, {"totals", totals}, {"notes", report.notes}};
  return j.dump(2) + "\n";
}

std::vector<HistogramBin> histogram(std::span<const double> values, double lo, double hi, std::size_t bins) {
  if (bins == 0 || !(hi > lo)) throw Error(Errc::ConfigError, "histogram needs bins > 0 and hi > lo");
  std::vector<HistogramBin> out(bins);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].left = lo + width * static_cast<double>(b);
    out[b].right = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
  }
  for (double v : values) {
    if (std::isnan(v) || v < lo || v > hi) continue;
    auto b = static_cast<std::size_t>((v - lo) / width);
    if (b >= bins) b = bins - 1;
    // Guard against rounding putting a boundary value one bin too high.
    if (b > 0 && v < out[b].left) --b;
    out[b].count++;
  }
  return out;
}

std::string histogram_to_csv(const std::vector<HistogramBin>& bins, const std::vector<std::string>& header_lines) {
  std::string out;
  for (const auto& h : header_lines) out += "# " + h + "\n";
  out += "bin_left,bin_right,count\n";
  for (const auto& b : bins) {
    out += format_double(b.left) + "," + format_double(b.right) + "," + std::to_string(b.count) + "\n";
  }
  return out;
}

}  // namespace fundscope::experiment
