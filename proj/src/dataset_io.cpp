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


#include <cmath>
#include <json.hpp>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "fundscope/dataset.hpp"
#include "fundscope/error.hpp"
#include "fundscope/features.hpp"
#include "fundscope/util.hpp"

namespace fundscope {

using nlohmann::json;

// ---------------------------------------------------------------------------
// FeatureTable

FeatureTable FeatureTable::from_vectors(std::vector<std::string> ids,
                                        const std::vector<FeatureVector>& rows) {
  if (ids.size() != rows.size()) throw Error(Errc::ShapeError, "ids and feature rows differ in length");
  FeatureTable t(std::move(ids));
  std::unordered_map<std::string, std::size_t> index;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& f : rows[r].features()) {
      auto [it, inserted] = index.emplace(f.name, t.columns_.size());
      if (inserted) t.columns_.push_back({f.name, f.modality, std::vector<double>(rows.size(), nan)});
      t.columns_[it->second].values[r] = f.value;
    }
  }
  return t;
}

std::optional<std::size_t> FeatureTable::find(std::string_view name) const noexcept {
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].name == name) return j;
  }
  return std::nullopt;
}

void FeatureTable::add_column(FeatureColumn column) {
  if (column.values.size() != ids_.size()) throw Error(Errc::ShapeError, "column length mismatch");
  if (find(column.name)) throw Error(Errc::SchemaError, "duplicate column '" + column.name + "'");
  columns_.push_back(std::move(column));
}

void FeatureTable::merge(const FeatureTable& other) {
  if (other.ids_ != ids_) throw Error(Errc::ShapeError, "feature tables are not row-aligned by id");
  for (const auto& c : other.columns_) add_column(c);
}

FeatureTable FeatureTable::select_rows(const std::vector<std::size_t>& rows) const {
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (auto r : rows) ids.push_back(ids_.at(r));
  FeatureTable t(std::move(ids));
  for (const auto& c : columns_) {
    FeatureColumn col{c.name, c.modality, {}};
    col.values.reserve(rows.size());
    for (auto r : rows) col.values.push_back(c.values[r]);
    t.columns_.push_back(std::move(col));
  }
  return t;
}

FeatureTable FeatureTable::select_modalities(const std::vector<Modality>& modalities) const {
  FeatureTable t(ids_);
  for (const auto& c : columns_) {
    for (Modality m : modalities) {
      if (c.modality == m) {
        t.columns_.push_back(c);
        break;
      }
    }
  }
  return t;
}

FeatureTable FeatureTable::select_columns(const std::vector<std::string>& names) const {
  FeatureTable t(ids_);
  for (const auto& n : names) {
    auto j = find(n);
    if (!j) throw Error(Errc::SchemaError, "unknown feature '" + n + "'");
    t.columns_.push_back(columns_[*j]);
  }
  return t;
}

FeatureVector FeatureTable::row_vector(std::size_t row) const {
  FeatureVector fv;
  for (const auto& c : columns_) {
    if (!std::isnan(c.values.at(row))) fv.add(c.name, c.values[row], c.modality);
  }
  return fv;
}

std::string feature_table_to_csv(const FeatureTable& table, const std::vector<std::string>& header_lines) {
  std::string out;
  for (const auto& h : header_lines) out += "# " + h + "\n";
  out += "# modality:";
  for (const auto& c : table.columns()) out += "," + std::string(modality_name(c.modality));
  out += "\n";
  csv::Row header{"id"};
  for (const auto& c : table.columns()) header.push_back(c.name);
  out += csv::join(header) + "\n";
  for (std::size_t r = 0; r < table.rows(); ++r) {
    csv::Row row{table.ids()[r]};
    for (const auto& c : table.columns()) row.push_back(std::isnan(c.values[r]) ? "" : format_double(c.values[r]));
    out += csv::join(row) + "\n";
  }
  return out;
}

FeatureTable feature_table_from_csv(std::string_view content) {
  std::istringstream in{std::string(content)};
  std::string line;
  std::vector<Modality> modalities;
  bool have_modalities = false;
  csv::Row header;
  std::vector<std::string> ids;
  std::vector<std::vector<double>> cols;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# modality:", 0) == 0) {
      auto fields = csv::parse_line(line.substr(std::string("# modality:").size()));
      for (std::size_t k = 1; k < fields.size(); ++k) {
        auto m = parse_modality(fields[k]);
        if (!m) throw Error(Errc::SchemaError, "unknown modality '" + fields[k] + "'");
        modalities.push_back(*m);
      }
      have_modalities = true;
      continue;
    }
    if (line[0] == '#') continue;
    auto row = csv::parse_line(line);
    if (header.empty()) {
      header = row;
      if (header.empty() || header[0] != "id") throw Error(Errc::SchemaError, "feature CSV must start with 'id'");
      if (!have_modalities || modalities.size() != header.size() - 1) {
        throw Error(Errc::SchemaError, "feature CSV lacks a matching '# modality:' line");
      }
      cols.resize(header.size() - 1);
      continue;
    }
    if (row.size() != header.size()) {
      throw Error(Errc::SchemaError, "feature CSV line " + std::to_string(line_no) + " has " +
                                         std::to_string(row.size()) + " fields");
    }
    ids.push_back(row[0]);
    for (std::size_t k = 1; k < row.size(); ++k) {
      if (row[k].empty()) {
        cols[k - 1].push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        char* end = nullptr;
        const double v = std::strtod(row[k].c_str(), &end);
        if (end != row[k].c_str() + row[k].size()) {
          throw Error(Errc::ParseError, "bad number '" + row[k] + "' at line " + std::to_string(line_no));
        }
        cols[k - 1].push_back(v);
      }
    }
  }
  if (header.empty()) throw Error(Errc::SchemaError, "feature CSV has no header");
  FeatureTable t(std::move(ids));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    t.add_column({header[k + 1], modalities[k], std::move(cols[k])});
  }
  return t;
}

// ---------------------------------------------------------------------------
// Canonical dataset

std::vector<LabeledCampaign> label_campaigns(const std::vector<Campaign>& campaigns) {
  std::vector<LabeledCampaign> out;
  out.reserve(campaigns.size());
  for (const auto& c : campaigns) {
    LabeledCampaign lc;
    lc.campaign = c;
    lc.ratio = compute_ratio(c.raised_amount, c.goal_amount);
    auto band = assign_goal_band(c.goal_amount);
    auto four = assign_success_class(lc.ratio);
    auto two = assign_binary_class(lc.ratio);
    if (!band || !four || !two) {
      throw Error(Errc::RangeError, "campaign " + c.id + " lies outside the analysed range");
    }
    lc.band = *band;
    lc.four_class = *four;
    lc.two_class = *two;
    out.push_back(std::move(lc));
  }
  return out;
}

std::string dataset_to_jsonl(const std::vector<LabeledCampaign>& data,
                             const std::vector<std::pair<std::string, std::string>>& meta) {
  json m = json::object();
  for (const auto& [k, v] : meta) m[k] = v;
  std::string out = json{{"_meta", m}}.dump() + "\n";
  for (const auto& lc : data) {
    json obj = json::parse(campaign_to_json(lc.campaign));
    obj["ratio"] = lc.ratio;
    obj["goal_band"] = band_name(lc.band);
    obj["success_class"] = static_cast<int>(lc.four_class);
    obj["binary_class"] = static_cast<int>(lc.two_class);
    out += obj.dump() + "\n";
  }
  return out;
}

std::vector<LabeledCampaign> dataset_from_jsonl(std::string_view content, const CategoryRegistry& registry) {
  std::vector<Campaign> campaigns;
  std::size_t pos = 0, line_no = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    ++line_no;
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    if (trim(line).empty()) continue;
    if (line.find("\"_meta\"") != std::string_view::npos && line.rfind("{\"_meta\"", 0) == 0) continue;
    auto parsed = parse_campaign_line(line, line_no, registry);
    if (!parsed.campaign) {
      throw Error(Errc::SchemaError, "dataset line " + std::to_string(line_no) + ": " +
                                         std::string(reason_name(parsed.rejection->reason)) + " " +
                                         parsed.rejection->detail);
    }
    campaigns.push_back(std::move(*parsed.campaign));
  }
  if (campaigns.empty()) throw Error(Errc::EmptyDataset, "dataset has no campaigns");
  return label_campaigns(campaigns);
}

std::vector<Campaign> campaigns_of(const std::vector<LabeledCampaign>& data) {
  std::vector<Campaign> out;
  out.reserve(data.size());
  for (const auto& d : data) out.push_back(d.campaign);
  return out;
}

}  // namespace fundscope
