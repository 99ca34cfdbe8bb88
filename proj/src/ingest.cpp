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


#include "fundscope/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

namespace fundscope {

using nlohmann::json;

std::string_view reason_name(RejectReason reason) noexcept {
  switch (reason) {
    case RejectReason::Malformed: return "Malformed";
    case RejectReason::InvalidGoal: return "InvalidGoal";
    case RejectReason::InvalidAmount: return "InvalidAmount";
    case RejectReason::InvalidDate: return "InvalidDate";
    case RejectReason::UnknownCategory: return "UnknownCategory";
    case RejectReason::NonUS: return "NonUS";
    case RejectReason::GoalOutOfRange: return "GoalOutOfRange";
    case RejectReason::RatioAboveMax: return "RatioAboveMax";
  }
  return "?";
}

std::size_t IngestReport::count(RejectReason reason) const noexcept {
  return static_cast<std::size_t>(std::count_if(
      rejected.begin(), rejected.end(), [&](const Rejection& r) { return r.reason == reason; }));
}

namespace {

struct Reject {
  RejectReason reason;
  std::string detail;
};

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Reject{RejectReason::Malformed, std::string("missing key '") + key + "'"};
  return *it;
}

std::string require_string(const json& obj, const char* key) {
  const json& v = require(obj, key);
  if (!v.is_string()) throw Reject{RejectReason::Malformed, std::string("'") + key + "' must be a string"};
  return v.get<std::string>();
}

double require_number(const json& obj, const char* key, RejectReason on_bad) {
  const json& v = require(obj, key);
  if (!v.is_number()) throw Reject{on_bad, std::string("'") + key + "' must be a number"};
  return v.get<double>();
}

std::int64_t require_count(const json& obj, const char* key) {
  const json& v = require(obj, key);
  if (v.is_number_integer()) {
    auto n = v.get<std::int64_t>();
    if (n < 0) throw Reject{RejectReason::InvalidAmount, std::string("'") + key + "' is negative"};
    return n;
  }
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d)) {
      if (d < 0) throw Reject{RejectReason::InvalidAmount, std::string("'") + key + "' is negative"};
      return static_cast<std::int64_t>(d);
    }
  }
  throw Reject{RejectReason::Malformed, std::string("'") + key + "' must be a non-negative integer"};
}

Campaign parse_record(std::string_view line, const CategoryRegistry& registry) {
  json obj = json::parse(line.begin(), line.end(), nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) throw Reject{RejectReason::Malformed, "not a JSON object"};

  Campaign c;
  c.id = require_string(obj, "id");
  if (c.id.empty()) throw Reject{RejectReason::Malformed, "empty id"};
  c.country = require_string(obj, "country");
  c.city = require_string(obj, "city");
  c.state = require_string(obj, "state");
  c.title = require_string(obj, "title");
  c.description = require_string(obj, "description");
  const std::string date_text = require_string(obj, "launch_date");
  const std::string category = require_string(obj, "category");
  c.goal_amount = require_number(obj, "goal_amount", RejectReason::InvalidGoal);
  c.raised_amount = require_number(obj, "raised_amount", RejectReason::InvalidAmount);
  c.num_followers = require_count(obj, "num_followers");
  c.num_shares = require_count(obj, "num_shares");
  c.num_donors = require_count(obj, "num_donors");
  if (auto it = obj.find("cover_image"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw Reject{RejectReason::Malformed, "'cover_image' must be a string"};
    if (!it->get<std::string>().empty()) c.cover_image = it->get<std::string>();
  }

  if (c.country != "US") throw Reject{RejectReason::NonUS, "country '" + c.country + "'"};
  if (c.state.size() != 2 || !std::all_of(c.state.begin(), c.state.end(), [](char ch) {
        return (ch >= 'A' && ch <= 'Z') || (ch >= 'a' && ch <= 'z');
      })) {
    throw Reject{RejectReason::Malformed, "state must be a 2-letter code"};
  }
  for (char& ch : c.state) {
    if (ch >= 'a' && ch <= 'z') ch = static_cast<char>(ch - 'a' + 'A');
  }
  if (!std::isfinite(c.goal_amount) || c.goal_amount <= 0.0) {
    throw Reject{RejectReason::InvalidGoal, "goal_amount must be > 0"};
  }
  if (!std::isfinite(c.raised_amount) || c.raised_amount < 0.0) {
    throw Reject{RejectReason::InvalidAmount, "raised_amount must be >= 0"};
  }
  auto idx = registry.index_of(category);
  if (!idx) throw Reject{RejectReason::UnknownCategory, "category '" + category + "'"};
  c.category = CategoryId{*idx, category};
  try {
    c.launch_date = parse_iso_date(date_text);
  } catch (const Error& e) {
    throw Reject{RejectReason::InvalidDate, e.what()};
  }

  if (!assign_goal_band(c.goal_amount)) {
    throw Reject{RejectReason::GoalOutOfRange, "goal above 100000"};
  }
  if (!assign_success_class(compute_ratio(c.raised_amount, c.goal_amount))) {
    throw Reject{RejectReason::RatioAboveMax, "ratio above 2.5"};
  }
  validate(c, registry);
  return c;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](char ch) { return ch == ' ' || ch == '\t' || ch == '\r'; });
}

}  // namespace

ParsedLine parse_campaign_line(std::string_view line, std::size_t line_no,
                               const CategoryRegistry& registry) {
  ParsedLine out;
  try {
    out.campaign = parse_record(line, registry);
  } catch (const Reject& r) {
    out.rejection = Rejection{line_no, r.reason, r.detail};
  } catch (const Error& e) {
    out.rejection = Rejection{line_no, RejectReason::Malformed, e.what()};
  }
  return out;
}

IngestResult parse_campaigns(std::string_view content, const CategoryRegistry& registry,
                             Execution exec) {
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  std::size_t pos = 0, line_no = 0;
  while (pos <= content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    ++line_no;
    std::string_view line = content.substr(pos, end - pos);
    if (!is_blank(line)) lines.emplace_back(line_no, line);
    pos = end + 1;
  }

  std::vector<ParsedLine> parsed(lines.size());
  const auto n = static_cast<std::ptrdiff_t>(lines.size());
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      parsed[i] = parse_campaign_line(lines[i].second, lines[i].first, registry);
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      parsed[i] = parse_campaign_line(lines[i].second, lines[i].first, registry);
    }
  }

  IngestResult result;
  result.report.total_records = parsed.size();
  for (auto& p : parsed) {
    if (p.campaign) {
      result.campaigns.push_back(std::move(*p.campaign));
      continue;
    }
    switch (p.rejection->reason) {
      case RejectReason::NonUS: ++result.report.non_us; break;
      case RejectReason::GoalOutOfRange: ++result.report.out_of_band; break;
      case RejectReason::RatioAboveMax: ++result.report.dropped_ratio_gt_2_5; break;
      default: break;
    }
    result.report.rejected.push_back(std::move(*p.rejection));
  }
  result.report.accepted = result.campaigns.size();
  if (result.campaigns.empty()) throw Error(Errc::EmptyDataset, "no campaign records accepted");
  return result;
}

IngestResult load_campaigns(const std::filesystem::path& path, const CategoryRegistry& registry,
                            Execution exec) {
  const std::string content = read_file(path);
  return parse_campaigns(content, registry, exec);
}

std::string campaign_to_json(const Campaign& c) {
  json obj;
  obj["id"] = c.id;
  obj["launch_date"] = c.launch_date.iso();
  obj["city"] = c.city;
  obj["state"] = c.state;
  obj["country"] = c.country;
  obj["title"] = c.title;
  obj["description"] = c.description;
  obj["category"] = c.category.label;
  obj["goal_amount"] = c.goal_amount;
  obj["raised_amount"] = c.raised_amount;
  obj["num_followers"] = c.num_followers;
  obj["num_shares"] = c.num_shares;
  obj["num_donors"] = c.num_donors;
  if (c.cover_image) obj["cover_image"] = *c.cover_image;
  return obj.dump();
}

std::string normalize_location_key(std::string_view city, std::string_view state) {
  auto norm = [](std::string_view s) {
    std::string out;
    bool pending_space = false;
    for (char ch : trim(s)) {
      if (ch == ' ' || ch == '\t') {
        pending_space = true;
        continue;
      }
      if (pending_space && !out.empty()) out += ' ';
      pending_space = false;
      out += ch;
    }
    return to_lower_ascii(out);
  };
  return norm(city) + "|" + norm(state);
}

PopulationTable::PopulationTable(std::map<std::string, std::int64_t> entries, std::string year_tag)
    : entries_(std::move(entries)), year_tag_(std::move(year_tag)) {
  for (const auto& [key, pop] : entries_) {
    if (pop <= 0) throw Error(Errc::RangeError, "population must be positive for " + key);
  }
}

std::optional<std::int64_t> PopulationTable::lookup(std::string_view city,
                                                    std::string_view state) const {
  auto it = entries_.find(normalize_location_key(city, state));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

double PopulationTable::median_population() const {
  if (entries_.empty()) throw Error(Errc::EmptyDataset, "population table is empty");
  std::vector<double> v;
  v.reserve(entries_.size());
  for (const auto& [key, pop] : entries_) v.push_back(static_cast<double>(pop));
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

PopulationTable load_population_table(const std::filesystem::path& path, std::string year_tag) {
  csv::Table t = csv::read(path);
  const std::size_t ci = t.column("city");
  const std::size_t si = t.column("state");
  const std::size_t pi = t.column("population");
  std::map<std::string, std::int64_t> entries;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    if (row.size() <= std::max({ci, si, pi})) {
      throw Error(Errc::SchemaError, "short row at line " + std::to_string(t.line_numbers[r]));
    }
    const std::string text = trim(row[pi]);
    std::size_t used = 0;
    long long pop = 0;
    try {
      pop = std::stoll(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (text.empty() || used != text.size()) {
      throw Error(Errc::ParseError, "non-numeric population '" + row[pi] + "' at line " +
                                        std::to_string(t.line_numbers[r]));
    }
    if (pop <= 0) {
      throw Error(Errc::RangeError, "population must be positive at line " +
                                        std::to_string(t.line_numbers[r]));
    }
    auto key = normalize_location_key(row[ci], row[si]);
    auto [it, inserted] = entries.emplace(key, pop);
    if (!inserted) it->second = std::max<std::int64_t>(it->second, pop);
  }
  return PopulationTable(std::move(entries), std::move(year_tag));
}

std::vector<FeatureVector> join_population(const std::vector<Campaign>& campaigns,
                                           const PopulationTable& table) {
  std::vector<FeatureVector> out(campaigns.size());
  for (std::size_t i = 0; i < campaigns.size(); ++i) {
    auto pop = table.lookup(campaigns[i].city, campaigns[i].state);
    if (pop) out[i].add(std::string(kPopulationFeature), static_cast<double>(*pop), Modality::Population);
    out[i].add(std::string(kPopulationMissing), pop ? 0.0 : 1.0, Modality::Population);
  }
  return out;
}

}  // namespace fundscope
