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


#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fundscope/experiment.hpp"
#include "fundscope/forest.hpp"

namespace fundscope::cli {

// Effective settings of one command: the INI file overlaid with flags.
struct RunConfig {
  std::filesystem::path config_dir;  // relative paths in the file resolve here
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = "out";
  int jobs = 0;

  std::filesystem::path campaigns;
  std::filesystem::path dataset;  // defaults to <out>/dataset.jsonl
  std::filesystem::path categories;
  std::filesystem::path census;
  std::string census_year = "2018";
  std::filesystem::path lexicon;
  std::filesystem::path quality;
  std::filesystem::path images;
  std::filesystem::path faces;

  std::string quality_provider = "none";  // precomputed | builtin | none
  std::string face_provider = "none";     // stub | remote | none
  std::string face_url;
  int face_concurrency = 4;

  experiment::ExperimentConfig experiment;

  std::filesystem::path dataset_path() const { return dataset.empty() ? out / "dataset.jsonl" : dataset; }
  // Canonical text of every setting; hashed into output headers.
  std::string describe() const;
  std::string fingerprint() const;
};

// Reads an INI file ([run] [paths] [providers] [forest] [experiment]).
// Unknown sections or keys and malformed values raise Errc::ConfigError.
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace fundscope::cli
