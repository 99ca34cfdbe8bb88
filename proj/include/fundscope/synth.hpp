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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fundscope/core.hpp"
#include "fundscope/features.hpp"
#include "fundscope/image.hpp"
#include "fundscope/ingest.hpp"
#include "fundscope/text.hpp"

namespace fundscope::synth {

struct CellSpec {
  GoalBand band = GoalBand::B1;
  std::string category;
  std::size_t n = 0;
};

// Linear effect on the success ratio: slope times the feature standardized
// within its cell, plus Gaussian noise with the given sigma. An empty band or
// category applies the effect to every cell.
struct EffectSpec {
  std::string feature;
  double slope = 0.0;
  double sigma = 0.0;
  std::optional<GoalBand> band;
  std::string category;
};

// Adds +amplitude when exactly one of the two features lies above its cell
// median, -amplitude otherwise.
struct InteractionSpec {
  std::string text_feature;
  std::string image_feature;
  double amplitude = 0.0;
};

struct SyntheticSpec {
  std::vector<CellSpec> cells;
  std::vector<EffectSpec> effects;
  std::vector<InteractionSpec> interactions;
  double intercept = 1.25;
  double noise_sigma = 0.0;
  double image_rate = 0.8;       // share of campaigns with a cover image
  double face_rate = 0.6;        // share of cover images showing faces
  double population_rate = 0.9;  // share of campaigns in a census city
  std::vector<std::string> states{"CA", "FL", "IL", "NY", "OH", "PA", "TX", "WA"};
  int cities_per_state = 6;
  int min_words = 40;
  int max_words = 120;
};

// Throws Errc::SpecError on malformed or inconsistent input.
SyntheticSpec parse_spec(std::string_view json_text, const CategoryRegistry& registry);
SyntheticSpec load_spec(const std::filesystem::path& path, const CategoryRegistry& registry);

struct CensusRow {
  std::string city;
  std::string state;
  std::int64_t population = 0;
};

struct SyntheticDataset {
  std::vector<Campaign> campaigns;
  std::vector<CensusRow> census;
  std::map<std::string, image::ImageQuality> quality;                // by image ref
  std::map<std::string, std::vector<image::FaceAttributes>> faces;  // by image ref
  FeatureTable features;  // every generated feature, rows in campaign order
  std::vector<double> ratios;
  std::string manifest;  // JSON: seed, spec, planted effects, cell counts
};

// Campaign text is built from lexicon words plus neutral filler, features are
// extracted with the regular pipeline code, and the ratio is
// clip(intercept + effects + interactions + noise, 0, 2.5). Errc::SpecError
// when an effect names a feature the generator does not produce.
SyntheticDataset generate_synthetic(const SyntheticSpec& spec, const text::Lexicon& lexicon,
                                    const CategoryRegistry& registry, std::uint64_t seed);

// Writes campaigns.jsonl, census.csv, quality.csv, faces/<ref>.faces.json,
// lexicon.dic, manifest.json and a run.ini pointing at them.
void write_synthetic(const SyntheticDataset& data, const std::filesystem::path& dir,
                     std::string_view lexicon_text, std::uint64_t seed);

}  // namespace fundscope::synth
