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

#include <filesystem>
#include <string>
#include <vector>

#include "fundscope/core.hpp"
#include "fundscope/ingest.hpp"

namespace fundscope {

// An accepted campaign with its outcome attached.
struct LabeledCampaign {
  Campaign campaign;
  double ratio = 0.0;
  GoalBand band = GoalBand::B1;
  SuccessClass four_class = SuccessClass::HighlyUnsuccessful;
  SuccessClass two_class = SuccessClass::HighlyUnsuccessful;

  int label(TargetScheme scheme) const noexcept {
    return static_cast<int>(scheme == TargetScheme::TwoClass ? two_class : four_class);
  }
};

// Attaches ratio, band and classes; campaigns must already be validated.
std::vector<LabeledCampaign> label_campaigns(const std::vector<Campaign>& campaigns);

// Canonical dataset: JSON lines, the first holding {"_meta": {...}}, each
// other line a campaign plus ratio, goal_band, success_class, binary_class.
std::string dataset_to_jsonl(const std::vector<LabeledCampaign>& data,
                             const std::vector<std::pair<std::string, std::string>>& meta);
std::vector<LabeledCampaign> dataset_from_jsonl(std::string_view content, const CategoryRegistry& registry);

std::vector<Campaign> campaigns_of(const std::vector<LabeledCampaign>& data);

}  // namespace fundscope
