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

#include "fundscope/dataset.hpp"
#include "fundscope/experiment.hpp"
#include "fundscope/synth.hpp"

namespace testing {

// Labelled rows plus basic and generated features, as the CLI assembles them.
inline fundscope::experiment::ExperimentInput experiment_input(const fundscope::synth::SyntheticDataset& d,
                                                               const fundscope::CategoryRegistry& registry) {
  using namespace fundscope;
  experiment::ExperimentInput in;
  in.data = label_campaigns(d.campaigns);
  std::vector<std::string> ids;
  for (const auto& c : d.campaigns) ids.push_back(c.id);
  in.features = FeatureTable::from_vectors(ids, experiment::basic_features(d.campaigns, registry));
  in.features.merge(d.features);
  return in;
}

}  // namespace testing
