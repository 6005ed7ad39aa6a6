// Copyright (c) 2026 The treebias Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TREEBIAS_BIASING_H_
#define TREEBIAS_BIASING_H_

#include <random>
#include <string>
#include <vector>

namespace treebias {

struct BiasingSpec {
  std::vector<std::string> full_rare_list;
  int n_distractors = 100;
};

// Reference words found in the full rare list (first occurrence order),
// followed by n_distractors words drawn uniformly without replacement from
// the rest of the list. A short pool is taken whole.
std::vector<std::string> BuildBiasingList(const std::vector<std::string>& reference,
                                          const BiasingSpec& spec, std::mt19937_64& rng);

// Removes each list word that occurs in the reference independently with
// probability p_drop. Other words are kept.
std::vector<std::string> DropForTraining(const std::vector<std::string>& list,
                                         const std::vector<std::string>& reference,
                                         double p_drop, std::mt19937_64& rng);

}  // namespace treebias

#endif  // TREEBIAS_BIASING_H_
