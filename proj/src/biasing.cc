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

#include "treebias/biasing.h"

#include <algorithm>
#include <iterator>
#include <mutex>
#include <unordered_set>

#include "spdlog/spdlog.h"
#include "treebias/errors.h"

namespace treebias {

std::vector<std::string> BuildBiasingList(const std::vector<std::string>& reference,
                                          const BiasingSpec& spec, std::mt19937_64& rng) {
  if (spec.n_distractors < 0) throw DomainError("n_distractors must be non-negative");
  const std::unordered_set<std::string> rare(spec.full_rare_list.begin(),
                                             spec.full_rare_list.end());
  std::vector<std::string> list;
  std::unordered_set<std::string> taken;
  for (const std::string& w : reference) {
    if (rare.count(w) && taken.insert(w).second) list.push_back(w);
  }
  std::vector<std::string> pool;
  std::unordered_set<std::string> pooled;
  for (const std::string& w : spec.full_rare_list) {
    if (!taken.count(w) && pooled.insert(w).second) pool.push_back(w);
  }
  if (static_cast<size_t>(spec.n_distractors) >= pool.size()) {
    if (static_cast<size_t>(spec.n_distractors) > pool.size()) {
      static std::once_flag once;
      std::call_once(once, [&] {
        spdlog::warn("{} distractors requested but only {} words remain; using all of them",
                     spec.n_distractors, pool.size());
      });
    }
    list.insert(list.end(), pool.begin(), pool.end());
    return list;
  }
  std::sample(pool.begin(), pool.end(), std::back_inserter(list), spec.n_distractors, rng);
  return list;
}

std::vector<std::string> DropForTraining(const std::vector<std::string>& list,
                                         const std::vector<std::string>& reference,
                                         double p_drop, std::mt19937_64& rng) {
  if (!(p_drop >= 0.0 && p_drop <= 1.0)) throw DomainError("p_drop must lie in [0, 1]");
  const std::unordered_set<std::string> ref(reference.begin(), reference.end());
  std::bernoulli_distribution drop(p_drop);
  std::vector<std::string> out;
  for (const std::string& w : list) {
    if (ref.count(w) && drop(rng)) continue;
    out.push_back(w);
  }
  return out;
}

}  // namespace treebias
