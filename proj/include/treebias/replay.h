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

#ifndef TREEBIAS_REPLAY_H_
#define TREEBIAS_REPLAY_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "treebias/biased_model.h"

namespace treebias {

// One utterance of recorded model posteriors. Each line of a replay file
// is a JSON object:
//   {"id": "u1", "steps": [[p_0, ..., p_{V-1}(, p_null)], ...],
//    "states": [[...], ...], "biasing": ["word", ...], "ref": "words"}
// "states", "biasing" and "ref" are optional. A step one entry wider than
// the vocabulary carries the transducer blank last.
struct ReplayUtterance {
  std::string id;
  std::vector<std::vector<double>> steps;
  std::vector<std::vector<double>> states;
  std::optional<std::vector<std::string>> biasing;
  std::optional<std::string> ref;
};

std::vector<ReplayUtterance> LoadReplay(const std::filesystem::path& path, int vocab_size);

// Feeds recorded distributions instead of running the base model. The
// decoder state is the recorded one or zeros.
class ReplaySource : public PosteriorSource {
 public:
  ReplaySource(const ReplayUtterance& utt, int vocab_size, int state_dim);

  int num_steps() const override { return static_cast<int>(utt_.steps.size()); }
  int output_size() const override { return width_; }
  bool has_null() const override { return width_ == vocab_size_ + 1; }
  Var InitialCarry(Tape& tape) const override;
  Output Step(Tape& tape, ParamStore& params, const Var& carry, int prev_token,
              int t) const override;

 private:
  const ReplayUtterance& utt_;
  int vocab_size_;
  int state_dim_;
  int width_;
};

}  // namespace treebias

#endif  // TREEBIAS_REPLAY_H_
