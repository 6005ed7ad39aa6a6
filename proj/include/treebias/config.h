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

#ifndef TREEBIAS_CONFIG_H_
#define TREEBIAS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "treebias/beam_search.h"
#include "treebias/biased_model.h"
#include "treebias/synth.h"
#include "treebias/train.h"

namespace treebias {

// Data paths for the train / decode commands. Relative paths are resolved
// against the config file's directory.
struct DataPaths {
  std::filesystem::path vocab;
  std::filesystem::path rare_list;
  std::filesystem::path oov_list;
  std::filesystem::path train;
  std::filesystem::path train_frames;
  std::filesystem::path test;
  std::filesystem::path test_frames;
};

struct ModelSection {
  int embedding_dim = 16;
  int hidden_dim = 32;
  int frame_dim = 8;
  // Observation classes; simulate takes it from the corpus.
  int num_classes = 0;
};

struct BlmdSection {
  BlmdForm form = BlmdForm::kConsistent;
  double add_k = 0.1;
  // Candidate exponents searched on the dev split.
  std::vector<double> a1 = {0.0};
  std::vector<double> b1 = {0.0};
  std::vector<double> a2 = {0.0};
  std::vector<double> b2 = {0.0};
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  DataPaths data;
  ModelSection model;
  EncoderConfig gnn;
  // The train command adds a pointer generator on top of the baseline.
  bool tcpgen = true;
  int attention_dim = 16;
  bool ool_value_in_output = true;
  TrainConfig train;
  // Epochs of the plain baseline.
  int baseline_epochs = 3;
  // Pointer variants start from the baseline's initial values and train
  // jointly, instead of continuing from the trained baseline.
  bool from_scratch = false;
  DecodeConfig decode;
  std::vector<DecodeMode> modes = {DecodeMode::kPlain, DecodeMode::kTcpgen, DecodeMode::kBlmd};
  int n_distractors = 100;
  BlmdSection blmd;
  SynthConfig corpus;
  std::vector<EncoderVariant> variants;
  // Decoding threads; 0 leaves the OpenMP default.
  int threads = 0;

  nlohmann::json ToJson() const;
  // SHA-256 of the canonical JSON form.
  std::string Hash() const;
};

// Parses a TOML config. Throws FormatError on syntax or type errors and
// when the seed is missing.
ExperimentConfig LoadConfig(const std::filesystem::path& path);
ExperimentConfig ParseConfig(const std::string& text, const std::filesystem::path& base_dir);

// Checks that the data paths named in `required` exist.
void RequirePaths(const ExperimentConfig& cfg, const std::vector<std::string>& required);

}  // namespace treebias

#endif  // TREEBIAS_CONFIG_H_
