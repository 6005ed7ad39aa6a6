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

#ifndef TREEBIAS_EXPERIMENT_H_
#define TREEBIAS_EXPERIMENT_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "treebias/beam_search.h"
#include "treebias/config.h"
#include "treebias/eval.h"
#include "treebias/synth.h"
#include "treebias/train.h"

namespace treebias {

nlohmann::json ModelConfigToJson(const BiasedModelConfig& cfg);
BiasedModelConfig ModelConfigFromJson(const nlohmann::json& j);

// Model layout implied by an experiment config.
BiasedModelConfig MakeModelConfig(const ExperimentConfig& cfg, const Vocab& vocab,
                                  int num_classes, EncoderVariant variant, bool tcpgen);

// Independent generator for one purpose, derived from the run seed.
std::mt19937_64 DerivedRng(std::uint64_t seed, std::uint64_t stream);

// Decodes every utterance; utterances are spread over threads, each
// result lands in its own slot.
std::vector<Hypothesis> DecodeAll(const BiasedModel& model, ParamStore& params,
                                  const std::vector<std::vector<int>>& frames,
                                  const std::vector<PrefixTree>& trees, const DecodeConfig& cfg,
                                  const BlmdLms* lms);

std::vector<ScoredUtterance> ToScored(const std::vector<Utterance>& utts,
                                      const std::vector<Hypothesis>& hyps,
                                      const std::vector<std::vector<std::string>>& lists,
                                      const Vocab& vocab);

struct VariantResult {
  EncoderVariant variant;
  TrainResult train;
  std::map<DecodeMode, MetricReport> reports;
  // Exponents picked on the dev split for the discounting mode.
  std::vector<double> blmd_exponents;
  BiasedModelConfig model;
  ParamStore params;
};

struct SimulationResult {
  std::string config_hash;
  std::string corpus_digest;
  std::uint64_t seed = 0;
  SynthCorpus corpus;
  TrainResult baseline;
  BiasedModelConfig baseline_model;
  ParamStore baseline_params;
  // The plain baseline decoded in plain mode.
  MetricReport baseline_report;
  std::vector<VariantResult> variants;

  nlohmann::json VariantJson(size_t i) const;
  nlohmann::json BaselineJson() const;
  // p-value of "variant j beats variant i" in tcpgen mode for i < j, and
  // of each variant against the plain baseline.
  nlohmann::json SignTests() const;
};

SimulationResult RunSimulation(const ExperimentConfig& cfg);

// reports/<variant>.json, reports/baseline.json, sign_tests.json,
// checkpoints/<variant>.json and the generated data files.
void WriteSimulation(const SimulationResult& result, const std::filesystem::path& out_dir);

}  // namespace treebias

#endif  // TREEBIAS_EXPERIMENT_H_
