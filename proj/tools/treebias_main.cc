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

// treebias: prefix-tree biasing toolkit.
//   treebias build-tree --biasing-list words.txt --vocab vocab.txt --out tree.json
//   treebias simulate --config exp.toml
//   treebias train --config exp.toml --out model.json
//   treebias decode --config exp.toml --checkpoint model.json --out hyp.txt
//   treebias score --ref ref.txt --hyp hyp.txt --lists hyp.txt.lists --out report.json
// Exit codes: 0 success, 2 usage or input error, 3 numeric failure.

#include <fstream>
#include <iostream>
#include <unordered_set>

#include "CLI11.hpp"
#include "spdlog/sinks/stdout_color_sinks.h"
#include "spdlog/spdlog.h"
#include "treebias/beam_search.h"
#include "treebias/config.h"
#include "treebias/errors.h"
#include "treebias/eval.h"
#include "treebias/experiment.h"
#include "treebias/param_store.h"
#include "treebias/replay.h"
#include "treebias/synth.h"
#include "treebias/train.h"
#include "treebias/trie.h"

namespace {

using namespace treebias;

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
// Stream of DerivedRng used for decode-time biasing lists.
constexpr std::uint64_t kDecodeListStream = 3;

void WriteOrPrint(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    WriteFileAtomic(path, text);
  }
}

int BuildTree(const std::string& list_path, const std::string& vocab_path,
              const std::string& out) {
  const Vocab vocab = Vocab::Load(vocab_path);
  const PrefixTree tree = PrefixTree::Build(LoadBiasingList(list_path, vocab));
  WriteOrPrint(out, TreeToJson(tree, vocab) + "\n");
  spdlog::info("{} words, {} nodes", tree.word_count(), tree.num_nodes());
  return 0;
}

int Simulate(const std::string& config_path, const std::string& out_dir) {
  const ExperimentConfig cfg = LoadConfig(config_path);
  const std::filesystem::path dir = out_dir.empty() ? cfg.output_dir : std::filesystem::path(out_dir);
  const SimulationResult result = RunSimulation(cfg);
  WriteSimulation(result, dir);
  spdlog::info("reports written to {}", dir.string());
  return 0;
}

std::vector<Utterance> LoadUtterances(const std::filesystem::path& text,
                                      const std::filesystem::path& frames, const Vocab& vocab) {
  const auto words = ReadCorpus(text);
  const auto obs = ReadFrames(frames);
  if (words.size() != obs.size()) {
    throw FormatError(text.string() + " and " + frames.string() + " differ in line count");
  }
  std::vector<Utterance> utts;
  for (size_t i = 0; i < words.size(); ++i) {
    Utterance u;
    u.words = words[i];
    for (const TokenSeq& t : TokenizeAll(u.words, vocab)) {
      u.pieces.insert(u.pieces.end(), t.pieces.begin(), t.pieces.end());
    }
    u.frames = obs[i];
    utts.push_back(std::move(u));
  }
  return utts;
}

int MaxFrame(const std::vector<Utterance>& utts) {
  int m = -1;
  for (const auto& u : utts) {
    for (int f : u.frames) m = std::max(m, f);
  }
  return m;
}

int Train(const std::string& config_path, const std::string& out) {
  const ExperimentConfig cfg = LoadConfig(config_path);
  RequirePaths(cfg, {"vocab", "train", "train_frames", "rare_list"});
  const Vocab vocab = Vocab::Load(cfg.data.vocab);
  std::vector<Utterance> train = LoadUtterances(cfg.data.train, cfg.data.train_frames, vocab);
  for (const Utterance& u : train) {
    if (u.frames.size() != u.pieces.size()) {
      throw FormatError("training utterances need one frame per word piece");
    }
  }
  const int classes = cfg.model.num_classes > 0 ? cfg.model.num_classes : MaxFrame(train) + 1;
  const BiasingSpec spec{ReadWordList(cfg.data.rare_list), cfg.n_distractors};

  const BiasedModel baseline(MakeModelConfig(cfg, vocab, classes, EncoderVariant::kNone, false));
  ParamStore params;
  std::mt19937_64 rng(cfg.seed);
  baseline.InitParams(params, rng);
  TrainConfig base_train = cfg.train;
  base_train.epochs = cfg.baseline_epochs;
  base_train.freeze_base = false;
  const TrainResult base_result = TrainToy(baseline, params, train, vocab, spec, base_train, rng);

  BiasedModelConfig model_cfg = baseline.config();
  TrainResult result;
  if (cfg.tcpgen) {
    model_cfg = MakeModelConfig(cfg, vocab, classes, cfg.gnn.variant, true);
    const BiasedModel model(model_cfg);
    model.InitBiasingParams(params, rng);
    result = TrainToy(model, params, train, vocab, spec, cfg.train, rng);
  }
  nlohmann::json meta;
  meta["model"] = ModelConfigToJson(model_cfg);
  meta["seed"] = cfg.seed;
  meta["config_hash"] = cfg.Hash();
  meta["baseline_loss"] = base_result.epoch_loss;
  meta["loss"] = result.epoch_loss;
  meta["p_gen"] = result.epoch_pgen;
  params.Save(out, meta);
  spdlog::info("checkpoint written to {}", out);
  return 0;
}

nlohmann::json TraceJson(size_t index, const Hypothesis& hyp, const Vocab& vocab) {
  nlohmann::json steps = nlohmann::json::array();
  for (const TraceStep& s : hyp.trace) {
    nlohmann::json valid = nlohmann::json::array();
    for (int p : s.valid_pieces) valid.push_back(vocab.piece(p));
    steps.push_back({{"t", s.t},
                     {"emitted", vocab.IsPiece(s.emitted) ? vocab.piece(s.emitted) : "<null>"},
                     {"valid", valid},
                     {"p_mdl", s.p_mdl},
                     {"p_gen", s.p_gen},
                     {"p_gen_scaled", s.p_gen_scaled},
                     {"p_ool", s.p_ool},
                     {"p_final", s.p_final}});
  }
  return {{"index", index}, {"score", hyp.score}, {"steps", steps}};
}

struct DecodeArgs {
  std::string config;
  std::string checkpoint;
  std::string out;
  std::string mode;
  int beam = 0;
  std::string replay;
  std::string trace;
};

int Decode(const DecodeArgs& args) {
  const ExperimentConfig cfg = LoadConfig(args.config);
  RequirePaths(cfg, {"vocab"});
  if (!std::filesystem::exists(args.checkpoint)) {
    throw std::runtime_error("checkpoint not found: " + args.checkpoint);
  }
  nlohmann::json meta;
  ParamStore params = ParamStore::Load(args.checkpoint, &meta);
  if (!meta.contains("model")) throw FormatError("checkpoint has no model description");
  const BiasedModel model(ModelConfigFromJson(meta.at("model")));
  const Vocab vocab = Vocab::Load(cfg.data.vocab);
  if (vocab.size() != model.base().config().vocab_size) {
    throw FormatError("vocabulary does not match the checkpoint");
  }
  DecodeConfig dc = cfg.decode;
  dc.mode = args.mode.empty() ? (model.tcpgen() ? DecodeMode::kTcpgen : DecodeMode::kPlain)
                              : ParseDecodeMode(args.mode);
  if (args.beam > 0) dc.beam = args.beam;
  dc.trace = !args.trace.empty();
  dc.blmd_form = cfg.blmd.form;
  dc.a1 = cfg.blmd.a1.front(), dc.b1 = cfg.blmd.b1.front();
  dc.a2 = cfg.blmd.a2.front(), dc.b2 = cfg.blmd.b2.front();

  std::vector<std::string> rare;
  if (!cfg.data.rare_list.empty()) {
    RequirePaths(cfg, {"rare_list"});
    rare = ReadWordList(cfg.data.rare_list);
  }
  const BiasingSpec spec{rare, cfg.n_distractors};
  std::mt19937_64 list_rng = DerivedRng(cfg.seed, kDecodeListStream);

  std::optional<BigramLm> source_lm, target_lm;
  BlmdLms lms;
  if (dc.mode == DecodeMode::kBlmd) {
    RequirePaths(cfg, {"train"});
    source_lm.emplace(vocab.size(), vocab.bos_id(), cfg.blmd.add_k);
    target_lm.emplace(vocab.size(), vocab.bos_id(), cfg.blmd.add_k);
    for (const auto& words : ReadCorpus(cfg.data.train)) {
      std::vector<int> pieces;
      for (const TokenSeq& t : TokenizeAll(words, vocab)) {
        pieces.insert(pieces.end(), t.pieces.begin(), t.pieces.end());
      }
      source_lm->AddSequence(pieces);
      target_lm->AddSequence(pieces);
    }
    for (const TokenSeq& t : TokenizeAll(rare, vocab)) target_lm->AddSequence(t.pieces);
    lms = {&*source_lm, &*target_lm};
  }

  std::vector<Hypothesis> hyps;
  std::vector<std::vector<std::string>> lists;
  if (!args.replay.empty()) {
    const auto utts = LoadReplay(args.replay, vocab.size());
    for (const ReplayUtterance& u : utts) {
      std::vector<std::string> list;
      if (u.biasing) {
        list = *u.biasing;
      } else if (u.ref) {
        list = BuildBiasingList(SplitWords(*u.ref), spec, list_rng);
      }
      const PrefixTree tree = PrefixTree::Build(TokenizeAll(list, vocab));
      const ReplaySource source(u, vocab.size(), model.base().state_dim());
      hyps.push_back(BeamSearch(model, params, source, &tree, dc, &lms));
      lists.push_back(std::move(list));
    }
  } else {
    RequirePaths(cfg, {"test", "test_frames"});
    const auto refs = ReadCorpus(cfg.data.test);
    const auto frames = ReadFrames(cfg.data.test_frames);
    if (refs.size() != frames.size()) throw FormatError("test text and frames differ in length");
    std::vector<PrefixTree> trees;
    for (const auto& r : refs) {
      lists.push_back(BuildBiasingList(r, spec, list_rng));
      trees.push_back(PrefixTree::Build(TokenizeAll(lists.back(), vocab)));
    }
    hyps = DecodeAll(model, params, frames, trees, dc, &lms);
  }

  std::string hyp_text, list_text, trace_text;
  for (size_t i = 0; i < hyps.size(); ++i) {
    hyp_text += JoinWords(Detokenize(hyps[i].pieces, vocab).words) + '\n';
    list_text += JoinWords(lists[i]) + '\n';
    if (dc.trace) trace_text += TraceJson(i, hyps[i], vocab).dump() + '\n';
  }
  WriteOrPrint(args.out, hyp_text);
  if (!args.out.empty() && args.out != "-") WriteFileAtomic(args.out + ".lists", list_text);
  if (dc.trace) WriteFileAtomic(args.trace, trace_text);
  spdlog::info("decoded {} utterances in {} mode", hyps.size(), DecodeModeName(dc.mode));
  return 0;
}

struct ScoreArgs {
  std::string ref;
  std::string hyp;
  std::string lists;
  std::string rare_list;
  std::string oov_list;
  int groups = 1;
  std::string out;
  std::string tsv;
};

int ScoreCommand(const ScoreArgs& args) {
  const auto refs = ReadCorpus(args.ref);
  const auto hyps = ReadCorpus(args.hyp);
  if (refs.size() != hyps.size()) {
    throw FormatError("reference and hypothesis files differ in line count (" +
                      std::to_string(refs.size()) + " vs " + std::to_string(hyps.size()) + ")");
  }
  if (args.groups < 1) throw FormatError("--groups must be at least 1");
  std::vector<std::vector<std::string>> lists;
  if (!args.lists.empty()) {
    lists = ReadCorpus(args.lists);
    if (lists.size() != refs.size()) throw FormatError("one biasing list per line is required");
  } else {
    const std::vector<std::string> rare =
        args.rare_list.empty() ? std::vector<std::string>{} : ReadWordList(args.rare_list);
    lists.assign(refs.size(), rare);
  }
  std::unordered_set<std::string> oov;
  if (!args.oov_list.empty()) {
    for (const auto& w : ReadWordList(args.oov_list)) oov.insert(w);
  }
  std::vector<ScoredUtterance> utts;
  for (size_t i = 0; i < refs.size(); ++i) {
    utts.push_back({refs[i], hyps[i], lists[i], static_cast<int>(i % args.groups)});
  }
  const MetricReport report = Score(utts, oov);
  WriteOrPrint(args.out, report.ToJson().dump(2) + "\n");
  if (!args.tsv.empty()) WriteFileAtomic(args.tsv, PerUtteranceTsv(utts, report));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("treebias"));
  CLI::App app{"Prefix-tree contextual biasing toolkit"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");

  std::string list_path, vocab_path, tree_out;
  auto* build = app.add_subcommand("build-tree", "Dump the prefix tree of a biasing list");
  build->add_option("--biasing-list", list_path, "Biasing list file")->required();
  build->add_option("--vocab", vocab_path, "Word-piece vocabulary")->required();
  build->add_option("--out", tree_out, "Output JSON (stdout when omitted)");

  std::string sim_config, sim_out;
  auto* sim = app.add_subcommand("simulate", "Run the synthetic biasing experiment");
  sim->add_option("--config", sim_config, "Experiment TOML")->required();
  sim->add_option("--out-dir", sim_out, "Override output_dir");

  std::string train_config, train_out;
  auto* train = app.add_subcommand("train", "Train a model on the configured data");
  train->add_option("--config", train_config, "Experiment TOML")->required();
  train->add_option("--out,--checkpoint", train_out, "Checkpoint to write")->required();

  DecodeArgs dargs;
  auto* decode = app.add_subcommand("decode", "Decode test utterances or replayed posteriors");
  decode->add_option("--config", dargs.config, "Experiment TOML")->required();
  decode->add_option("--checkpoint", dargs.checkpoint, "Checkpoint from train")->required();
  decode->add_option("--out", dargs.out, "Hypothesis file (stdout when omitted)");
  decode->add_option("--mode", dargs.mode, "plain, tcpgen or blmd");
  decode->add_option("--beam", dargs.beam, "Beam width override");
  decode->add_option("--replay", dargs.replay, "JSON-lines posterior replay file");
  decode->add_option("--trace", dargs.trace, "Write per-step traces (JSON lines)");

  ScoreArgs sargs;
  auto* score = app.add_subcommand("score", "Score hypotheses against references");
  score->add_option("--ref", sargs.ref, "Reference file")->required();
  score->add_option("--hyp", sargs.hyp, "Hypothesis file")->required();
  score->add_option("--lists", sargs.lists, "Per-utterance biasing lists, one per line");
  score->add_option("--rare-list", sargs.rare_list, "One biasing list for every utterance");
  score->add_option("--oov", sargs.oov_list, "OOV word list");
  score->add_option("--groups", sargs.groups, "Round-robin groups for significance tallies");
  score->add_option("--out", sargs.out, "Report JSON (stdout when omitted)");
  score->add_option("--tsv", sargs.tsv, "Per-utterance TSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  if (quiet) spdlog::set_level(spdlog::level::warn);

  try {
    if (*build) return BuildTree(list_path, vocab_path, tree_out);
    if (*sim) return Simulate(sim_config, sim_out);
    if (*train) return Train(train_config, train_out);
    if (*decode) return Decode(dargs);
    if (*score) return ScoreCommand(sargs);
  } catch (const NumericError& e) {
    spdlog::error("numeric failure: {}", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
