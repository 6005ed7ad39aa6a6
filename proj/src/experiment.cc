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

#include "treebias/experiment.h"

#include <chrono>
#include <exception>
#include <unordered_set>

#include "spdlog/spdlog.h"
#include "treebias/errors.h"
#include "treebias/param_store.h"

#ifdef TREEBIAS_HAVE_OPENMP
#include <omp.h>
#endif

namespace treebias {

namespace {

// Streams of DerivedRng.
constexpr std::uint64_t kCorpusStream = 1;
constexpr std::uint64_t kBaselineStream = 2;
constexpr std::uint64_t kListStream = 3;
constexpr std::uint64_t kVariantStream = 100;
// Copies of each rare word added to the target LM text.
constexpr int kTargetRepeats = 5;

nlohmann::json EncoderJson(const EncoderConfig& e) {
  return {{"variant", std::string(VariantName(e.variant))},
          {"layers", e.layers},
          {"sage_layers", e.sage_layers},
          {"dim", e.dim},
          {"tied", e.tied},
          {"gcnii_alpha", e.gcnii_alpha},
          {"alpha_sage", e.alpha_sage},
          {"activation", e.activation},
          {"residual_norm", e.residual_norm},
          {"literal_shortcut", e.literal_shortcut}};
}

std::vector<std::vector<std::string>> BuildLists(const std::vector<Utterance>& utts,
                                                 const BiasingSpec& spec, std::mt19937_64& rng) {
  std::vector<std::vector<std::string>> lists;
  for (const Utterance& u : utts) lists.push_back(BuildBiasingList(u.words, spec, rng));
  return lists;
}

std::vector<PrefixTree> BuildTrees(const std::vector<std::vector<std::string>>& lists,
                                   const Vocab& vocab) {
  std::vector<PrefixTree> trees;
  for (const auto& l : lists) trees.push_back(PrefixTree::Build(TokenizeAll(l, vocab)));
  return trees;
}

std::vector<std::vector<int>> FramesOf(const std::vector<Utterance>& utts) {
  std::vector<std::vector<int>> out;
  for (const Utterance& u : utts) out.push_back(u.frames);
  return out;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

nlohmann::json ModelConfigToJson(const BiasedModelConfig& cfg) {
  return {{"vocab_size", cfg.base.vocab_size},
          {"token_count", cfg.base.token_count},
          {"num_classes", cfg.base.num_classes},
          {"embedding_dim", cfg.base.embedding_dim},
          {"hidden_dim", cfg.base.hidden_dim},
          {"frame_dim", cfg.base.frame_dim},
          {"encoder", EncoderJson(cfg.encoder)},
          {"attention_dim", cfg.attention_dim},
          {"ool_value_in_output", cfg.ool_value_in_output},
          {"tcpgen", cfg.tcpgen}};
}

BiasedModelConfig ModelConfigFromJson(const nlohmann::json& j) {
  try {
    BiasedModelConfig cfg;
    cfg.base.vocab_size = j.at("vocab_size").get<int>();
    cfg.base.token_count = j.at("token_count").get<int>();
    cfg.base.num_classes = j.at("num_classes").get<int>();
    cfg.base.embedding_dim = j.at("embedding_dim").get<int>();
    cfg.base.hidden_dim = j.at("hidden_dim").get<int>();
    cfg.base.frame_dim = j.at("frame_dim").get<int>();
    const nlohmann::json& e = j.at("encoder");
    cfg.encoder.variant = ParseVariant(e.at("variant").get<std::string>());
    cfg.encoder.layers = e.at("layers").get<int>();
    cfg.encoder.sage_layers = e.at("sage_layers").get<int>();
    cfg.encoder.dim = e.at("dim").get<int>();
    cfg.encoder.tied = e.at("tied").get<bool>();
    cfg.encoder.gcnii_alpha = e.at("gcnii_alpha").get<double>();
    cfg.encoder.alpha_sage = e.at("alpha_sage").get<double>();
    cfg.encoder.activation = e.at("activation").get<bool>();
    cfg.encoder.residual_norm = e.at("residual_norm").get<bool>();
    cfg.encoder.literal_shortcut = e.at("literal_shortcut").get<bool>();
    cfg.attention_dim = j.at("attention_dim").get<int>();
    cfg.ool_value_in_output = j.at("ool_value_in_output").get<bool>();
    cfg.tcpgen = j.at("tcpgen").get<bool>();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad model description: ") + e.what());
  }
}

BiasedModelConfig MakeModelConfig(const ExperimentConfig& cfg, const Vocab& vocab,
                                  int num_classes, EncoderVariant variant, bool tcpgen) {
  BiasedModelConfig m;
  m.base.vocab_size = vocab.size();
  m.base.token_count = vocab.total_size();
  m.base.num_classes = num_classes;
  m.base.embedding_dim = cfg.model.embedding_dim;
  m.base.hidden_dim = cfg.model.hidden_dim;
  m.base.frame_dim = cfg.model.frame_dim;
  m.encoder = cfg.gnn;
  m.encoder.variant = variant;
  m.attention_dim = cfg.attention_dim;
  m.ool_value_in_output = cfg.ool_value_in_output;
  m.tcpgen = tcpgen;
  return m;
}

std::mt19937_64 DerivedRng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

std::vector<Hypothesis> DecodeAll(const BiasedModel& model, ParamStore& params,
                                  const std::vector<std::vector<int>>& frames,
                                  const std::vector<PrefixTree>& trees, const DecodeConfig& cfg,
                                  const BlmdLms* lms) {
  if (trees.size() != frames.size()) throw DomainError("one tree per utterance is required");
  std::vector<Hypothesis> out(frames.size());
  std::exception_ptr error;
  const long n = static_cast<long>(frames.size());
#ifdef TREEBIAS_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long i = 0; i < n; ++i) {
    try {
      const ModelSource source(model.base(), frames[i]);
      out[i] = BeamSearch(model, params, source, &trees[i], cfg, lms);
    } catch (...) {
#ifdef TREEBIAS_HAVE_OPENMP
#pragma omp critical(treebias_decode_error)
#endif
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

std::vector<ScoredUtterance> ToScored(const std::vector<Utterance>& utts,
                                      const std::vector<Hypothesis>& hyps,
                                      const std::vector<std::vector<std::string>>& lists,
                                      const Vocab& vocab) {
  std::vector<ScoredUtterance> out;
  for (size_t i = 0; i < utts.size(); ++i) {
    ScoredUtterance s;
    s.ref = utts[i].words;
    s.hyp = Detokenize(hyps[i].pieces, vocab).words;
    s.biasing = lists[i];
    s.group = utts[i].group;
    out.push_back(std::move(s));
  }
  return out;
}

SimulationResult RunSimulation(const ExperimentConfig& cfg) {
  if (cfg.variants.empty()) throw FormatError("[simulate].variants must name at least one variant");
#ifdef TREEBIAS_HAVE_OPENMP
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
  const auto start = std::chrono::steady_clock::now();
  SimulationResult result;
  result.seed = cfg.seed;
  result.config_hash = cfg.Hash();

  std::mt19937_64 corpus_rng = DerivedRng(cfg.seed, kCorpusStream);
  result.corpus = SynthesizeCorpus(cfg.corpus, corpus_rng);
  const SynthCorpus& corpus = result.corpus;
  result.corpus_digest = corpus.Digest();
  const Vocab& vocab = corpus.vocab;
  spdlog::info("corpus: {} train / {} dev / {} test utterances, digest {}", corpus.train.size(),
               corpus.dev.size(), corpus.test.size(), result.corpus_digest.substr(0, 16));

  const BiasingSpec spec{corpus.rare_words, cfg.n_distractors};
  const BiasingSpec train_spec{corpus.train_rare_words, cfg.n_distractors};
  std::mt19937_64 list_rng = DerivedRng(cfg.seed, kListStream);
  const auto dev_lists = BuildLists(corpus.dev, spec, list_rng);
  const auto test_lists = BuildLists(corpus.test, spec, list_rng);
  const auto dev_trees = BuildTrees(dev_lists, vocab);
  const auto test_trees = BuildTrees(test_lists, vocab);
  const auto dev_frames = FramesOf(corpus.dev);
  const auto test_frames = FramesOf(corpus.test);
  const std::unordered_set<std::string> oov(corpus.oov_words.begin(), corpus.oov_words.end());

  // Plain baseline.
  const BiasedModel baseline(
      MakeModelConfig(cfg, vocab, corpus.num_classes, EncoderVariant::kNone, false));
  ParamStore base_params;
  std::mt19937_64 base_rng = DerivedRng(cfg.seed, kBaselineStream);
  baseline.InitParams(base_params, base_rng);
  const ParamStore initial_params = base_params;
  TrainConfig base_train = cfg.train;
  base_train.epochs = cfg.baseline_epochs;
  base_train.freeze_base = false;
  spdlog::info("training the baseline for {} epochs", base_train.epochs);
  result.baseline = TrainToy(baseline, base_params, corpus.train, vocab, train_spec, base_train,
                             base_rng);

  DecodeConfig plain_cfg = cfg.decode;
  plain_cfg.mode = DecodeMode::kPlain;
  auto wants = [&](DecodeMode m) {
    return std::find(cfg.modes.begin(), cfg.modes.end(), m) != cfg.modes.end();
  };
  {
    const auto hyps = DecodeAll(baseline, base_params, test_frames, test_trees, plain_cfg, nullptr);
    result.baseline_report = Score(ToScored(corpus.test, hyps, test_lists, vocab), oov);
  }
  spdlog::info("  baseline plain: WER {:.4f} R-WER {:.4f} OOV-WER {:.4f}",
               result.baseline_report.wer.rate().value_or(-1),
               result.baseline_report.r_wer.rate().value_or(-1),
               result.baseline_report.oov_wer.rate().value_or(-1));

  // Count LMs for discounting.
  BigramLm source_lm(vocab.size(), vocab.bos_id(), cfg.blmd.add_k);
  BigramLm target_lm(vocab.size(), vocab.bos_id(), cfg.blmd.add_k);
  for (const Utterance& u : corpus.train) {
    source_lm.AddSequence(u.pieces);
    target_lm.AddSequence(u.pieces);
  }
  for (const std::string& w : corpus.rare_words) {
    const TokenSeq seq = Tokenize(w, vocab);
    for (int r = 0; r < kTargetRepeats; ++r) target_lm.AddSequence(seq.pieces);
  }
  const BlmdLms lms{&source_lm, &target_lm};
  result.baseline_model = baseline.config();
  result.baseline_params = base_params;

  for (EncoderVariant variant : cfg.variants) {
    const auto vstart = std::chrono::steady_clock::now();
    VariantResult vr;
    vr.variant = variant;
    const BiasedModel model(MakeModelConfig(cfg, vocab, corpus.num_classes, variant, true));
    ParamStore params = cfg.from_scratch ? initial_params : base_params;
    std::mt19937_64 rng =
        DerivedRng(cfg.seed, kVariantStream + static_cast<std::uint64_t>(variant));
    model.InitBiasingParams(params, rng);
    spdlog::info("training tcpgen with encoder '{}' for {} epochs", VariantName(variant),
                 cfg.train.epochs);
    vr.train = TrainToy(model, params, corpus.train, vocab, train_spec, cfg.train, rng);

    if (wants(DecodeMode::kPlain)) {
      if (cfg.train.freeze_base && !cfg.from_scratch) {
        vr.reports[DecodeMode::kPlain] = result.baseline_report;
      } else {
        const auto hyps = DecodeAll(model, params, test_frames, test_trees, plain_cfg, nullptr);
        vr.reports[DecodeMode::kPlain] = Score(ToScored(corpus.test, hyps, test_lists, vocab), oov);
      }
    }
    if (wants(DecodeMode::kTcpgen)) {
      DecodeConfig dc = cfg.decode;
      dc.mode = DecodeMode::kTcpgen;
      const auto hyps = DecodeAll(model, params, test_frames, test_trees, dc, nullptr);
      vr.reports[DecodeMode::kTcpgen] = Score(ToScored(corpus.test, hyps, test_lists, vocab), oov);
    }
    if (wants(DecodeMode::kBlmd)) {
      DecodeConfig dc = cfg.decode;
      dc.mode = DecodeMode::kBlmd;
      dc.blmd_form = cfg.blmd.form;
      double best = 0.0;
      bool have = false;
      for (double a1 : cfg.blmd.a1) {
        for (double b1 : cfg.blmd.b1) {
          for (double a2 : cfg.blmd.a2) {
            for (double b2 : cfg.blmd.b2) {
              dc.a1 = a1, dc.b1 = b1, dc.a2 = a2, dc.b2 = b2;
              const auto hyps = DecodeAll(model, params, dev_frames, dev_trees, dc, &lms);
              const MetricReport r = Score(ToScored(corpus.dev, hyps, dev_lists, vocab), oov);
              const double score = static_cast<double>(r.r_wer.errors());
              if (!have || score < best) {
                best = score;
                have = true;
                vr.blmd_exponents = {a1, b1, a2, b2};
              }
            }
          }
        }
      }
      dc.a1 = vr.blmd_exponents[0], dc.b1 = vr.blmd_exponents[1];
      dc.a2 = vr.blmd_exponents[2], dc.b2 = vr.blmd_exponents[3];
      const auto hyps = DecodeAll(model, params, test_frames, test_trees, dc, &lms);
      vr.reports[DecodeMode::kBlmd] = Score(ToScored(corpus.test, hyps, test_lists, vocab), oov);
    }
    for (const auto& [mode, report] : vr.reports) {
      spdlog::info("  {} {}: WER {:.4f} R-WER {:.4f} OOV-WER {:.4f}", VariantName(variant),
                   DecodeModeName(mode), report.wer.rate().value_or(-1),
                   report.r_wer.rate().value_or(-1), report.oov_wer.rate().value_or(-1));
    }
    spdlog::info("  variant '{}' took {:.1f} s", VariantName(variant), Seconds(vstart));
    vr.model = model.config();
    vr.params = std::move(params);
    result.variants.push_back(std::move(vr));
  }
  spdlog::info("simulation took {:.1f} s", Seconds(start));
  return result;
}

nlohmann::json SimulationResult::VariantJson(size_t i) const {
  const VariantResult& v = variants.at(i);
  nlohmann::json j;
  j["variant"] = std::string(VariantName(v.variant));
  j["seed"] = seed;
  j["config_hash"] = config_hash;
  j["corpus_digest"] = corpus_digest;
  j["train"] = {{"baseline_loss", baseline.epoch_loss},
                {"loss", v.train.epoch_loss},
                {"p_gen", v.train.epoch_pgen}};
  nlohmann::json modes = nlohmann::json::object();
  for (const auto& [mode, report] : v.reports) {
    nlohmann::json r = report.ToJson();
    if (mode == DecodeMode::kBlmd) {
      r["exponents"] = {{"a1", v.blmd_exponents[0]},
                        {"b1", v.blmd_exponents[1]},
                        {"a2", v.blmd_exponents[2]},
                        {"b2", v.blmd_exponents[3]}};
    }
    modes[DecodeModeName(mode)] = r;
  }
  j["modes"] = modes;
  return j;
}

nlohmann::json SimulationResult::BaselineJson() const {
  nlohmann::json j;
  j["variant"] = "baseline";
  j["seed"] = seed;
  j["config_hash"] = config_hash;
  j["corpus_digest"] = corpus_digest;
  j["train"] = {{"loss", baseline.epoch_loss}};
  j["modes"] = {{"plain", baseline_report.ToJson()}};
  return j;
}

nlohmann::json SimulationResult::SignTests() const {
  auto p_json = [](const std::optional<double>& p) {
    return p ? nlohmann::json(*p) : nlohmann::json(nullptr);
  };
  nlohmann::json pairs = nlohmann::json::array();
  for (size_t i = 0; i < variants.size(); ++i) {
    for (size_t j = i + 1; j < variants.size(); ++j) {
      const auto a = variants[i].reports.find(DecodeMode::kTcpgen);
      const auto b = variants[j].reports.find(DecodeMode::kTcpgen);
      if (a == variants[i].reports.end() || b == variants[j].reports.end()) continue;
      const auto groups = GroupPairs(a->second, b->second);
      pairs.push_back({{"baseline", std::string(VariantName(variants[i].variant))},
                       {"candidate", std::string(VariantName(variants[j].variant))},
                       {"groups", groups.size()},
                       {"p_value", p_json(SignTest(groups))}});
    }
  }
  nlohmann::json vs_plain = nlohmann::json::array();
  for (const VariantResult& v : variants) {
    const auto b = v.reports.find(DecodeMode::kTcpgen);
    if (b == v.reports.end()) continue;
    const auto groups = GroupPairs(baseline_report, b->second);
    vs_plain.push_back({{"candidate", std::string(VariantName(v.variant))},
                        {"groups", groups.size()},
                        {"p_value", p_json(SignTest(groups))}});
  }
  return {{"metric", "r_wer"},
          {"mode", "tcpgen"},
          {"seed", seed},
          {"config_hash", config_hash},
          {"pairs", pairs},
          {"against_baseline", vs_plain}};
}

void WriteSimulation(const SimulationResult& result, const std::filesystem::path& out_dir) {
  const std::filesystem::path data = out_dir / "data";
  const std::filesystem::path reports = out_dir / "reports";
  std::filesystem::create_directories(data);
  std::filesystem::create_directories(reports);
  const SynthCorpus& c = result.corpus;
  std::string vocab_text;
  for (const std::string& p : c.vocab.pieces()) vocab_text += p + '\n';
  WriteFileAtomic(data / "vocab.txt", vocab_text);
  WriteFileAtomic(data / "rare_words.txt", JoinWords(c.rare_words) + '\n');
  WriteFileAtomic(data / "oov_words.txt", JoinWords(c.oov_words) + '\n');
  WriteFileAtomic(data / "train_rare_words.txt", JoinWords(c.train_rare_words) + '\n');
  WriteFileAtomic(data / "train.txt", CorpusText(c.train));
  WriteFileAtomic(data / "train.frames", FramesText(c.train));
  WriteFileAtomic(data / "dev.txt", CorpusText(c.dev));
  WriteFileAtomic(data / "dev.frames", FramesText(c.dev));
  WriteFileAtomic(data / "test.txt", CorpusText(c.test));
  WriteFileAtomic(data / "test.frames", FramesText(c.test));
  const std::filesystem::path ckpt = out_dir / "checkpoints";
  std::filesystem::create_directories(ckpt);
  auto meta = [&](const BiasedModelConfig& m) {
    return nlohmann::json{{"model", ModelConfigToJson(m)},
                          {"seed", result.seed},
                          {"config_hash", result.config_hash}};
  };
  result.baseline_params.Save(ckpt / "baseline.json", meta(result.baseline_model));
  for (const VariantResult& v : result.variants) {
    v.params.Save(ckpt / (std::string(VariantName(v.variant)) + ".json"), meta(v.model));
  }
  WriteFileAtomic(reports / "baseline.json", result.BaselineJson().dump(2) + '\n');
  for (size_t i = 0; i < result.variants.size(); ++i) {
    const std::string name(VariantName(result.variants[i].variant));
    WriteFileAtomic(reports / (name + ".json"), result.VariantJson(i).dump(2) + '\n');
  }
  WriteFileAtomic(out_dir / "sign_tests.json", result.SignTests().dump(2) + '\n');
}

}  // namespace treebias
