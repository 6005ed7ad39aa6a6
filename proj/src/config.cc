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

#include "treebias/config.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "toml.hpp"
#include "treebias/digest.h"
#include "treebias/errors.h"

namespace treebias {

namespace {

class Section {
 public:
  Section(const toml::table* table, std::string name) : table_(table), name_(std::move(name)) {}

  template <typename T>
  void Read(const std::string& key, T* out) {
    seen_.insert(key);
    if (table_ == nullptr) return;
    const toml::node* node = table_->get(key);
    if (node == nullptr) return;
    if constexpr (std::is_same_v<T, bool>) {
      auto v = node->value_exact<bool>();
      if (!v) Fail(key, "a boolean");
      *out = *v;
    } else if constexpr (std::is_integral_v<T>) {
      auto v = node->value_exact<int64_t>();
      if (!v) Fail(key, "an integer");
      if (*v < static_cast<int64_t>(std::numeric_limits<T>::min()) ||
          static_cast<uint64_t>(*v) > static_cast<uint64_t>(std::numeric_limits<T>::max())) {
        Fail(key, "an integer in range");
      }
      *out = static_cast<T>(*v);
    } else if constexpr (std::is_floating_point_v<T>) {
      auto v = node->value<double>();
      if (!v) Fail(key, "a number");
      *out = *v;
    } else if constexpr (std::is_same_v<T, std::string>) {
      auto v = node->value_exact<std::string>();
      if (!v) Fail(key, "a string");
      *out = *v;
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      const toml::array* arr = node->as_array();
      if (arr == nullptr) Fail(key, "an array of numbers");
      out->clear();
      for (const toml::node& el : *arr) {
        auto v = el.value<double>();
        if (!v) Fail(key, "an array of numbers");
        out->push_back(*v);
      }
    } else {
      const toml::array* arr = node->as_array();
      if (arr == nullptr) Fail(key, "an array of strings");
      out->clear();
      for (const toml::node& el : *arr) {
        auto v = el.value_exact<std::string>();
        if (!v) Fail(key, "an array of strings");
        out->push_back(*v);
      }
    }
  }

  bool Has(const std::string& key) const { return table_ && table_->contains(key); }

  void CheckUnknown() const {
    if (table_ == nullptr) return;
    for (const auto& [k, v] : *table_) {
      if (!seen_.count(std::string(k.str()))) {
        throw FormatError("unknown key '" + std::string(k.str()) + "' in " + name_);
      }
    }
  }

 private:
  [[noreturn]] void Fail(const std::string& key, const char* what) const {
    throw FormatError(name_ + "." + key + " must be " + what);
  }

  const toml::table* table_;
  std::string name_;
  std::set<std::string> seen_;
};

const toml::table* SubTable(const toml::table& root, const std::string& name) {
  const toml::node* n = root.get(name);
  if (n == nullptr) return nullptr;
  if (!n->is_table()) throw FormatError("[" + name + "] must be a table");
  return n->as_table();
}

std::filesystem::path Resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string FormName(BlmdForm f) { return f == BlmdForm::kConsistent ? "consistent" : "literal"; }

ExperimentConfig ParseConfigImpl(const std::string& text, const std::filesystem::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "config parse error: " << e.description() << " at line " << e.source().begin.line;
    throw FormatError(os.str());
  }
  static const std::set<std::string> kKnown = {"seed",   "output_dir", "data",   "model",
                                               "gnn",    "tcpgen",     "train",  "decode",
                                               "biasing", "blmd",      "corpus", "simulate"};
  for (const auto& [k, v] : root) {
    if (!kKnown.count(std::string(k.str()))) {
      throw FormatError("unknown config entry '" + std::string(k.str()) + "'");
    }
  }
  ExperimentConfig cfg;
  Section top(&root, "config");
  if (!top.Has("seed")) throw FormatError("config needs an explicit seed");
  int64_t seed = 0;
  top.Read("seed", &seed);
  if (seed < 0) throw FormatError("seed must be non-negative");
  cfg.seed = static_cast<std::uint64_t>(seed);
  std::string out_dir = "out";
  top.Read("output_dir", &out_dir);
  cfg.output_dir = Resolve(base_dir, out_dir);

  Section data(SubTable(root, "data"), "[data]");
  auto path = [&](const char* key, std::filesystem::path* dst) {
    std::string s;
    data.Read(key, &s);
    *dst = Resolve(base_dir, s);
  };
  path("vocab", &cfg.data.vocab);
  path("rare_list", &cfg.data.rare_list);
  path("oov_list", &cfg.data.oov_list);
  path("train", &cfg.data.train);
  path("train_frames", &cfg.data.train_frames);
  path("test", &cfg.data.test);
  path("test_frames", &cfg.data.test_frames);
  data.CheckUnknown();

  Section model(SubTable(root, "model"), "[model]");
  model.Read("embedding_dim", &cfg.model.embedding_dim);
  model.Read("hidden_dim", &cfg.model.hidden_dim);
  model.Read("frame_dim", &cfg.model.frame_dim);
  model.Read("num_classes", &cfg.model.num_classes);
  model.CheckUnknown();

  Section gnn(SubTable(root, "gnn"), "[gnn]");
  std::string variant(VariantName(cfg.gnn.variant));
  gnn.Read("variant", &variant);
  cfg.gnn.variant = ParseVariant(variant);
  gnn.Read("layers", &cfg.gnn.layers);
  gnn.Read("sage_layers", &cfg.gnn.sage_layers);
  gnn.Read("dim", &cfg.gnn.dim);
  gnn.Read("tied", &cfg.gnn.tied);
  gnn.Read("gcnii_alpha", &cfg.gnn.gcnii_alpha);
  gnn.Read("alpha_sage", &cfg.gnn.alpha_sage);
  gnn.Read("literal_shortcut", &cfg.gnn.literal_shortcut);
  gnn.CheckUnknown();

  Section tcpgen(SubTable(root, "tcpgen"), "[tcpgen]");
  tcpgen.Read("enabled", &cfg.tcpgen);
  tcpgen.Read("attention_dim", &cfg.attention_dim);
  tcpgen.Read("ool_value_in_output", &cfg.ool_value_in_output);
  tcpgen.CheckUnknown();

  Section train(SubTable(root, "train"), "[train]");
  train.Read("epochs", &cfg.train.epochs);
  train.Read("baseline_epochs", &cfg.baseline_epochs);
  train.Read("learning_rate", &cfg.train.learning_rate);
  train.Read("clip_norm", &cfg.train.clip_norm);
  train.Read("p_drop", &cfg.train.p_drop);
  train.Read("freeze_base", &cfg.train.freeze_base);
  train.Read("from_scratch", &cfg.from_scratch);
  train.Read("shuffle", &cfg.train.shuffle);
  train.CheckUnknown();

  Section decode(SubTable(root, "decode"), "[decode]");
  decode.Read("beam", &cfg.decode.beam);
  decode.Read("threads", &cfg.threads);
  std::vector<std::string> modes;
  decode.Read("modes", &modes);
  if (decode.Has("modes")) {
    cfg.modes.clear();
    for (const auto& m : modes) cfg.modes.push_back(ParseDecodeMode(m));
  }
  decode.CheckUnknown();

  Section biasing(SubTable(root, "biasing"), "[biasing]");
  biasing.Read("n_distractors", &cfg.n_distractors);
  biasing.CheckUnknown();

  Section blmd(SubTable(root, "blmd"), "[blmd]");
  std::string form = FormName(cfg.blmd.form);
  blmd.Read("form", &form);
  if (form == "consistent") {
    cfg.blmd.form = BlmdForm::kConsistent;
  } else if (form == "literal") {
    cfg.blmd.form = BlmdForm::kLiteral;
  } else {
    throw FormatError("[blmd].form must be \"consistent\" or \"literal\"");
  }
  cfg.decode.blmd_form = cfg.blmd.form;
  blmd.Read("add_k", &cfg.blmd.add_k);
  blmd.Read("a1", &cfg.blmd.a1);
  blmd.Read("b1", &cfg.blmd.b1);
  blmd.Read("a2", &cfg.blmd.a2);
  blmd.Read("b2", &cfg.blmd.b2);
  blmd.CheckUnknown();

  Section corpus(SubTable(root, "corpus"), "[corpus]");
  corpus.Read("n_train", &cfg.corpus.n_train);
  corpus.Read("n_dev", &cfg.corpus.n_dev);
  corpus.Read("n_test", &cfg.corpus.n_test);
  corpus.Read("n_fillers", &cfg.corpus.n_fillers);
  corpus.Read("n_rare", &cfg.corpus.n_rare);
  corpus.Read("n_train_tail", &cfg.corpus.n_train_tail);
  corpus.Read("oov_fraction", &cfg.corpus.oov_fraction);
  corpus.Read("rare_rate", &cfg.corpus.rare_rate);
  corpus.Read("train_rare_rate", &cfg.corpus.train_rare_rate);
  corpus.Read("min_words", &cfg.corpus.min_words);
  corpus.Read("max_words", &cfg.corpus.max_words);
  corpus.Read("noise", &cfg.corpus.noise);
  corpus.Read("rare_per_class", &cfg.corpus.rare_per_class);
  corpus.Read("zipf", &cfg.corpus.zipf);
  corpus.Read("n_groups", &cfg.corpus.n_groups);
  corpus.CheckUnknown();

  Section simulate(SubTable(root, "simulate"), "[simulate]");
  std::vector<std::string> variants;
  simulate.Read("variants", &variants);
  for (const auto& v : variants) {
    const EncoderVariant parsed = ParseVariant(v);
    if (std::find(cfg.variants.begin(), cfg.variants.end(), parsed) != cfg.variants.end()) {
      throw FormatError("[simulate].variants lists '" + v + "' twice");
    }
    cfg.variants.push_back(parsed);
  }
  simulate.CheckUnknown();

  for (const auto* grid : {&cfg.blmd.a1, &cfg.blmd.b1, &cfg.blmd.a2, &cfg.blmd.b2}) {
    if (grid->empty()) throw FormatError("[blmd] exponent grids must not be empty");
    for (double v : *grid) {
      if (!(v >= 0)) throw FormatError("[blmd] exponents must be non-negative");
    }
  }
  if (cfg.decode.beam < 1) throw FormatError("[decode].beam must be at least 1");
  if (cfg.n_distractors < 0) throw FormatError("[biasing].n_distractors must be non-negative");
  return cfg;
}

}  // namespace

ExperimentConfig ParseConfig(const std::string& text, const std::filesystem::path& base_dir) {
  try {
    return ParseConfigImpl(text, base_dir);
  } catch (const DomainError& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str(), path.parent_path());
}

void RequirePaths(const ExperimentConfig& cfg, const std::vector<std::string>& required) {
  const std::map<std::string, const std::filesystem::path*> known = {
      {"vocab", &cfg.data.vocab},
      {"rare_list", &cfg.data.rare_list},
      {"oov_list", &cfg.data.oov_list},
      {"train", &cfg.data.train},
      {"train_frames", &cfg.data.train_frames},
      {"test", &cfg.data.test},
      {"test_frames", &cfg.data.test_frames}};
  for (const std::string& key : required) {
    const std::filesystem::path& p = *known.at(key);
    if (p.empty()) throw std::runtime_error("[data]." + key + " is required");
    if (!std::filesystem::exists(p)) {
      throw std::runtime_error("[data]." + key + " does not exist: " + p.string());
    }
  }
}

nlohmann::json ExperimentConfig::ToJson() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["output_dir"] = output_dir.string();
  j["data"] = {{"vocab", data.vocab.string()},
               {"rare_list", data.rare_list.string()},
               {"oov_list", data.oov_list.string()},
               {"train", data.train.string()},
               {"train_frames", data.train_frames.string()},
               {"test", data.test.string()},
               {"test_frames", data.test_frames.string()}};
  j["model"] = {{"embedding_dim", model.embedding_dim},
                {"hidden_dim", model.hidden_dim},
                {"frame_dim", model.frame_dim},
                {"num_classes", model.num_classes}};
  j["gnn"] = {{"variant", std::string(VariantName(gnn.variant))},
              {"layers", gnn.layers},
              {"sage_layers", gnn.sage_layers},
              {"dim", gnn.dim},
              {"tied", gnn.tied},
              {"gcnii_alpha", gnn.gcnii_alpha},
              {"alpha_sage", gnn.alpha_sage},
              {"literal_shortcut", gnn.literal_shortcut}};
  j["tcpgen"] = {{"enabled", tcpgen},
                {"attention_dim", attention_dim}, {"ool_value_in_output", ool_value_in_output}};
  j["train"] = {{"epochs", train.epochs},
                {"baseline_epochs", baseline_epochs},
                {"learning_rate", train.learning_rate},
                {"clip_norm", train.clip_norm},
                {"p_drop", train.p_drop},
                {"freeze_base", train.freeze_base},
                {"from_scratch", from_scratch},
                {"shuffle", train.shuffle}};
  std::vector<std::string> mode_names;
  for (DecodeMode m : modes) mode_names.push_back(DecodeModeName(m));
  j["decode"] = {{"beam", decode.beam}, {"modes", mode_names}};
  j["biasing"] = {{"n_distractors", n_distractors}};
  j["blmd"] = {{"form", FormName(blmd.form)}, {"add_k", blmd.add_k}, {"a1", blmd.a1},
               {"b1", blmd.b1},               {"a2", blmd.a2},       {"b2", blmd.b2}};
  j["corpus"] = {{"n_train", corpus.n_train},
                 {"n_dev", corpus.n_dev},
                 {"n_test", corpus.n_test},
                 {"n_fillers", corpus.n_fillers},
                 {"n_rare", corpus.n_rare},
                 {"n_train_tail", corpus.n_train_tail},
                 {"oov_fraction", corpus.oov_fraction},
                 {"rare_rate", corpus.rare_rate},
                 {"train_rare_rate", corpus.train_rare_rate},
                 {"min_words", corpus.min_words},
                 {"max_words", corpus.max_words},
                 {"noise", corpus.noise},
                 {"rare_per_class", corpus.rare_per_class},
                 {"zipf", corpus.zipf},
                 {"n_groups", corpus.n_groups}};
  std::vector<std::string> names;
  for (EncoderVariant v : variants) names.emplace_back(VariantName(v));
  j["simulate"] = {{"variants", names}};
  return j;
}

std::string ExperimentConfig::Hash() const {
  nlohmann::json j = ToJson();
  // Where files go does not change results.
  j.erase("output_dir");
  return Sha256Hex(j.dump());
}

}  // namespace treebias
