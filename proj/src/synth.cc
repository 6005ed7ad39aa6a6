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

#include "treebias/synth.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "treebias/digest.h"
#include "treebias/errors.h"

namespace treebias {

namespace {

constexpr std::string_view kFillerConsonants = "bdfgkl";
constexpr std::string_view kRareConsonants = "mnpr";
constexpr std::string_view kVowels = "aeio";

std::vector<std::string> Syllables(std::string_view consonants) {
  std::vector<std::string> out;
  for (char c : consonants) {
    for (char v : kVowels) out.push_back(std::string{c, v});
  }
  return out;
}

// Distinct words of min_len..max_len syllables; the last syllable takes
// the word-end marker when tokenized.
std::vector<std::string> MakeWords(const std::vector<std::string>& syllables, int count,
                                   int min_len, int max_len, std::set<std::string>* used,
                                   std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len_dist(min_len, max_len);
  std::uniform_int_distribution<size_t> syl_dist(0, syllables.size() - 1);
  std::vector<std::string> words;
  int attempts = 0;
  while (static_cast<int>(words.size()) < count) {
    if (++attempts > 1000 * (count + 1)) throw DomainError("cannot draw enough distinct words");
    std::string w;
    const int len = len_dist(rng);
    for (int i = 0; i < len; ++i) w += syllables[syl_dist(rng)];
    if (used->insert(w).second) words.push_back(w);
  }
  return words;
}

}  // namespace

SynthCorpus SynthesizeCorpus(const SynthConfig& cfg, std::mt19937_64& rng) {
  if (cfg.n_train < 0 || cfg.n_dev < 0 || cfg.n_test < 0 || cfg.n_fillers < 1 ||
      cfg.n_rare < 0 || cfg.n_train_tail < 0 || cfg.min_words < 1 || cfg.max_words < cfg.min_words ||
      cfg.rare_per_class < 1 || cfg.n_groups < 1) {
    throw DomainError("invalid synthetic corpus configuration");
  }
  if (!(cfg.oov_fraction >= 0 && cfg.oov_fraction <= 1) ||
      !(cfg.rare_rate >= 0 && cfg.rare_rate <= 1) ||
      !(cfg.train_rare_rate >= 0 && cfg.train_rare_rate <= 1) || !(cfg.noise >= 0 && cfg.noise <= 1)) {
    throw DomainError("synthetic rates must lie in [0, 1]");
  }
  const std::vector<std::string> filler_syl = Syllables(kFillerConsonants);
  const std::vector<std::string> rare_syl = Syllables(kRareConsonants);
  const int n_filler_syl = static_cast<int>(filler_syl.size());
  if (rare_syl.size() % cfg.rare_per_class != 0) {
    throw DomainError("rare_per_class does not fit the syllable inventory");
  }

  // Piece ids: filler inner, filler final, rare inner, rare final.
  SynthCorpus corpus;
  std::vector<std::string> pieces;
  for (const auto& s : filler_syl) pieces.push_back(s);
  for (const auto& s : filler_syl) pieces.push_back(s + std::string(kWordEndMarker));
  for (const auto& s : rare_syl) pieces.push_back(s);
  for (const auto& s : rare_syl) pieces.push_back(s + std::string(kWordEndMarker));
  corpus.vocab = Vocab::FromPieces(pieces);

  // Classes: one per filler piece, then one per group of rare_per_class
  // rare syllables (inner and final forms apart).
  const int n_rare_syl = static_cast<int>(rare_syl.size());
  const int shared = n_rare_syl / cfg.rare_per_class;
  corpus.num_classes = 2 * n_filler_syl + 2 * shared;
  corpus.piece_class.resize(pieces.size());
  for (int i = 0; i < 2 * n_filler_syl; ++i) corpus.piece_class[i] = i;
  for (int j = 0; j < n_rare_syl; ++j) {
    corpus.piece_class[2 * n_filler_syl + j] = 2 * n_filler_syl + j % shared;
    corpus.piece_class[2 * n_filler_syl + n_rare_syl + j] = 2 * n_filler_syl + shared + j % shared;
  }

  std::set<std::string> used;
  corpus.fillers = MakeWords(filler_syl, cfg.n_fillers, 1, 3, &used, rng);
  corpus.rare_words = MakeWords(rare_syl, cfg.n_rare, 2, 3, &used, rng);
  const int n_oov = static_cast<int>(std::lround(cfg.oov_fraction * cfg.n_rare));
  corpus.oov_words.assign(corpus.rare_words.end() - n_oov, corpus.rare_words.end());
  corpus.train_rare_words.assign(corpus.rare_words.begin(), corpus.rare_words.end() - n_oov);
  const std::vector<std::string> tail = MakeWords(rare_syl, cfg.n_train_tail, 2, 3, &used, rng);
  corpus.train_rare_words.insert(corpus.train_rare_words.end(), tail.begin(), tail.end());

  std::vector<double> weights;
  for (int r = 0; r < cfg.n_fillers; ++r) weights.push_back(1.0 / std::pow(r + 1.0, cfg.zipf));
  std::discrete_distribution<int> filler_dist(weights.begin(), weights.end());
  std::uniform_int_distribution<int> len_dist(cfg.min_words, cfg.max_words);
  std::bernoulli_distribution noisy(cfg.noise);
  std::uniform_int_distribution<int> class_dist(0, corpus.num_classes - 1);

  auto make_split = [&](int n, const std::vector<std::string>& rare_pool, double rate) {
    std::bernoulli_distribution rare_slot(rate);
    std::vector<Utterance> out;
    for (int u = 0; u < n; ++u) {
      Utterance utt;
      utt.group = u % cfg.n_groups;
      const int len = len_dist(rng);
      for (int i = 0; i < len; ++i) {
        if (!rare_pool.empty() && rare_slot(rng)) {
          std::uniform_int_distribution<size_t> pick(0, rare_pool.size() - 1);
          utt.words.push_back(rare_pool[pick(rng)]);
        } else {
          utt.words.push_back(corpus.fillers[filler_dist(rng)]);
        }
      }
      for (const std::string& w : utt.words) {
        for (int p : Tokenize(w, corpus.vocab).pieces) utt.pieces.push_back(p);
      }
      for (int p : utt.pieces) {
        const bool flip = noisy(rng);
        const int drawn = class_dist(rng);
        utt.frames.push_back(flip ? drawn : corpus.piece_class[p]);
      }
      out.push_back(std::move(utt));
    }
    return out;
  };
  corpus.train = make_split(cfg.n_train, corpus.train_rare_words, cfg.train_rare_rate);
  corpus.dev = make_split(cfg.n_dev, corpus.rare_words, cfg.rare_rate);
  corpus.test = make_split(cfg.n_test, corpus.rare_words, cfg.rare_rate);
  return corpus;
}

std::string SynthCorpus::Digest() const {
  std::ostringstream os;
  for (const auto& p : vocab.pieces()) os << p << ' ';
  os << '\n';
  for (int c : piece_class) os << c << ' ';
  os << '\n' << JoinWords(fillers) << '\n' << JoinWords(rare_words) << '\n'
     << JoinWords(oov_words) << '\n' << JoinWords(train_rare_words) << '\n';
  for (const auto* split : {&train, &dev, &test}) {
    os << CorpusText(*split) << FramesText(*split);
    for (const Utterance& u : *split) os << u.group << ' ';
    os << '\n';
  }
  return Sha256Hex(os.str());
}

std::string JoinWords(const std::vector<std::string>& words) {
  std::string out;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

std::vector<std::string> SplitWords(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

std::string CorpusText(const std::vector<Utterance>& utts) {
  std::string out;
  for (const Utterance& u : utts) out += JoinWords(u.words) + '\n';
  return out;
}

std::string FramesText(const std::vector<Utterance>& utts) {
  std::string out;
  for (const Utterance& u : utts) {
    for (size_t i = 0; i < u.frames.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(u.frames[i]);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> ReadLines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::vector<std::vector<std::string>> ReadCorpus(const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> out;
  for (const std::string& line : ReadLines(path)) out.push_back(SplitWords(line));
  return out;
}

std::vector<std::vector<int>> ReadFrames(const std::filesystem::path& path) {
  std::vector<std::vector<int>> out;
  int line_no = 0;
  for (const std::string& line : ReadLines(path)) {
    ++line_no;
    std::vector<int> frames;
    for (const std::string& tok : SplitWords(line)) {
      size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || v < 0) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad frame '" +
                          tok + "'");
      }
      frames.push_back(v);
    }
    out.push_back(std::move(frames));
  }
  return out;
}

std::vector<std::string> ReadWordList(const std::filesystem::path& path) {
  std::vector<std::string> out;
  for (const std::string& line : ReadLines(path)) {
    for (const std::string& w : SplitWords(line)) out.push_back(w);
  }
  return out;
}

}  // namespace treebias
