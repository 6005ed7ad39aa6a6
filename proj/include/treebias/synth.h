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

#ifndef TREEBIAS_SYNTH_H_
#define TREEBIAS_SYNTH_H_

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "treebias/wordpiece.h"

namespace treebias {

// Synthetic contextual task. Words are strings of two-letter syllables;
// each syllable is a piece ("ba", or "ba_" at the end of a word). Every
// piece emits one observation frame carrying its class, with class noise.
// Filler pieces have a class each; rare syllables share classes, several
// per class, so a frame alone cannot tell them apart.
struct SynthConfig {
  int n_train = 2000;
  int n_dev = 200;
  int n_test = 400;
  int n_fillers = 120;
  int n_rare = 50;
  // Long tail of further rare words that occur only in the training split,
  // so that no single rare word is frequent there.
  int n_train_tail = 400;
  // Fraction of rare words that never occur in the training split.
  double oov_fraction = 0.4;
  // Probability that a word slot holds a rare word, in the dev and test
  // splits and in the training split.
  double rare_rate = 0.2;
  double train_rare_rate = 0.02;
  int min_words = 3;
  int max_words = 7;
  // Probability that a frame is replaced by a uniformly drawn class.
  double noise = 0.05;
  // Rare syllables that share one filler syllable's class.
  int rare_per_class = 2;
  // Zipf exponent of the filler word distribution.
  double zipf = 1.0;
  // Utterances are dealt round-robin into this many groups for the sign test.
  int n_groups = 20;
};

struct Utterance {
  std::vector<std::string> words;
  std::vector<int> pieces;
  std::vector<int> frames;
  int group = 0;
};

struct SynthCorpus {
  Vocab vocab;
  // Class of each real piece.
  std::vector<int> piece_class;
  int num_classes = 0;
  std::vector<std::string> fillers;
  std::vector<std::string> rare_words;
  // Rare words held out of the training split.
  std::vector<std::string> oov_words;
  // Rare words the training split draws from: the in-vocabulary part of
  // rare_words plus the training tail.
  std::vector<std::string> train_rare_words;
  std::vector<Utterance> train;
  std::vector<Utterance> dev;
  std::vector<Utterance> test;

  // SHA-256 over the lexicon and every split.
  std::string Digest() const;
};

SynthCorpus SynthesizeCorpus(const SynthConfig& cfg, std::mt19937_64& rng);

// One utterance per line, space-separated words.
std::string CorpusText(const std::vector<Utterance>& utts);
// One utterance per line, space-separated frame classes.
std::string FramesText(const std::vector<Utterance>& utts);

std::vector<std::vector<std::string>> ReadCorpus(const std::filesystem::path& path);
std::vector<std::vector<int>> ReadFrames(const std::filesystem::path& path);
std::vector<std::string> ReadWordList(const std::filesystem::path& path);

std::vector<std::string> SplitWords(const std::string& line);
std::string JoinWords(const std::vector<std::string>& words);

}  // namespace treebias

#endif  // TREEBIAS_SYNTH_H_
