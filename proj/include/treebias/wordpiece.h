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

#ifndef TREEBIAS_WORDPIECE_H_
#define TREEBIAS_WORDPIECE_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace treebias {

// Suffix that marks a word-final piece, e.g. "er_".
inline constexpr std::string_view kWordEndMarker = "_";

// Word-piece inventory. Real pieces occupy ids [0, size()); the special
// symbols follow in the order NULL, OOL, BOS, so a transducer distribution
// over pieces plus blank is simply size() + 1 wide.
class Vocab {
 public:
  Vocab() = default;
  static Vocab FromPieces(std::vector<std::string> pieces);
  static Vocab Load(const std::filesystem::path& path);

  int size() const { return static_cast<int>(pieces_.size()); }
  int null_id() const { return size(); }
  int ool_id() const { return size() + 1; }
  int bos_id() const { return size() + 2; }
  // Pieces plus the three specials.
  int total_size() const { return size() + 3; }

  std::optional<int> Find(std::string_view piece) const;
  const std::string& piece(int id) const;
  bool IsWordEnd(int id) const;
  bool IsPiece(int id) const { return id >= 0 && id < size(); }

  // True when two pieces differ only by case; matching is then exact.
  bool cased() const { return cased_; }

  // Lookup key under the vocab's case policy.
  std::string Fold(std::string_view s) const;

  const std::vector<std::string>& pieces() const { return pieces_; }

 private:
  std::vector<std::string> pieces_;
  std::unordered_map<std::string, int> index_;
  bool cased_ = false;
};

struct TokenSeq {
  std::string word;
  std::vector<int> pieces;
};

// Greedy longest-match segmentation. The final piece must be a word-end
// piece; inner pieces must not be. Throws CoverageError naming the suffix
// that could not be matched.
TokenSeq Tokenize(std::string_view word, const Vocab& vocab);

// Builds a TokenSeq from explicit piece strings, validating that exactly
// the last piece ends the word and that the pieces spell the word.
TokenSeq FromPieceStrings(std::string_view word,
                          std::span<const std::string> pieces,
                          const Vocab& vocab);

struct DetokenizedText {
  std::vector<std::string> words;
  // The last word had no word-end piece.
  bool last_incomplete = false;
};

DetokenizedText Detokenize(std::span<const int> pieces, const Vocab& vocab);

// Reads a biasing list: either one word per line, or the pre-tokenized
// form "word<TAB>piece piece ...". Blank lines are skipped. Words that
// fail tokenization are collected and reported together in a FormatError.
std::vector<TokenSeq> LoadBiasingList(const std::filesystem::path& path,
                                      const Vocab& vocab);

std::vector<TokenSeq> TokenizeAll(std::span<const std::string> words,
                                  const Vocab& vocab);

std::string ToLower(std::string_view s);

}  // namespace treebias

#endif  // TREEBIAS_WORDPIECE_H_
