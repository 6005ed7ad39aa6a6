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

#include "treebias/wordpiece.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "treebias/errors.h"

namespace treebias {

std::string ToLower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

namespace {

bool EndsWithMarker(std::string_view s) {
  return s.size() > kWordEndMarker.size() && s.ends_with(kWordEndMarker);
}

std::string StripMarker(std::string_view s) {
  if (EndsWithMarker(s)) s.remove_suffix(kWordEndMarker.size());
  return std::string(s);
}

}  // namespace

Vocab Vocab::FromPieces(std::vector<std::string> pieces) {
  if (pieces.empty()) throw FormatError("vocabulary is empty");
  Vocab v;
  std::unordered_set<std::string> seen;
  std::unordered_set<std::string> folded;
  for (const auto& p : pieces) {
    if (p.empty()) throw FormatError("vocabulary contains an empty piece");
    if (p == kWordEndMarker) {
      throw FormatError("piece consisting only of the word-end marker");
    }
    if (!seen.insert(p).second) throw FormatError("duplicate piece '" + p + "'");
    if (!folded.insert(ToLower(p)).second) v.cased_ = true;
  }
  v.pieces_ = std::move(pieces);
  for (int i = 0; i < v.size(); ++i) v.index_.emplace(v.Fold(v.pieces_[i]), i);
  return v;
}

Vocab Vocab::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open vocabulary '" + path.string() + "'");
  std::vector<std::string> pieces;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) +
                        ": empty piece");
    }
    pieces.push_back(line);
  }
  return FromPieces(std::move(pieces));
}

std::string Vocab::Fold(std::string_view s) const {
  return cased_ ? std::string(s) : ToLower(s);
}

std::optional<int> Vocab::Find(std::string_view piece) const {
  auto it = index_.find(Fold(piece));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocab::piece(int id) const {
  if (!IsPiece(id)) throw DomainError("piece id out of range: " + std::to_string(id));
  return pieces_[id];
}

bool Vocab::IsWordEnd(int id) const { return EndsWithMarker(piece(id)); }

TokenSeq Tokenize(std::string_view word, const Vocab& vocab) {
  if (word.empty()) throw DomainError("cannot tokenize an empty word");
  TokenSeq seq;
  seq.word = vocab.Fold(word);
  const std::string& w = seq.word;
  const std::string marker(kWordEndMarker);
  size_t pos = 0;
  while (pos < w.size()) {
    bool matched = false;
    for (size_t len = w.size() - pos; len > 0; --len) {
      const bool final = pos + len == w.size();
      std::string candidate = w.substr(pos, len);
      if (final) candidate += marker;
      if (auto id = vocab.Find(candidate)) {
        seq.pieces.push_back(*id);
        pos += len;
        matched = true;
        break;
      }
    }
    if (!matched) throw CoverageError(w, w.substr(pos));
  }
  return seq;
}

TokenSeq FromPieceStrings(std::string_view word,
                          std::span<const std::string> pieces,
                          const Vocab& vocab) {
  TokenSeq seq;
  seq.word = vocab.Fold(word);
  if (pieces.empty()) throw FormatError("no pieces given for '" + seq.word + "'");
  std::string spelled;
  for (size_t i = 0; i < pieces.size(); ++i) {
    auto id = vocab.Find(pieces[i]);
    if (!id) throw CoverageError(seq.word, pieces[i]);
    const bool last = i + 1 == pieces.size();
    if (vocab.IsWordEnd(*id) != last) {
      throw FormatError("word-end marker misplaced in tokenization of '" +
                        seq.word + "'");
    }
    spelled += vocab.Fold(StripMarker(vocab.piece(*id)));
    seq.pieces.push_back(*id);
  }
  if (spelled != seq.word) {
    throw FormatError("pieces spell '" + spelled + "', expected '" + seq.word + "'");
  }
  return seq;
}

DetokenizedText Detokenize(std::span<const int> pieces, const Vocab& vocab) {
  DetokenizedText out;
  std::string current;
  bool open = false;
  for (int id : pieces) {
    if (!vocab.IsPiece(id)) {
      throw DomainError("cannot detokenize id " + std::to_string(id));
    }
    const std::string& p = vocab.piece(id);
    current += vocab.Fold(StripMarker(p));
    open = true;
    if (EndsWithMarker(p)) {
      out.words.push_back(std::move(current));
      current.clear();
      open = false;
    }
  }
  if (open) {
    out.words.push_back(std::move(current));
    out.last_incomplete = true;
  }
  return out;
}

std::vector<TokenSeq> TokenizeAll(std::span<const std::string> words,
                                  const Vocab& vocab) {
  std::vector<TokenSeq> out;
  std::vector<std::string> failed;
  for (const auto& w : words) {
    try {
      out.push_back(Tokenize(w, vocab));
    } catch (const CoverageError& e) {
      failed.push_back(w);
    }
  }
  if (!failed.empty()) {
    std::string msg = "words not covered by the vocabulary:";
    for (const auto& f : failed) msg += " " + f;
    throw FormatError(msg);
  }
  return out;
}

std::vector<TokenSeq> LoadBiasingList(const std::filesystem::path& path,
                                      const Vocab& vocab) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open biasing list '" + path.string() + "'");
  std::vector<TokenSeq> out;
  std::vector<std::string> failed;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto tab = line.find('\t');
    try {
      if (tab == std::string::npos) {
        std::istringstream ss(line);
        std::string word;
        ss >> word;
        out.push_back(Tokenize(word, vocab));
      } else {
        std::istringstream ss(line.substr(tab + 1));
        std::vector<std::string> pieces;
        for (std::string p; ss >> p;) pieces.push_back(p);
        out.push_back(FromPieceStrings(line.substr(0, tab), pieces, vocab));
      }
    } catch (const CoverageError& e) {
      failed.push_back(e.word());
    }
  }
  if (!failed.empty()) {
    std::string msg = "words not covered by the vocabulary:";
    for (const auto& f : failed) msg += " " + f;
    throw FormatError(msg);
  }
  return out;
}

}  // namespace treebias
