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

#include <fstream>

#include "doctest.h"
#include "test_util.h"
#include "treebias/errors.h"
#include "treebias/wordpiece.h"

namespace treebias {
namespace {

using testing::DataDir;
using testing::Fig2Vocab;

std::vector<std::string> PieceStrings(const TokenSeq& seq, const Vocab& vocab) {
  std::vector<std::string> out;
  for (int id : seq.pieces) out.push_back(vocab.piece(id));
  return out;
}

TEST_CASE("load_vocab assigns line ids and appends specials") {
  const Vocab v = Vocab::Load(DataDir() / "fig2_vocab.txt");
  CHECK(v.size() == 8);
  CHECK(v.Find("Tur") == 0);
  CHECK(v.null_id() == 8);
  CHECK(v.ool_id() == 9);
  CHECK(v.bos_id() == 10);
  CHECK(v.total_size() == 11);
}

TEST_CASE("load_vocab rejects duplicates, empty files and missing files") {
  CHECK_THROWS_AS(Vocab::Load(DataDir() / "dup_vocab.txt"), FormatError);
  CHECK_THROWS_AS(Vocab::Load(DataDir() / "empty_list.txt"), FormatError);
  CHECK_THROWS_AS(Vocab::Load(DataDir() / "no_such_vocab.txt"), FormatError);
}

TEST_CASE("tokenize uses greedy longest match with a word-end final piece") {
  const Vocab v = Fig2Vocab();
  CHECK(PieceStrings(Tokenize("turner", v), v) == std::vector<std::string>{"Tur", "n", "er_"});
  CHECK(PieceStrings(Tokenize("turin", v), v) == std::vector<std::string>{"Tur", "in_"});
  CHECK(PieceStrings(Tokenize("vignette", v), v) ==
        std::vector<std::string>{"vi", "gn", "et", "te_"});
}

TEST_CASE("tokenize reports the failing suffix") {
  const Vocab v = Fig2Vocab();
  try {
    Tokenize("qqq", v);
    FAIL("expected a coverage error");
  } catch (const CoverageError& e) {
    CHECK(e.word() == "qqq");
    CHECK(e.suffix() == "qqq");
  }
  // "turn" needs a word-end piece at the end.
  CHECK_THROWS_AS(Tokenize("turn", v), CoverageError);
}

TEST_CASE("detokenize splits at word ends and flags a trailing partial word") {
  const Vocab v = Fig2Vocab();
  const int tur = *v.Find("Tur"), in = *v.Find("in_"), n = *v.Find("n");
  const std::vector<int> turin = {tur, in};
  DetokenizedText d = Detokenize(turin, v);
  CHECK(d.words == std::vector<std::string>{"turin"});
  CHECK_FALSE(d.last_incomplete);

  d = Detokenize(std::vector<int>{}, v);
  CHECK(d.words.empty());
  CHECK_FALSE(d.last_incomplete);

  d = Detokenize(std::vector<int>{tur, n}, v);
  CHECK(d.words == std::vector<std::string>{"turn"});
  CHECK(d.last_incomplete);

  CHECK_THROWS_AS(Detokenize(std::vector<int>{v.ool_id()}, v), DomainError);
}

TEST_CASE("tokenize then detokenize round-trips every accepted word") {
  const Vocab v = Fig2Vocab();
  std::mt19937_64 rng(7);
  const std::vector<std::string> inner = {"Tur", "n", "vi", "gn", "et"};
  const std::vector<std::string> final = {"er_", "in_", "te_"};
  int accepted = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::string word;
    const int len = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int i = 0; i < len; ++i) word += ToLower(inner[rng() % inner.size()]);
    const std::string& last = final[rng() % final.size()];
    word += last.substr(0, last.size() - 1);
    TokenSeq seq;
    try {
      seq = Tokenize(word, v);
    } catch (const CoverageError&) {
      continue;
    }
    ++accepted;
    CHECK(Tokenize(word, v).pieces == seq.pieces);
    const DetokenizedText d = Detokenize(seq.pieces, v);
    REQUIRE(d.words.size() == 1);
    CHECK(d.words[0] == word);
    CHECK_FALSE(d.last_incomplete);
    for (size_t i = 0; i < seq.pieces.size(); ++i) {
      CHECK(v.IsWordEnd(seq.pieces[i]) == (i + 1 == seq.pieces.size()));
    }
  }
  CHECK(accepted > 100);
}

TEST_CASE("biasing lists load plain and pre-tokenized forms") {
  const Vocab v = Fig2Vocab();
  const auto plain = LoadBiasingList(DataDir() / "fig2_list.txt", v);
  REQUIRE(plain.size() == 3);
  CHECK(plain[0].word == "turner");
  const auto pre = LoadBiasingList(DataDir() / "fig2_pretokenized.txt", v);
  REQUIRE(pre.size() == 2);
  CHECK(PieceStrings(pre[1], v) == std::vector<std::string>{"Tur", "in_"});
  CHECK(LoadBiasingList(DataDir() / "empty_list.txt", v).empty());
}

TEST_CASE("pre-tokenized entries must spell the word with one final marker") {
  const Vocab v = Fig2Vocab();
  const std::vector<std::string> wrong = {"Tur", "er_"};
  CHECK_THROWS_AS(FromPieceStrings("turin", wrong, v), FormatError);
  const std::vector<std::string> early = {"in_", "Tur"};
  CHECK_THROWS_AS(FromPieceStrings("inTur", early, v), FormatError);
}

TEST_CASE("case folding follows the vocabulary") {
  const Vocab folded = Fig2Vocab();
  CHECK_FALSE(folded.cased());
  CHECK(Tokenize("TURIN", folded).pieces == Tokenize("turin", folded).pieces);
  const Vocab cased = Vocab::FromPieces({"A_", "a_"});
  CHECK(cased.cased());
  CHECK(Tokenize("A", cased).pieces == std::vector<int>{0});
  CHECK(Tokenize("a", cased).pieces == std::vector<int>{1});
}

}  // namespace
}  // namespace treebias
