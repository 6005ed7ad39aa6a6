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

#ifndef TREEBIAS_ERRORS_H_
#define TREEBIAS_ERRORS_H_

#include <stdexcept>
#include <string>

namespace treebias {

// Malformed input file (vocab, biasing list, config, checkpoint).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A word cannot be segmented with the vocabulary.
class CoverageError : public std::runtime_error {
 public:
  CoverageError(const std::string& word, const std::string& suffix)
      : std::runtime_error("cannot tokenize '" + word +
                           "': no piece matches suffix '" + suffix + "'"),
        word_(word),
        suffix_(suffix) {}
  const std::string& word() const { return word_; }
  const std::string& suffix() const { return suffix_; }

 private:
  std::string word_;
  std::string suffix_;
};

// Shape mismatch, invalid id, or an argument outside its documented range.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// NaN/Inf produced or detected during a computation.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace treebias

#endif  // TREEBIAS_ERRORS_H_
