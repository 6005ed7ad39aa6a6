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

#ifndef TREEBIAS_PARAM_STORE_H_
#define TREEBIAS_PARAM_STORE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "treebias/tensor.h"

namespace treebias {

inline constexpr int kCheckpointFormatVersion = 1;

// Named, shaped parameters with gradient buffers.
class ParamStore {
 public:
  struct Entry {
    Tensor value;
    Tensor grad;
    bool trainable = true;
  };

  // Throws DomainError if the name is taken.
  Tensor& Add(const std::string& name, Tensor init);
  bool Contains(const std::string& name) const { return entries_.count(name) > 0; }

  Entry& entry(const std::string& name);
  const Entry& entry(const std::string& name) const;
  Tensor& value(const std::string& name) { return entry(name).value; }
  const Tensor& value(const std::string& name) const { return entry(name).value; }
  Tensor& grad(const std::string& name) { return entry(name).grad; }

  // Freezes or unfreezes every parameter whose name starts with prefix.
  void SetTrainable(const std::string& prefix, bool trainable);

  std::vector<std::string> Names() const;
  size_t NumValues() const;

  void ZeroGrad();
  double GradNorm() const;
  // Rescales gradients so their joint L2 norm is at most max_norm.
  // Returns the norm before clipping.
  double ClipGradNorm(double max_norm);
  void SgdStep(double learning_rate);

  // Copies values for every name present in both stores.
  void CopyValuesFrom(const ParamStore& other);

  nlohmann::json ToJson() const;
  static ParamStore FromJson(const nlohmann::json& j);
  // {"format_version", "params": {name: {"shape", "values"}}, "meta"}.
  void Save(const std::filesystem::path& path, const nlohmann::json& meta = {}) const;
  static ParamStore Load(const std::filesystem::path& path, nlohmann::json* meta = nullptr);

 private:
  std::map<std::string, Entry> entries_;
};

Tensor XavierUniform(int rows, int cols, std::mt19937_64& rng);
Tensor Gaussian(int rows, int cols, double stddev, std::mt19937_64& rng);

// Writes via a temporary file and rename.
void WriteFileAtomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace treebias

#endif  // TREEBIAS_PARAM_STORE_H_
