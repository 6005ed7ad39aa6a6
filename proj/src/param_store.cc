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

#include "treebias/param_store.h"

#include <cmath>
#include <fstream>

#include "treebias/errors.h"

namespace treebias {

Tensor& ParamStore::Add(const std::string& name, Tensor init) {
  if (Contains(name)) throw DomainError("parameter '" + name + "' already exists");
  Entry e;
  e.grad = Tensor(init.rows(), init.cols());
  e.value = std::move(init);
  return entries_.emplace(name, std::move(e)).first->second.value;
}

ParamStore::Entry& ParamStore::entry(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw DomainError("unknown parameter '" + name + "'");
  return it->second;
}

const ParamStore::Entry& ParamStore::entry(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw DomainError("unknown parameter '" + name + "'");
  return it->second;
}

void ParamStore::SetTrainable(const std::string& prefix, bool trainable) {
  for (auto& [name, e] : entries_) {
    if (name.starts_with(prefix)) e.trainable = trainable;
  }
}

std::vector<std::string> ParamStore::Names() const {
  std::vector<std::string> names;
  for (const auto& [name, e] : entries_) names.push_back(name);
  return names;
}

size_t ParamStore::NumValues() const {
  size_t n = 0;
  for (const auto& [name, e] : entries_) n += e.value.size();
  return n;
}

void ParamStore::ZeroGrad() {
  for (auto& [name, e] : entries_) e.grad.Fill(0.0);
}

double ParamStore::GradNorm() const {
  double s = 0.0;
  for (const auto& [name, e] : entries_) {
    if (!e.trainable) continue;
    for (double g : e.grad.data()) s += g * g;
  }
  return std::sqrt(s);
}

double ParamStore::ClipGradNorm(double max_norm) {
  const double norm = GradNorm();
  if (!std::isfinite(norm)) throw NumericError("non-finite gradient norm");
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (auto& [name, e] : entries_) {
      if (!e.trainable) continue;
      for (double& g : e.grad.data()) g *= scale;
    }
  }
  return norm;
}

void ParamStore::SgdStep(double learning_rate) {
  for (auto& [name, e] : entries_) {
    if (!e.trainable) continue;
    auto v = e.value.data();
    auto g = e.grad.data();
    for (size_t i = 0; i < v.size(); ++i) v[i] -= learning_rate * g[i];
  }
}

void ParamStore::CopyValuesFrom(const ParamStore& other) {
  for (auto& [name, e] : entries_) {
    auto it = other.entries_.find(name);
    if (it == other.entries_.end()) continue;
    if (!it->second.value.SameShape(e.value)) {
      throw DomainError("shape mismatch copying parameter '" + name + "'");
    }
    e.value = it->second.value;
  }
}

nlohmann::json ParamStore::ToJson() const {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [name, e] : entries_) {
    params[name] = {{"shape", {e.value.rows(), e.value.cols()}},
                    {"values", e.value.values()}};
  }
  return {{"format_version", kCheckpointFormatVersion}, {"params", params}};
}

ParamStore ParamStore::FromJson(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != kCheckpointFormatVersion) {
      throw FormatError("unsupported checkpoint format version");
    }
    ParamStore store;
    for (const auto& [name, p] : j.at("params").items()) {
      const auto shape = p.at("shape").get<std::vector<int>>();
      if (shape.size() != 2) throw FormatError("parameter '" + name + "' is not rank 2");
      store.Add(name, Tensor(shape[0], shape[1], p.at("values").get<std::vector<double>>()));
    }
    return store;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed checkpoint: ") + e.what());
  } catch (const DomainError& e) {
    throw FormatError(std::string("malformed checkpoint: ") + e.what());
  }
}

void ParamStore::Save(const std::filesystem::path& path, const nlohmann::json& meta) const {
  auto j = ToJson();
  if (!meta.is_null()) j["meta"] = meta;
  WriteFileAtomic(path, j.dump());
}

ParamStore ParamStore::Load(const std::filesystem::path& path, nlohmann::json* meta) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open checkpoint '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed checkpoint: ") + e.what());
  }
  if (meta != nullptr) *meta = j.value("meta", nlohmann::json::object());
  return FromJson(j);
}

Tensor XavierUniform(int rows, int cols, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / double(rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Tensor t(rows, cols);
  for (double& v : t.data()) v = dist(rng);
  return t;
}

Tensor Gaussian(int rows, int cols, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Tensor t(rows, cols);
  for (double& v : t.data()) v = dist(rng);
  return t;
}

void WriteFileAtomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write '" + tmp.string() + "'");
    out << contents;
    if (!out) throw FormatError("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace treebias
