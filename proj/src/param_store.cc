// Copyright 2026 The Coref Authors.
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

#include "coref/param_store.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "coref/errors.h"

namespace coref {

const Tensor& ParamStore::Get(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw CheckpointError("missing parameter " + name);
  return it->second;
}

Tensor& ParamStore::Mutable(const std::string& name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw CheckpointError("missing parameter " + name);
  return it->second;
}

void ParamStore::Set(const std::string& name, Tensor value) {
  tensors_[name] = std::move(value);
}

void ParamStore::InitUniform(const std::string& name, size_t rows, size_t cols,
                             double scale, std::mt19937_64& rng) {
  Tensor t(rows, cols);
  for (double& v : t.data()) v = scale * (2.0 * UniformUnit(rng) - 1.0);
  Set(name, std::move(t));
}

size_t ParamStore::TotalSize() const {
  size_t n = 0;
  for (const auto& [name, t] : tensors_) n += t.size();
  return n;
}

Gradients ParamStore::ZeroGradients() const {
  Gradients grads;
  for (const auto& [name, t] : tensors_) grads.emplace(name, Tensor(t.rows(), t.cols()));
  return grads;
}

void ParamStore::Write(std::ostream& out) const {
  out << "coref-params " << kFormatVersion << "\n";
  for (const auto& [key, value] : metadata_) {
    if (value.find('\n') != std::string::npos) {
      throw CheckpointError("metadata value for " + key + " contains a newline");
    }
    out << "meta " << key << " " << value << "\n";
  }
  char buf[64];
  for (const auto& [name, t] : tensors_) {
    out << "tensor " << name << " " << t.rows() << " " << t.cols() << "\n";
    for (size_t i = 0; i < t.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%a", t[i]);
      out << buf << ((i + 1) % t.cols() == 0 ? '\n' : ' ');
    }
  }
  out << "end\n";
}

ParamStore ParamStore::Read(std::istream& in) {
  ParamStore store;
  std::string line;
  if (!std::getline(in, line)) throw CheckpointError("empty checkpoint");
  {
    std::istringstream header(line);
    std::string magic;
    int version = 0;
    if (!(header >> magic >> version) || magic != "coref-params") {
      throw CheckpointError("not a coref checkpoint");
    }
    if (version != kFormatVersion) {
      throw CheckpointError("unsupported checkpoint version " +
                            std::to_string(version));
    }
  }
  while (std::getline(in, line)) {
    if (line == "end") return store;
    std::istringstream rec(line);
    std::string kind, name;
    rec >> kind >> name;
    if (kind == "meta") {
      std::string value;
      std::getline(rec, value);
      if (!value.empty() && value.front() == ' ') value.erase(0, 1);
      store.metadata_[name] = value;
    } else if (kind == "tensor") {
      size_t rows = 0, cols = 0;
      if (!(rec >> rows >> cols)) {
        throw CheckpointError("bad shape for tensor " + name);
      }
      std::vector<double> data(rows * cols);
      std::string token;
      for (double& v : data) {
        if (!(in >> token)) throw CheckpointError("truncated tensor " + name);
        char* end = nullptr;
        v = std::strtod(token.c_str(), &end);
        if (end == token.c_str() || *end != '\0') {
          throw CheckpointError("bad value '" + token + "' in tensor " + name);
        }
      }
      if (!data.empty()) std::getline(in, line);  // rest of the last value line
      store.tensors_[name] = Tensor(rows, cols, std::move(data));
    } else if (!line.empty()) {
      throw CheckpointError("unexpected checkpoint record: " + line);
    }
  }
  throw CheckpointError("checkpoint missing end marker");
}

void ParamStore::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint " + path);
  Write(out);
  if (!out) throw CheckpointError("failed writing checkpoint " + path);
}

ParamStore ParamStore::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path);
  return Read(in);
}

}  // namespace coref
