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

#ifndef COREF_PARAM_STORE_H_
#define COREF_PARAM_STORE_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <random>
#include <string>

#include "coref/tensor.h"

namespace coref {

// Gradients keyed by parameter name, shaped like the parameters.
using Gradients = std::map<std::string, Tensor>;

// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw. Unlike
// std::uniform_real_distribution this is identical across standard libraries.
inline double UniformUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Named trainable tensors plus string metadata. Iteration order is by name,
// which fixes the order of every reduction over parameters.
//
// Checkpoint format (text, version 1):
//
//   coref-params 1
//   meta <key> <value to end of line>
//   tensor <name> <rows> <cols>
//   <rows*cols hexadecimal floats>
//   end
//
// Values are written as C99 hex floats so a write/read round trip is exact.
class ParamStore {
 public:
  static constexpr int kFormatVersion = 1;

  bool Contains(const std::string& name) const {
    return tensors_.count(name) > 0;
  }
  const Tensor& Get(const std::string& name) const;
  Tensor& Mutable(const std::string& name);
  void Set(const std::string& name, Tensor value);

  // Fills a new rows x cols parameter with values uniform in [-scale, scale].
  void InitUniform(const std::string& name, size_t rows, size_t cols,
                   double scale, std::mt19937_64& rng);

  const std::map<std::string, Tensor>& tensors() const { return tensors_; }
  size_t TotalSize() const;

  std::map<std::string, std::string>& metadata() { return metadata_; }
  const std::map<std::string, std::string>& metadata() const {
    return metadata_;
  }

  // Zero-valued gradient buffers for every parameter.
  Gradients ZeroGradients() const;

  void Write(std::ostream& out) const;
  static ParamStore Read(std::istream& in);
  void Save(const std::string& path) const;
  static ParamStore Load(const std::string& path);

  friend bool operator==(const ParamStore& a, const ParamStore& b) = default;

 private:
  std::map<std::string, Tensor> tensors_;
  std::map<std::string, std::string> metadata_;
};

}  // namespace coref

#endif  // COREF_PARAM_STORE_H_
