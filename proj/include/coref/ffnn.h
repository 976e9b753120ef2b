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

#ifndef COREF_FFNN_H_
#define COREF_FFNN_H_

#include <random>
#include <string>
#include <vector>

#include "coref/param_store.h"
#include "coref/tape.h"
#include "coref/tensor.h"

namespace coref {

enum class Activation { kRelu, kTanh, kSigmoid, kIdentity };

// Feed-forward network: each hidden layer is activation(x W + b); the output
// layer is the affine map x W + b with no nonlinearity.
struct FfnnSpec {
  size_t input_width = 0;
  std::vector<size_t> hidden_widths;
  size_t output_width = 1;
  Activation activation = Activation::kRelu;
};

// Throws ShapeError when a width is zero.
void ValidateFfnnSpec(const FfnnSpec& spec);

// Parameter names are <prefix>/hidden<l>/{weights,bias} and
// <prefix>/output/{weights,bias}.
std::vector<std::string> FfnnParamNames(const FfnnSpec& spec,
                                        const std::string& prefix);

void InitFfnn(const FfnnSpec& spec, const std::string& prefix, double scale,
              std::mt19937_64& rng, ParamStore& store);

// x is rows x input_width; result is rows x output_width.
Var FfnnForward(Tape& tape, Var x, const FfnnSpec& spec, const ParamStore& store,
                const std::string& prefix);

// Same computation without recording.
Tensor FfnnApply(const Tensor& x, const FfnnSpec& spec, const ParamStore& store,
                 const std::string& prefix);

}  // namespace coref

#endif  // COREF_FFNN_H_
