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

#include "coref/ffnn.h"

#include <cmath>

#include "coref/errors.h"

namespace coref {
namespace {

std::string LayerName(const std::string& prefix, size_t layer, size_t num_hidden) {
  return layer == num_hidden ? prefix + "/output"
                             : prefix + "/hidden" + std::to_string(layer);
}

size_t LayerInput(const FfnnSpec& spec, size_t layer) {
  return layer == 0 ? spec.input_width : spec.hidden_widths[layer - 1];
}

size_t LayerOutput(const FfnnSpec& spec, size_t layer) {
  return layer == spec.hidden_widths.size() ? spec.output_width
                                            : spec.hidden_widths[layer];
}

Var Activate(Tape& tape, Var x, Activation activation) {
  switch (activation) {
    case Activation::kRelu: return tape.Relu(x);
    case Activation::kTanh: return tape.Tanh(x);
    case Activation::kSigmoid: return tape.Sigmoid(x);
    case Activation::kIdentity: return x;
  }
  return x;
}

double ActivateValue(double x, Activation activation) {
  switch (activation) {
    case Activation::kRelu: return x > 0.0 ? x : 0.0;
    case Activation::kTanh: return std::tanh(x);
    case Activation::kSigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Activation::kIdentity: return x;
  }
  return x;
}

void CheckInput(const FfnnSpec& spec, size_t width, const std::string& prefix) {
  if (width != spec.input_width) {
    throw ShapeError("ffnn " + prefix + ": input width " + std::to_string(width) +
                     " does not match spec width " + std::to_string(spec.input_width));
  }
}

}  // namespace

void ValidateFfnnSpec(const FfnnSpec& spec) {
  if (spec.input_width == 0 || spec.output_width == 0) {
    throw ShapeError("ffnn: input and output widths must be positive");
  }
  for (size_t w : spec.hidden_widths) {
    if (w == 0) throw ShapeError("ffnn: hidden widths must be positive");
  }
}

std::vector<std::string> FfnnParamNames(const FfnnSpec& spec,
                                        const std::string& prefix) {
  std::vector<std::string> names;
  const size_t layers = spec.hidden_widths.size() + 1;
  for (size_t l = 0; l < layers; ++l) {
    const std::string base = LayerName(prefix, l, spec.hidden_widths.size());
    names.push_back(base + "/weights");
    names.push_back(base + "/bias");
  }
  return names;
}

void InitFfnn(const FfnnSpec& spec, const std::string& prefix, double scale,
              std::mt19937_64& rng, ParamStore& store) {
  ValidateFfnnSpec(spec);
  const size_t layers = spec.hidden_widths.size() + 1;
  for (size_t l = 0; l < layers; ++l) {
    const std::string base = LayerName(prefix, l, spec.hidden_widths.size());
    store.InitUniform(base + "/weights", LayerInput(spec, l), LayerOutput(spec, l),
                      scale, rng);
    store.InitUniform(base + "/bias", 1, LayerOutput(spec, l), scale, rng);
  }
}

Var FfnnForward(Tape& tape, Var x, const FfnnSpec& spec, const ParamStore& store,
                const std::string& prefix) {
  CheckInput(spec, tape.value(x).cols(), prefix);
  const size_t hidden = spec.hidden_widths.size();
  Var h = x;
  for (size_t l = 0; l <= hidden; ++l) {
    const std::string base = LayerName(prefix, l, hidden);
    h = tape.AddBias(tape.MatMul(h, tape.Param(store, base + "/weights")),
                     tape.Param(store, base + "/bias"));
    if (l < hidden) h = Activate(tape, h, spec.activation);
  }
  return h;
}

Tensor FfnnApply(const Tensor& x, const FfnnSpec& spec, const ParamStore& store,
                 const std::string& prefix) {
  CheckInput(spec, x.cols(), prefix);
  const size_t hidden = spec.hidden_widths.size();
  Tensor h = x;
  for (size_t l = 0; l <= hidden; ++l) {
    const std::string base = LayerName(prefix, l, hidden);
    h = MatMul(h, store.Get(base + "/weights"));
    const Tensor& bias = store.Get(base + "/bias");
    for (size_t r = 0; r < h.rows(); ++r) {
      auto row = h.row(r);
      for (size_t c = 0; c < row.size(); ++c) {
        row[c] += bias[c];
        if (l < hidden) row[c] = ActivateValue(row[c], spec.activation);
      }
    }
  }
  return h;
}

}  // namespace coref
