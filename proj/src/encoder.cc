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

#include "coref/encoder.h"

#include <algorithm>
#include <bit>
#include <string>

#include "coref/errors.h"

namespace coref {
namespace {

// One direction of one layer over a single sentence. `projected` holds
// x W + b for the sentence's tokens in order.
Var RunDirection(Tape& tape, Var projected, size_t length, bool backward,
                 const std::string& base, const Model& model) {
  const size_t h = model.config().encoder.hidden_dim;
  Var gates_u = tape.Param(model.params(), base + "recurrent_gates");
  Var cand_u = tape.Param(model.params(), base + "recurrent_candidate");
  Var state = tape.Constant(Tensor(1, h));
  std::vector<Var> outputs(length);
  for (size_t step = 0; step < length; ++step) {
    const size_t t = backward ? length - 1 - step : step;
    Var x = tape.GatherRows(projected, {static_cast<int32_t>(t)});
    Var zr = tape.Sigmoid(tape.Add(tape.SliceCols(x, 0, 2 * h), tape.MatMul(state, gates_u)));
    Var z = tape.SliceCols(zr, 0, h);
    Var r = tape.SliceCols(zr, h, 2 * h);
    Var n = tape.Tanh(
        tape.Add(tape.SliceCols(x, 2 * h, 3 * h), tape.MatMul(tape.Mul(r, state), cand_u)));
    state = tape.Add(n, tape.Mul(z, tape.Sub(state, n)));
    outputs[t] = state;
  }
  return tape.ConcatRows(outputs);
}

}  // namespace

int32_t WidthBucket(int32_t width, int32_t buckets) {
  int32_t bucket = width <= 4 ? width - 1
                              : std::bit_width(static_cast<uint32_t>(width)) + 1;
  return std::clamp(bucket, 0, buckets - 1);
}

Var TokenInputs(Tape& tape, const Model& model, const Document& doc) {
  const ModelConfig& config = model.config();
  if (config.fixed_embeddings) {
    if (!doc.embeddings) {
      throw InputError("document '" + doc.doc_key + "' has no embeddings attached");
    }
    if (doc.embeddings->cols() != static_cast<size_t>(config.encoder.token_dim)) {
      throw InputError("document '" + doc.doc_key + "' embeddings have width " +
                       std::to_string(doc.embeddings->cols()) + ", model expects " +
                       std::to_string(config.encoder.token_dim));
    }
    return tape.Constant(*doc.embeddings);
  }
  std::vector<int32_t> ids;
  ids.reserve(doc.tokens.size());
  for (const Token& t : doc.tokens) ids.push_back(model.WordId(t.text));
  return tape.GatherRows(tape.Param(model.params(), "embed/words"), std::move(ids));
}

Var EncodeTokens(Tape& tape, Var inputs, const Document& doc, const Model& model) {
  const EncoderConfig& e = model.config().encoder;
  if (tape.value(inputs).rows() != doc.tokens.size()) {
    throw ShapeError("encode_tokens: inputs have " +
                     std::to_string(tape.value(inputs).rows()) + " rows for " +
                     std::to_string(doc.tokens.size()) + " tokens");
  }
  Var layer_input = inputs;
  for (int32_t layer = 0; layer < e.num_layers; ++layer) {
    const std::string prefix = "encoder/layer" + std::to_string(layer) + "/";
    std::vector<Var> sentences;
    for (const auto& [first, last] : doc.SentenceBounds()) {
      std::vector<int32_t> rows;
      for (int32_t i = first; i <= last; ++i) rows.push_back(i);
      Var x = tape.GatherRows(layer_input, rows);
      Var parts[2];
      for (int dir = 0; dir < 2; ++dir) {
        const std::string base = prefix + (dir == 0 ? "fwd/" : "bwd/");
        Var projected =
            tape.AddBias(tape.MatMul(x, tape.Param(model.params(), base + "input_weights")),
                         tape.Param(model.params(), base + "bias"));
        parts[dir] = RunDirection(tape, projected, rows.size(), dir == 1, base, model);
      }
      sentences.push_back(tape.ConcatCols(parts));
    }
    if (sentences.empty()) return tape.Constant(Tensor(0, 2 * e.hidden_dim));
    layer_input = tape.ConcatRows(sentences);
  }
  return layer_input;
}

Var SpanRepresentations(Tape& tape, const std::vector<Span>& spans, Var states,
                        Var inputs, const Model& model) {
  const EncoderConfig& e = model.config().encoder;
  std::vector<int32_t> starts, ends, tokens, buckets;
  Offsets offsets{0};
  for (const Span& s : spans) {
    starts.push_back(s.start);
    ends.push_back(s.end);
    for (int32_t t = s.start; t <= s.end; ++t) tokens.push_back(t);
    offsets.push_back(static_cast<int32_t>(tokens.size()));
    buckets.push_back(WidthBucket(s.width(), e.width_buckets));
  }
  Var token_scores = tape.MatMul(states, tape.Param(model.params(), "encoder/head_scorer"));
  Var attention = tape.SegmentSoftmax(tape.GatherRows(token_scores, tokens), offsets,
                                      /*fixed_zero_logit=*/false);
  Var head = tape.SegmentWeightedSum(attention, tape.GatherRows(inputs, tokens), offsets);
  Var width = tape.GatherRows(tape.Param(model.params(), "encoder/width_embeddings"),
                              std::move(buckets));
  const Var parts[] = {tape.GatherRows(states, std::move(starts)),
                       tape.GatherRows(states, std::move(ends)), head, width};
  return tape.ConcatCols(parts);
}

}  // namespace coref
