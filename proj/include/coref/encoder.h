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

#ifndef COREF_ENCODER_H_
#define COREF_ENCODER_H_

#include <vector>

#include "coref/document.h"
#include "coref/model.h"
#include "coref/tape.h"

namespace coref {

// Bucket of a span width: {1, 2, 3, 4, 5-7, 8-15, 16-31, 32+} -> 0..7,
// clamped to the configured bucket count.
int32_t WidthBucket(int32_t width, int32_t buckets = 8);

// Token vectors, num_tokens x token_dim: the document's fixed embeddings when
// the model is configured for them, otherwise rows of the learned word table.
// Throws InputError if fixed embeddings are required but missing or of the
// wrong width.
Var TokenInputs(Tape& tape, const Model& model, const Document& doc);

// Bidirectional GRU over each sentence with state reset at sentence
// boundaries. Returns num_tokens x (2 * hidden_dim): forward state then
// backward state.
//
// Each direction uses
//   z = sigmoid(x Wz + h Uz + bz)
//   r = sigmoid(x Wr + h Ur + br)
//   n = tanh(x Wn + (r o h) Un + bn)
//   h' = n + z o (h - n)
// with [Wz Wr Wn] stored as input_weights, [Uz Ur] as recurrent_gates and Un
// as recurrent_candidate.
Var EncodeTokens(Tape& tape, Var inputs, const Document& doc, const Model& model);

// g = [state(start); state(end); head; width embedding] for every span, where
// head is the softmax-weighted sum of the span's token inputs under the score
// state(t) . head_scorer. Result is spans x |g|.
Var SpanRepresentations(Tape& tape, const std::vector<Span>& spans, Var states,
                        Var inputs, const Model& model);

}  // namespace coref

#endif  // COREF_ENCODER_H_
