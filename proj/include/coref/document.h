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

#ifndef COREF_DOCUMENT_H_
#define COREF_DOCUMENT_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coref/tensor.h"

namespace coref {

// Inclusive token range [start, end] over the flattened document.
struct Span {
  int32_t start = 0;
  int32_t end = 0;

  int32_t width() const { return end - start + 1; }
  friend auto operator<=>(const Span&, const Span&) = default;
};

struct Token {
  std::string text;
  int32_t speaker = 0;
  int32_t sentence_index = 0;
};

using Cluster = std::vector<Span>;

struct Document {
  std::string doc_key;
  int32_t genre = 0;
  std::vector<Token> tokens;
  std::vector<Cluster> gold_clusters;
  // Set only on documents read from prediction files.
  std::optional<std::vector<Cluster>> predicted_clusters;
  // Optional fixed token vectors (num tokens x dim).
  std::optional<Tensor> embeddings;

  int32_t num_tokens() const { return static_cast<int32_t>(tokens.size()); }
  int32_t num_sentences() const {
    return tokens.empty() ? 0 : tokens.back().sentence_index + 1;
  }
  // [first, last] token index of every sentence, in order.
  std::vector<std::pair<int32_t, int32_t>> SentenceBounds() const;
  bool SameSentence(const Span& span) const;
};

// Checks the document invariants: nondecreasing sentence indices starting at
// 0, gold spans in range and inside one sentence, clusters of at least two
// mentions, and no span in more than one cluster. Throws InputError.
void ValidateDocument(const Document& doc);

// Clusters with mentions sorted and clusters ordered by first mention.
std::vector<Cluster> CanonicalClusters(std::vector<Cluster> clusters);

}  // namespace coref

#endif  // COREF_DOCUMENT_H_
