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

#ifndef COREF_SYNTHETIC_H_
#define COREF_SYNTHETIC_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "coref/document.h"

namespace coref {

// Parameters of the synthetic corpus generator.
//
// Each entity has a latent attribute (a singular/plural analog) drawn from
// `attribute_count` values. Sentences hold at most one mention, surrounded by
// filler words "w<k>". A mention is realized as one of:
//
//   det<a> name<k>   named; always used for first mentions and after a gap
//   pro<a>           attribute pronoun; refers to the most recently mentioned
//                    entity with attribute a
//   amb              ambiguous pronoun; refers to the entity of the previous
//                    mention, which sits in the previous sentence
//
// Mentions of an entity are only realized as pronouns when these resolution
// rules pick that entity, so gold clusters are recoverable. Because `amb`
// carries no attribute and crosses a sentence boundary, whether a later
// `pro<a>` may link to it depends on what `amb` itself links to. That is the
// locally-consistent, globally-inconsistent pattern that higher-order
// inference targets.
//
// A `long_range_fraction` of entities fall silent for `long_range_gap`
// sentences partway through their mentions and then reappear by name, which
// creates coreference links longer than any small fixed antecedent window.
struct SyntheticSpec {
  int32_t num_documents = 10;
  int32_t entity_count = 5;
  int32_t mentions_per_entity = 4;
  int32_t attribute_count = 2;
  // Probability that an eligible repeated mention uses the ambiguous form.
  double ambiguity_rate = 0.3;
  // Probability that an eligible mention uses the attribute pronoun.
  double pronoun_rate = 0.5;
  // Probability that the next mention repeats the previous entity.
  double repeat_rate = 0.35;
  // Probability of a sentence with no mention.
  double filler_sentence_rate = 0.1;
  int32_t vocabulary_size = 30;
  int32_t name_pool_size = 40;
  int32_t min_sentence_length = 3;
  int32_t max_sentence_length = 6;
  double long_range_fraction = 0.3;
  int32_t long_range_gap = 10;
  int32_t num_genres = 1;
  int32_t num_speakers = 2;
  uint64_t seed = 1;
};

struct SyntheticCorpus {
  std::vector<Document> documents;
  // Latent attribute of each gold cluster, parallel to gold_clusters.
  std::vector<std::vector<int32_t>> cluster_attributes;
};

// Throws InputError naming the first infeasible setting.
void ValidateSyntheticSpec(const SyntheticSpec& spec);

SyntheticCorpus GenerateSyntheticCorpus(const SyntheticSpec& spec);
std::vector<Document> GenerateSynthetic(const SyntheticSpec& spec);

// Attribute signalled by a span's surface form (det<a>/pro<a>), or nullopt for
// ambiguous or non-mention spans.
std::optional<int32_t> SurfaceAttribute(const Document& doc, const Span& span);

}  // namespace coref

#endif  // COREF_SYNTHETIC_H_
