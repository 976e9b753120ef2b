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

#include "coref/synthetic.h"

#include <algorithm>
#include <charconv>
#include <random>
#include <string_view>

#include "coref/errors.h"
#include "coref/param_store.h"

namespace coref {
namespace {

constexpr int32_t kNoEntity = -1;

int32_t Pick(std::mt19937_64& rng, int32_t n) {
  return static_cast<int32_t>(rng() % static_cast<uint64_t>(n));
}

bool Chance(std::mt19937_64& rng, double p) { return UniformUnit(rng) < p; }

std::optional<int32_t> ParseSuffix(std::string_view text, std::string_view prefix) {
  if (text.substr(0, prefix.size()) != prefix || text.size() == prefix.size()) {
    return std::nullopt;
  }
  int32_t value = 0;
  auto tail = text.substr(prefix.size());
  auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), value);
  if (ec != std::errc() || ptr != tail.data() + tail.size()) return std::nullopt;
  return value;
}

class DocumentBuilder {
 public:
  DocumentBuilder(const SyntheticSpec& spec, std::mt19937_64& rng)
      : spec_(spec), rng_(rng) {}

  void FillerSentence() {
    const int32_t speaker = Pick(rng_, spec_.num_speakers);
    const int32_t length = SentenceLength();
    for (int32_t i = 0; i < length; ++i) Emit(Filler(), speaker);
    ++sentence_;
  }

  // Emits a sentence containing `mention` and returns its span.
  Span MentionSentence(const std::vector<std::string>& mention) {
    const int32_t speaker = Pick(rng_, spec_.num_speakers);
    const int32_t width = static_cast<int32_t>(mention.size());
    const int32_t length = std::max(SentenceLength(), width);
    const int32_t before = Pick(rng_, length - width + 1);
    for (int32_t i = 0; i < before; ++i) Emit(Filler(), speaker);
    const int32_t start = static_cast<int32_t>(doc_.tokens.size());
    for (const std::string& word : mention) Emit(word, speaker);
    for (int32_t i = before + width; i < length; ++i) Emit(Filler(), speaker);
    ++sentence_;
    return Span{start, start + width - 1};
  }

  int32_t sentence() const { return sentence_; }
  Document Take() { return std::move(doc_); }

 private:
  int32_t SentenceLength() {
    return spec_.min_sentence_length +
           Pick(rng_, spec_.max_sentence_length - spec_.min_sentence_length + 1);
  }

  std::string Filler() { return "w" + std::to_string(Pick(rng_, spec_.vocabulary_size)); }

  void Emit(std::string word, int32_t speaker) {
    doc_.tokens.push_back(Token{std::move(word), speaker, sentence_});
  }

  const SyntheticSpec& spec_;
  std::mt19937_64& rng_;
  Document doc_;
  int32_t sentence_ = 0;
};

struct EntityState {
  int32_t attribute = 0;
  int32_t name = 0;
  int32_t remaining = 0;
  int32_t mentioned = 0;
  int32_t before_gap = 0;  // mentions before falling silent
  int32_t dormant_until = -1;
  bool force_named = false;
};

std::pair<Document, std::vector<int32_t>> GenerateDocument(const SyntheticSpec& spec,
                                                           int32_t index,
                                                           std::mt19937_64& rng) {
  DocumentBuilder builder(spec, rng);
  const int32_t genre = Pick(rng, spec.num_genres);

  std::vector<int32_t> names(spec.name_pool_size);
  for (int32_t i = 0; i < spec.name_pool_size; ++i) names[i] = i;
  std::vector<EntityState> entities(spec.entity_count);
  for (int32_t e = 0; e < spec.entity_count; ++e) {
    EntityState& state = entities[e];
    state.attribute = Pick(rng, spec.attribute_count);
    const int32_t slot = e + Pick(rng, spec.name_pool_size - e);
    std::swap(names[e], names[slot]);
    state.name = names[e];
    state.remaining = spec.mentions_per_entity;
    state.before_gap = Chance(rng, spec.long_range_fraction)
                           ? 1 + Pick(rng, spec.mentions_per_entity - 1)
                           : spec.mentions_per_entity;
  }

  std::vector<Cluster> clusters(spec.entity_count);
  std::vector<int32_t> last_with_attribute(spec.attribute_count, kNoEntity);
  int32_t previous = kNoEntity;
  int32_t introduced = 0;
  auto pending = [&] {
    return std::any_of(entities.begin(), entities.end(),
                       [](const EntityState& s) { return s.remaining > 0; });
  };

  if (spec.entity_count == 0) builder.FillerSentence();
  while (pending()) {
    if (Chance(rng, spec.filler_sentence_rate)) {
      builder.FillerSentence();
      previous = kNoEntity;
      continue;
    }
    std::vector<int32_t> ready;
    for (int32_t e = 0; e < introduced; ++e) {
      if (entities[e].remaining > 0 && entities[e].dormant_until <= builder.sentence()) {
        ready.push_back(e);
      }
    }
    int32_t entity = kNoEntity;
    if (introduced < spec.entity_count && (ready.size() < 2 || Chance(rng, 0.25))) {
      entity = introduced++;
    } else if (ready.empty()) {
      builder.FillerSentence();
      previous = kNoEntity;
      continue;
    } else if (previous != kNoEntity &&
               std::find(ready.begin(), ready.end(), previous) != ready.end() &&
               Chance(rng, spec.repeat_rate)) {
      entity = previous;
    } else {
      entity = ready[Pick(rng, static_cast<int32_t>(ready.size()))];
    }

    EntityState& state = entities[entity];
    const int32_t a = state.attribute;
    std::vector<std::string> words;
    if (state.mentioned == 0 || state.force_named) {
      words = {"det" + std::to_string(a), "name" + std::to_string(state.name)};
    } else if (previous == entity && Chance(rng, spec.ambiguity_rate)) {
      words = {"amb"};
    } else if (last_with_attribute[a] == entity && Chance(rng, spec.pronoun_rate)) {
      words = {"pro" + std::to_string(a)};
    } else {
      words = {"det" + std::to_string(a), "name" + std::to_string(state.name)};
    }
    clusters[entity].push_back(builder.MentionSentence(words));

    state.force_named = false;
    ++state.mentioned;
    --state.remaining;
    if (state.mentioned == state.before_gap && state.remaining > 0) {
      state.dormant_until = builder.sentence() + spec.long_range_gap;
      state.force_named = true;
    }
    last_with_attribute[a] = entity;
    previous = entity;
  }

  Document doc = builder.Take();
  doc.doc_key = "synthetic/" + std::to_string(spec.seed) + "/" + std::to_string(index);
  doc.genre = genre;
  std::vector<int32_t> attributes;
  for (int32_t e = 0; e < spec.entity_count; ++e) {
    doc.gold_clusters.push_back(clusters[e]);
    attributes.push_back(entities[e].attribute);
  }
  return {std::move(doc), std::move(attributes)};
}

}  // namespace

void ValidateSyntheticSpec(const SyntheticSpec& spec) {
  auto rate = [](double r, const char* name) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw InputError(std::string("synthetic spec: ") + name + " must be in [0, 1]");
    }
  };
  rate(spec.ambiguity_rate, "ambiguity_rate");
  rate(spec.pronoun_rate, "pronoun_rate");
  rate(spec.repeat_rate, "repeat_rate");
  rate(spec.long_range_fraction, "long_range_fraction");
  if (!(spec.filler_sentence_rate >= 0.0 && spec.filler_sentence_rate < 1.0)) {
    throw InputError("synthetic spec: filler_sentence_rate must be in [0, 1)");
  }
  if (spec.num_documents < 0 || spec.entity_count < 0) {
    throw InputError("synthetic spec: counts must be non-negative");
  }
  if (spec.mentions_per_entity < 2) {
    throw InputError("synthetic spec: an entity needs at least two mentions");
  }
  if (spec.attribute_count < 1 || spec.vocabulary_size < 1 || spec.num_genres < 1 ||
      spec.num_speakers < 1 || spec.long_range_gap < 0) {
    throw InputError("synthetic spec: counts must be positive");
  }
  if (spec.min_sentence_length < 2 || spec.max_sentence_length < spec.min_sentence_length) {
    throw InputError(
        "synthetic spec: sentences must hold a two-token mention "
        "(min_sentence_length >= 2, max >= min)");
  }
  if (spec.name_pool_size < spec.entity_count) {
    throw InputError("synthetic spec: name pool smaller than the entity count");
  }
}

SyntheticCorpus GenerateSyntheticCorpus(const SyntheticSpec& spec) {
  ValidateSyntheticSpec(spec);
  std::mt19937_64 rng(spec.seed);
  SyntheticCorpus corpus;
  for (int32_t i = 0; i < spec.num_documents; ++i) {
    auto [doc, attributes] = GenerateDocument(spec, i, rng);
    ValidateDocument(doc);
    corpus.documents.push_back(std::move(doc));
    corpus.cluster_attributes.push_back(std::move(attributes));
  }
  return corpus;
}

std::vector<Document> GenerateSynthetic(const SyntheticSpec& spec) {
  return GenerateSyntheticCorpus(spec).documents;
}

std::optional<int32_t> SurfaceAttribute(const Document& doc, const Span& span) {
  const std::string& first = doc.tokens[span.start].text;
  if (span.width() == 2) {
    if (doc.tokens[span.end].text.rfind("name", 0) != 0) return std::nullopt;
    return ParseSuffix(first, "det");
  }
  if (span.width() == 1) return ParseSuffix(first, "pro");
  return std::nullopt;
}

}  // namespace coref
