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

#ifndef COREF_MODEL_H_
#define COREF_MODEL_H_

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "coref/document.h"
#include "coref/ffnn.h"
#include "coref/param_store.h"

namespace coref {

struct EncoderConfig {
  int32_t token_dim = 24;
  int32_t hidden_dim = 24;  // per direction
  int32_t num_layers = 1;
  int32_t width_buckets = 8;
  int32_t width_dim = 8;
};

struct ModelConfig {
  EncoderConfig encoder;
  int32_t ffnn_hidden = 64;
  int32_t ffnn_layers = 1;
  int32_t feature_dim = 8;  // each of distance, speaker match, genre
  int32_t num_genres = 8;
  int32_t max_span_width = 10;
  // Use doc.embeddings (fixed vectors) instead of a learned word table.
  bool fixed_embeddings = false;
  double init_scale = 0.1;

  // |g| = 2 * (2 * hidden) + token_dim + width_dim.
  int32_t SpanWidth() const;
  // |phi| = 3 * feature_dim.
  int32_t PairFeatureWidth() const { return 3 * feature_dim; }
  void Validate() const;
};

inline constexpr int32_t kDistanceBuckets = 9;

FfnnSpec MentionFfnnSpec(const ModelConfig& config);
FfnnSpec AntecedentFfnnSpec(const ModelConfig& config);

// Parameters plus everything needed to interpret them. Word id 0 is reserved
// for unknown words.
class Model {
 public:
  Model() = default;

  static Model Initialize(const ModelConfig& config, std::vector<std::string> vocabulary,
                          uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  const ParamStore& params() const { return params_; }
  ParamStore& mutable_params() { return params_; }

  int32_t WordId(const std::string& word) const;

  // The checkpoint is the ParamStore file with the config and vocabulary in
  // its metadata.
  void Save(const std::string& path) const;
  static Model Load(const std::string& path);
  ParamStore ToParamStore() const;
  static Model FromParamStore(ParamStore store);

 private:
  ModelConfig config_;
  std::vector<std::string> vocabulary_;
  std::unordered_map<std::string, int32_t> word_ids_;
  ParamStore params_;
};

// Sorted distinct token texts of the corpus.
std::vector<std::string> BuildVocabulary(const std::vector<Document>& docs);

std::string ModelConfigToJson(const ModelConfig& config);
ModelConfig ModelConfigFromJson(const std::string& text);

}  // namespace coref

#endif  // COREF_MODEL_H_
