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

#include "coref/model.h"

#include <algorithm>
#include <random>
#include <set>

#include "coref/errors.h"
#include "json.hpp"

namespace coref {

using json = nlohmann::json;

int32_t ModelConfig::SpanWidth() const {
  return 2 * 2 * encoder.hidden_dim + encoder.token_dim + encoder.width_dim;
}

void ModelConfig::Validate() const {
  const EncoderConfig& e = encoder;
  if (e.token_dim <= 0 || e.hidden_dim <= 0 || e.num_layers <= 0 ||
      e.width_buckets <= 0 || e.width_dim <= 0 || ffnn_hidden <= 0 ||
      ffnn_layers < 0 || feature_dim <= 0 || num_genres <= 0 || max_span_width <= 0) {
    throw InputError("model config: all dimensions must be positive");
  }
  if (!(init_scale > 0.0)) throw InputError("model config: init_scale must be positive");
}

FfnnSpec MentionFfnnSpec(const ModelConfig& config) {
  return FfnnSpec{static_cast<size_t>(config.SpanWidth()),
                  std::vector<size_t>(config.ffnn_layers, config.ffnn_hidden), 1,
                  Activation::kRelu};
}

FfnnSpec AntecedentFfnnSpec(const ModelConfig& config) {
  return FfnnSpec{static_cast<size_t>(3 * config.SpanWidth() + config.PairFeatureWidth()),
                  std::vector<size_t>(config.ffnn_layers, config.ffnn_hidden), 1,
                  Activation::kRelu};
}

Model Model::Initialize(const ModelConfig& config, std::vector<std::string> vocabulary,
                        uint64_t seed) {
  config.Validate();
  Model model;
  model.config_ = config;
  model.vocabulary_ = std::move(vocabulary);
  for (size_t i = 0; i < model.vocabulary_.size(); ++i) {
    model.word_ids_[model.vocabulary_[i]] = static_cast<int32_t>(i + 1);
  }

  std::mt19937_64 rng(seed);
  ParamStore& p = model.params_;
  const double s = config.init_scale;
  const EncoderConfig& e = config.encoder;
  if (!config.fixed_embeddings) {
    p.InitUniform("embed/words", model.vocabulary_.size() + 1, e.token_dim, s, rng);
  }
  for (int32_t layer = 0; layer < e.num_layers; ++layer) {
    const int32_t input = layer == 0 ? e.token_dim : 2 * e.hidden_dim;
    for (const char* dir : {"fwd", "bwd"}) {
      const std::string base =
          "encoder/layer" + std::to_string(layer) + "/" + dir + "/";
      p.InitUniform(base + "input_weights", input, 3 * e.hidden_dim, s, rng);
      p.InitUniform(base + "bias", 1, 3 * e.hidden_dim, s, rng);
      p.InitUniform(base + "recurrent_gates", e.hidden_dim, 2 * e.hidden_dim, s, rng);
      p.InitUniform(base + "recurrent_candidate", e.hidden_dim, e.hidden_dim, s, rng);
    }
  }
  p.InitUniform("encoder/head_scorer", 2 * e.hidden_dim, 1, s, rng);
  p.InitUniform("encoder/width_embeddings", e.width_buckets, e.width_dim, s, rng);

  InitFfnn(MentionFfnnSpec(config), "mention", s, rng, p);
  InitFfnn(AntecedentFfnnSpec(config), "antecedent", s, rng, p);
  const int32_t g = config.SpanWidth();
  p.InitUniform("coarse/weights", g, g, s, rng);
  p.InitUniform("features/distance", kDistanceBuckets, config.feature_dim, s, rng);
  p.InitUniform("features/same_speaker", 2, config.feature_dim, s, rng);
  p.InitUniform("features/genre", config.num_genres, config.feature_dim, s, rng);
  p.InitUniform("refine/gate/weights", 2 * g, g, s, rng);
  p.InitUniform("refine/gate/bias", 1, g, s, rng);
  return model;
}

int32_t Model::WordId(const std::string& word) const {
  auto it = word_ids_.find(word);
  return it == word_ids_.end() ? 0 : it->second;
}

ParamStore Model::ToParamStore() const {
  ParamStore store = params_;
  store.metadata()["config"] = ModelConfigToJson(config_);
  store.metadata()["vocabulary"] = json(vocabulary_).dump();
  return store;
}

Model Model::FromParamStore(ParamStore store) {
  Model model;
  try {
    model.config_ = ModelConfigFromJson(store.metadata().at("config"));
    model.vocabulary_ =
        json::parse(store.metadata().at("vocabulary")).get<std::vector<std::string>>();
  } catch (const std::out_of_range&) {
    throw CheckpointError("checkpoint lacks model config or vocabulary");
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("bad checkpoint metadata: ") + e.what());
  }
  for (size_t i = 0; i < model.vocabulary_.size(); ++i) {
    model.word_ids_[model.vocabulary_[i]] = static_cast<int32_t>(i + 1);
  }
  store.metadata().clear();
  // Shapes must agree with a fresh initialization of the same config.
  Model reference = Initialize(model.config_, model.vocabulary_, 0);
  for (const auto& [name, t] : reference.params_.tensors()) {
    if (!store.Contains(name)) throw CheckpointError("checkpoint lacks parameter " + name);
    const Tensor& have = store.Get(name);
    if (have.rows() != t.rows() || have.cols() != t.cols()) {
      throw CheckpointError("parameter " + name + " has shape " + have.ShapeString() +
                            ", config expects " + t.ShapeString());
    }
  }
  if (store.tensors().size() != reference.params_.tensors().size()) {
    throw CheckpointError("checkpoint has parameters the config does not define");
  }
  model.params_ = std::move(store);
  return model;
}

void Model::Save(const std::string& path) const { ToParamStore().Save(path); }

Model Model::Load(const std::string& path) { return FromParamStore(ParamStore::Load(path)); }

std::vector<std::string> BuildVocabulary(const std::vector<Document>& docs) {
  std::set<std::string> words;
  for (const Document& doc : docs) {
    for (const Token& t : doc.tokens) words.insert(t.text);
  }
  return {words.begin(), words.end()};
}

std::string ModelConfigToJson(const ModelConfig& c) {
  json j = {{"token_dim", c.encoder.token_dim},
            {"hidden_dim", c.encoder.hidden_dim},
            {"num_layers", c.encoder.num_layers},
            {"width_buckets", c.encoder.width_buckets},
            {"width_dim", c.encoder.width_dim},
            {"ffnn_hidden", c.ffnn_hidden},
            {"ffnn_layers", c.ffnn_layers},
            {"feature_dim", c.feature_dim},
            {"num_genres", c.num_genres},
            {"max_span_width", c.max_span_width},
            {"fixed_embeddings", c.fixed_embeddings},
            {"init_scale", c.init_scale}};
  return j.dump();
}

ModelConfig ModelConfigFromJson(const std::string& text) {
  const json j = json::parse(text);
  ModelConfig c;
  c.encoder.token_dim = j.at("token_dim");
  c.encoder.hidden_dim = j.at("hidden_dim");
  c.encoder.num_layers = j.at("num_layers");
  c.encoder.width_buckets = j.at("width_buckets");
  c.encoder.width_dim = j.at("width_dim");
  c.ffnn_hidden = j.at("ffnn_hidden");
  c.ffnn_layers = j.at("ffnn_layers");
  c.feature_dim = j.at("feature_dim");
  c.num_genres = j.at("num_genres");
  c.max_span_width = j.at("max_span_width");
  c.fixed_embeddings = j.at("fixed_embeddings");
  c.init_scale = j.at("init_scale");
  return c;
}

}  // namespace coref
