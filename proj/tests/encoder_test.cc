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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "coref/encoder.h"
#include "coref/errors.h"
#include "coref/gradcheck.h"
#include "coref/model.h"
#include "coref/spans.h"
#include "test_util.h"

namespace coref {
namespace {

using testing::MakeDocument;
using testing::RandomTensor;
using testing::TinyConfig;

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Plain GRU over one sentence in one direction, straight from the parameters.
std::vector<std::vector<double>> UnrollGru(const std::vector<std::vector<double>>& xs,
                                           const ParamStore& p, const std::string& base,
                                           bool backward) {
  const Tensor& w = p.Get(base + "input_weights");
  const Tensor& b = p.Get(base + "bias");
  const Tensor& ug = p.Get(base + "recurrent_gates");
  const Tensor& uc = p.Get(base + "recurrent_candidate");
  const size_t h = uc.rows();
  std::vector<double> state(h, 0.0);
  std::vector<std::vector<double>> out(xs.size());
  for (size_t step = 0; step < xs.size(); ++step) {
    const size_t t = backward ? xs.size() - 1 - step : step;
    std::vector<double> proj(3 * h);
    for (size_t c = 0; c < 3 * h; ++c) {
      proj[c] = b[c];
      for (size_t k = 0; k < xs[t].size(); ++k) proj[c] += xs[t][k] * w(k, c);
    }
    std::vector<double> z(h), r(h), n(h), next(h);
    for (size_t d = 0; d < h; ++d) {
      double zs = proj[d], rs = proj[h + d];
      for (size_t k = 0; k < h; ++k) {
        zs += state[k] * ug(k, d);
        rs += state[k] * ug(k, h + d);
      }
      z[d] = Sigmoid(zs);
      r[d] = Sigmoid(rs);
    }
    for (size_t d = 0; d < h; ++d) {
      double ns = proj[2 * h + d];
      for (size_t k = 0; k < h; ++k) ns += r[k] * state[k] * uc(k, d);
      n[d] = std::tanh(ns);
    }
    for (size_t d = 0; d < h; ++d) next[d] = (1.0 - z[d]) * n[d] + z[d] * state[d];
    state = next;
    out[t] = state;
  }
  return out;
}

std::vector<std::vector<double>> EmbeddingRows(const Model& model, const Document& doc) {
  const Tensor& table = model.params().Get("embed/words");
  std::vector<std::vector<double>> rows;
  for (const Token& t : doc.tokens) {
    auto r = table.row(model.WordId(t.text));
    rows.emplace_back(r.begin(), r.end());
  }
  return rows;
}

class EncoderTest : public ::testing::Test {
 protected:
  void SetUp() override {
    doc_ = MakeDocument({{"the", "cat", "sat", "on", "mat"}, {"it", "slept"}, {"ok"}});
    model_ = Model::Initialize(TinyConfig(), BuildVocabulary({doc_}), 17);
  }

  Tensor States(const Model& model, const Document& doc) {
    Tape tape;
    return tape.value(EncodeTokens(tape, TokenInputs(tape, model, doc), doc, model));
  }

  Document doc_;
  Model model_;
};

TEST_F(EncoderTest, StatesMatchManualUnroll) {
  const Tensor states = States(model_, doc_);
  const size_t h = model_.config().encoder.hidden_dim;
  ASSERT_EQ(states.rows(), 8u);
  ASSERT_EQ(states.cols(), 2 * h);
  const auto inputs = EmbeddingRows(model_, doc_);
  for (const auto& [first, last] : doc_.SentenceBounds()) {
    std::vector<std::vector<double>> xs(inputs.begin() + first, inputs.begin() + last + 1);
    const auto fwd = UnrollGru(xs, model_.params(), "encoder/layer0/fwd/", false);
    const auto bwd = UnrollGru(xs, model_.params(), "encoder/layer0/bwd/", true);
    for (int32_t t = first; t <= last; ++t) {
      for (size_t d = 0; d < h; ++d) {
        EXPECT_NEAR(states(t, d), fwd[t - first][d], 1e-12);
        EXPECT_NEAR(states(t, h + d), bwd[t - first][d], 1e-12);
      }
    }
  }
}

TEST_F(EncoderTest, ZeroRecurrenceGivesBiasPattern) {
  const size_t h = model_.config().encoder.hidden_dim;
  for (const std::string dir : {"fwd/", "bwd/"}) {
    const std::string base = "encoder/layer0/" + dir;
    model_.mutable_params().Mutable(base + "input_weights").Fill(0.0);
    model_.mutable_params().Mutable(base + "recurrent_gates").Fill(0.0);
    model_.mutable_params().Mutable(base + "recurrent_candidate").Fill(0.0);
    Tensor& b = model_.mutable_params().Mutable(base + "bias");
    for (size_t d = 0; d < h; ++d) b[d] = -60.0;  // update gate closed
    for (size_t d = 0; d < h; ++d) b[2 * h + d] = 0.3 * (d + 1);
  }
  const Tensor states = States(model_, doc_);
  for (size_t t = 0; t < states.rows(); ++t) {
    for (size_t d = 0; d < h; ++d) {
      EXPECT_NEAR(states(t, d), std::tanh(0.3 * (d + 1)), 1e-15);
      EXPECT_NEAR(states(t, h + d), std::tanh(0.3 * (d + 1)), 1e-15);
    }
  }
}

TEST_F(EncoderTest, SingleTokenSentenceSeesOnlyItself) {
  const Tensor states = States(model_, doc_);
  Document other = MakeDocument({{"cat", "cat", "cat", "cat", "cat"}, {"mat", "the"}, {"ok"}});
  const Tensor other_states = States(model_, other);
  for (size_t d = 0; d < states.cols(); ++d) EXPECT_EQ(states(7, d), other_states(7, d));
  const auto inputs = EmbeddingRows(model_, doc_);
  const auto fwd = UnrollGru({inputs[7]}, model_.params(), "encoder/layer0/fwd/", false);
  const size_t h = model_.config().encoder.hidden_dim;
  for (size_t d = 0; d < h; ++d) EXPECT_NEAR(states(7, d), fwd[0][d], 1e-12);
}

TEST_F(EncoderTest, SpanRepresentationMatchesRecomputation) {
  Tape tape;
  Var inputs = TokenInputs(tape, model_, doc_);
  Var states = EncodeTokens(tape, inputs, doc_, model_);
  const std::vector<Span> spans = CandidateSpans(doc_, 3);
  const Tensor reps = tape.value(SpanRepresentations(tape, spans, states, inputs, model_));
  const ModelConfig& c = model_.config();
  ASSERT_EQ(reps.cols(), static_cast<size_t>(c.SpanWidth()));
  EXPECT_EQ(c.SpanWidth(), 4 * c.encoder.hidden_dim + c.encoder.token_dim + c.encoder.width_dim);

  const Tensor& s = tape.value(states);
  const Tensor& x = tape.value(inputs);
  const Tensor& scorer = model_.params().Get("encoder/head_scorer");
  const Tensor& widths = model_.params().Get("encoder/width_embeddings");
  const size_t sw = s.cols(), tw = x.cols();
  for (size_t i = 0; i < spans.size(); ++i) {
    const Span& span = spans[i];
    std::vector<double> scores;
    for (int32_t t = span.start; t <= span.end; ++t) {
      double v = 0.0;
      for (size_t k = 0; k < sw; ++k) v += s(t, k) * scorer[k];
      scores.push_back(v);
    }
    double mx = *std::max_element(scores.begin(), scores.end()), z = 0.0;
    for (double& v : scores) z += (v = std::exp(v - mx));
    double weight_total = 0.0;
    std::vector<double> head(tw, 0.0);
    for (int32_t t = span.start; t <= span.end; ++t) {
      const double a = scores[t - span.start] / z;
      weight_total += a;
      for (size_t k = 0; k < tw; ++k) head[k] += a * x(t, k);
    }
    EXPECT_NEAR(weight_total, 1.0, 1e-12);
    for (size_t k = 0; k < sw; ++k) {
      EXPECT_EQ(reps(i, k), s(span.start, k));
      EXPECT_EQ(reps(i, sw + k), s(span.end, k));
    }
    for (size_t k = 0; k < tw; ++k) EXPECT_NEAR(reps(i, 2 * sw + k), head[k], 1e-12);
    const int32_t bucket = WidthBucket(span.width());
    for (size_t k = 0; k < widths.cols(); ++k) {
      EXPECT_EQ(reps(i, 2 * sw + tw + k), widths(bucket, k));
    }
    if (span.width() == 1) {
      for (size_t k = 0; k < tw; ++k) EXPECT_EQ(reps(i, 2 * sw + k), x(span.start, k));
    }
  }
}

TEST_F(EncoderTest, EqualScoresSplitAttentionEvenly) {
  model_.mutable_params().Mutable("encoder/head_scorer").Fill(0.0);
  Document doc = MakeDocument({{"cat", "cat"}});
  Model model = Model::Initialize(TinyConfig(), BuildVocabulary({doc}), 3);
  model.mutable_params().Mutable("encoder/head_scorer").Fill(0.0);
  Tape tape;
  Var inputs = TokenInputs(tape, model, doc);
  Var states = EncodeTokens(tape, inputs, doc, model);
  const Tensor reps = tape.value(SpanRepresentations(tape, {{0, 1}}, states, inputs, model));
  const Tensor& x = tape.value(inputs);
  const size_t sw = tape.value(states).cols();
  for (size_t k = 0; k < x.cols(); ++k) {
    EXPECT_NEAR(reps(0, 2 * sw + k), 0.5 * x(0, k) + 0.5 * x(1, k), 1e-15);
  }
}

TEST(WidthBucketTest, Table) {
  const std::vector<std::pair<int32_t, int32_t>> table = {
      {1, 0}, {2, 1}, {3, 2}, {4, 3}, {5, 4}, {7, 4}, {8, 5}, {15, 5},
      {16, 6}, {31, 6}, {32, 7}, {100, 7}};
  for (const auto& [width, bucket] : table) EXPECT_EQ(WidthBucket(width), bucket) << width;
}

TEST_F(EncoderTest, FixedEmbeddingsRequired) {
  ModelConfig config = TinyConfig();
  config.fixed_embeddings = true;
  Model model = Model::Initialize(config, {}, 1);
  EXPECT_FALSE(model.params().Contains("embed/words"));
  Tape tape;
  EXPECT_THROW(TokenInputs(tape, model, doc_), InputError);
  std::mt19937_64 rng(2);
  doc_.embeddings = RandomTensor(doc_.tokens.size(), config.encoder.token_dim, rng);
  Var inputs = TokenInputs(tape, model, doc_);
  EXPECT_EQ(tape.value(inputs), *doc_.embeddings);
}

TEST_F(EncoderTest, GradientsMatchFiniteDifferences) {
  ModelConfig config = TinyConfig();
  config.encoder.num_layers = 2;
  Model model = Model::Initialize(config, BuildVocabulary({doc_}), 5);
  const std::vector<Span> spans = CandidateSpans(doc_, 3);
  std::mt19937_64 rng(6);
  const Tensor weights = RandomTensor(spans.size(), config.SpanWidth(), rng);
  auto build = [&](Tape& tape, const Model& m) {
    Var inputs = TokenInputs(tape, m, doc_);
    Var states = EncodeTokens(tape, inputs, doc_, m);
    Var reps = SpanRepresentations(tape, spans, states, inputs, m);
    return tape.Sum(tape.Mul(reps, tape.Constant(weights)));
  };
  Tape tape;
  tape.Backward(build(tape, model));
  Gradients analytic = tape.ParamGradients();
  LossFn loss = [&](const ParamStore& params) {
    Model m = model;
    m.mutable_params() = params;
    Tape t;
    return t.value(build(t, m)).scalar();
  };
  GradCheckReport report = FiniteDifferenceCheck(loss, analytic, model.params());
  for (const BlockCheck& b : report.blocks) EXPECT_LT(b.relative_error, 1e-4) << b.name;
  EXPECT_TRUE(analytic.count("encoder/layer1/bwd/recurrent_candidate"));
}

}  // namespace
}  // namespace coref
