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
#include <cstdio>
#include <random>
#include <sstream>

#include "coref/errors.h"
#include "coref/ffnn.h"
#include "coref/gradcheck.h"
#include "coref/param_store.h"
#include "test_util.h"

namespace coref {
namespace {

using testing::RandomTensor;

TEST(ParamStoreTest, RoundTripIsValueExact) {
  std::mt19937_64 rng(5);
  ParamStore store;
  store.InitUniform("a/weights", 3, 4, 0.1, rng);
  store.Set("b", Tensor(1, 3, std::vector<double>{1.0 / 3.0, -0.0, 5e-310}));
  store.Set("empty", Tensor(0, 4));
  store.metadata()["note"] = "value with spaces";
  std::stringstream buffer;
  store.Write(buffer);
  ParamStore back = ParamStore::Read(buffer);
  EXPECT_EQ(back, store);
  EXPECT_EQ(back.metadata().at("note"), "value with spaces");
}

TEST(ParamStoreTest, InitIsUniformInRangeAndSeeded) {
  std::mt19937_64 a(9), b(9);
  ParamStore x, y;
  x.InitUniform("w", 20, 20, 0.1, a);
  y.InitUniform("w", 20, 20, 0.1, b);
  EXPECT_EQ(x, y);
  for (double v : x.Get("w").data()) {
    EXPECT_GE(v, -0.1);
    EXPECT_LE(v, 0.1);
  }
}

TEST(ParamStoreTest, RejectsCorruptCheckpoints) {
  for (const std::string text :
       {"", "not-params 1\n", "coref-params 2\nend\n", "coref-params 1\ntensor w 2 2\n0x1p+0\n",
        "coref-params 1\ntensor w 1 1\nhello\nend\n", "coref-params 1\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(ParamStore::Read(in), CheckpointError) << text;
  }
  EXPECT_THROW(ParamStore::Load("/nonexistent/params"), CheckpointError);
  ParamStore store;
  EXPECT_THROW(store.Get("missing"), CheckpointError);
}

TEST(FfnnTest, ZeroWeightsGiveFinalBias) {
  FfnnSpec spec{4, {3, 3}, 2, Activation::kRelu};
  std::mt19937_64 rng(1);
  ParamStore store;
  InitFfnn(spec, "f", 0.1, rng, store);
  for (const std::string& name : FfnnParamNames(spec, "f")) store.Mutable(name).Fill(0.0);
  store.Set("f/output/bias", Tensor(1, 2, std::vector<double>{0.7, -1.5}));
  Tensor out = FfnnApply(RandomTensor(5, 4, rng), spec, store, "f");
  for (size_t r = 0; r < 5; ++r) {
    EXPECT_EQ(out(r, 0), 0.7);
    EXPECT_EQ(out(r, 1), -1.5);
  }
}

TEST(FfnnTest, IdentityLinearLayerIsIdentity) {
  FfnnSpec spec{3, {}, 3, Activation::kIdentity};
  ParamStore store;
  std::mt19937_64 rng(2);
  InitFfnn(spec, "f", 0.1, rng, store);
  store.Set("f/output/weights", Tensor::Identity(3));
  store.Mutable("f/output/bias").Fill(0.0);
  Tensor x = RandomTensor(2, 3, rng);
  EXPECT_EQ(FfnnApply(x, spec, store, "f"), x);
}

TEST(FfnnTest, TwoLayerNetMatchesManualUnroll) {
  FfnnSpec spec{3, {4, 2}, 1, Activation::kTanh};
  ParamStore store;
  std::mt19937_64 rng(3);
  InitFfnn(spec, "net", 0.8, rng, store);
  Tensor x = RandomTensor(1, 3, rng);
  auto layer = [&](const std::vector<double>& in, const std::string& prefix, bool act) {
    const Tensor& w = store.Get(prefix + "/weights");
    const Tensor& b = store.Get(prefix + "/bias");
    std::vector<double> out(w.cols());
    for (size_t j = 0; j < w.cols(); ++j) {
      double z = b[j];
      for (size_t i = 0; i < in.size(); ++i) z += in[i] * w(i, j);
      out[j] = act ? std::tanh(z) : z;
    }
    return out;
  };
  std::vector<double> h(x.data().begin(), x.data().end());
  h = layer(h, "net/hidden0", true);
  h = layer(h, "net/hidden1", true);
  h = layer(h, "net/output", false);
  EXPECT_NEAR(FfnnApply(x, spec, store, "net").scalar(), h[0], 1e-12);

  Tape tape;
  Var y = FfnnForward(tape, tape.Constant(x), spec, store, "net");
  EXPECT_NEAR(tape.value(y).scalar(), h[0], 1e-12);
}

TEST(FfnnTest, WidthMismatchThrows) {
  FfnnSpec spec{3, {2}, 1, Activation::kRelu};
  ParamStore store;
  std::mt19937_64 rng(4);
  InitFfnn(spec, "f", 0.1, rng, store);
  EXPECT_THROW(FfnnApply(Tensor(1, 4), spec, store, "f"), ShapeError);
  EXPECT_THROW(ValidateFfnnSpec(FfnnSpec{0, {}, 1, Activation::kRelu}), Error);
  EXPECT_THROW(ValidateFfnnSpec(FfnnSpec{2, {0}, 1, Activation::kRelu}), Error);
}

TEST(GradCheckTest, QuadraticLoss) {
  std::mt19937_64 rng(6);
  ParamStore params;
  params.Set("p", RandomTensor(3, 3, rng));
  params.Set("q", RandomTensor(1, 4, rng));
  LossFn loss = [](const ParamStore& ps) {
    double s = 0.0;
    for (const auto& [name, t] : ps.tensors()) {
      for (double v : t.data()) s += v * v;
    }
    return s;
  };
  Gradients analytic;
  for (const auto& [name, t] : params.tensors()) {
    Tensor g = t;
    for (double& v : g.data()) v *= 2.0;
    analytic[name] = g;
  }
  GradCheckReport report = FiniteDifferenceCheck(loss, analytic, params);
  ASSERT_EQ(report.blocks.size(), 2u);
  EXPECT_LT(report.Worst()->relative_error, 1e-8);
  EXPECT_TRUE(report.Passed(1e-8));
}

TEST(GradCheckTest, ZeroGradientSaddle) {
  ParamStore params;
  params.Set("p", Tensor(2, 2, 0.0));
  LossFn loss = [](const ParamStore& ps) {
    const Tensor& p = ps.Get("p");
    return p[0] * p[1] - p[2] * p[3];
  };
  GradCheckReport report =
      FiniteDifferenceCheck(loss, {{"p", Tensor(2, 2, 0.0)}}, params);
  EXPECT_LT(report.Worst()->max_abs_numeric, 1e-12);
  EXPECT_LT(report.Worst()->max_abs_error, 1e-12);
}

TEST(GradCheckTest, DetectsWrongGradientAndNan) {
  ParamStore params;
  params.Set("p", Tensor(1, 2, std::vector<double>{1.0, 2.0}));
  LossFn loss = [](const ParamStore& ps) { return ps.Get("p")[0] * ps.Get("p")[1]; };
  Gradients wrong = {{"p", Tensor(1, 2, std::vector<double>{2.0, 2.0})}};
  EXPECT_FALSE(FiniteDifferenceCheck(loss, wrong, params).Passed(1e-4));
  LossFn bad = [](const ParamStore&) { return NAN; };
  GradCheckReport report = FiniteDifferenceCheck(bad, wrong, params);
  EXPECT_FALSE(report.Worst()->finite);
  EXPECT_FALSE(report.Passed(1e-4));
}

TEST(GradCheckTest, SamplingChecksRequestedCount) {
  std::mt19937_64 rng(7);
  ParamStore params;
  params.Set("p", RandomTensor(10, 10, rng));
  LossFn loss = [](const ParamStore& ps) {
    double s = 0.0;
    for (double v : ps.Get("p").data()) s += std::sin(v);
    return s;
  };
  Tensor g = params.Get("p");
  for (double& v : g.data()) v = std::cos(v);
  GradCheckOptions options;
  options.max_entries_per_block = 12;
  GradCheckReport report = FiniteDifferenceCheck(loss, {{"p", g}}, params, options);
  EXPECT_EQ(report.blocks[0].entries_checked, 12u);
  EXPECT_TRUE(report.Passed(1e-6));
}

}  // namespace
}  // namespace coref
