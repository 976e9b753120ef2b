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

#include "coref/scoring.h"

#include <algorithm>
#include <bit>

#include "coref/errors.h"

namespace coref {
namespace {

void CheckGenre(int32_t genre, const Model& model) {
  if (genre < 0 || genre >= model.config().num_genres) {
    throw InputError("genre " + std::to_string(genre) + " outside the configured " +
                     std::to_string(model.config().num_genres) + " genres");
  }
}

}  // namespace

CostCounters& CostCounters::operator+=(const CostCounters& other) {
  mention_ffnn_evals += other.mention_ffnn_evals;
  antecedent_ffnn_evals += other.antecedent_ffnn_evals;
  coarse_pairs += other.coarse_pairs;
  wall_ms += other.wall_ms;
  return *this;
}

int32_t DistanceBucket(int32_t rank_distance) {
  if (rank_distance < 1) throw Error("distance bucket of non-positive distance");
  const int32_t bucket = rank_distance <= 4
                             ? rank_distance - 1
                             : std::bit_width(static_cast<uint32_t>(rank_distance)) + 1;
  return std::min(bucket, kDistanceBuckets - 1);
}

PairFeatures ComputePairFeatures(int32_t i, int32_t j, const std::vector<Span>& beam_spans,
                                 const Document& doc) {
  PairFeatures f;
  f.distance_bucket = DistanceBucket(i - j);
  f.same_speaker = doc.tokens[beam_spans[i].start].speaker ==
                   doc.tokens[beam_spans[j].start].speaker;
  f.genre = doc.genre;
  return f;
}

Var MentionScores(Tape& tape, Var reps, const Model& model, CostCounters* counters) {
  if (counters) counters->mention_ffnn_evals += tape.value(reps).rows();
  return FfnnForward(tape, reps, MentionFfnnSpec(model.config()), model.params(), "mention");
}

Var AntecedentScores(Tape& tape, Var reps, const std::vector<PairIndex>& pairs,
                     const std::vector<PairFeatures>& features, const Model& model,
                     CostCounters* counters) {
  if (pairs.size() != features.size()) {
    throw ShapeError("antecedent scores: pairs and features differ in length");
  }
  std::vector<int32_t> rows_i, rows_j, distance, speaker, genre;
  for (size_t k = 0; k < pairs.size(); ++k) {
    rows_i.push_back(pairs[k].i);
    rows_j.push_back(pairs[k].j);
    distance.push_back(features[k].distance_bucket);
    speaker.push_back(features[k].same_speaker ? 1 : 0);
    CheckGenre(features[k].genre, model);
    genre.push_back(features[k].genre);
  }
  const ParamStore& p = model.params();
  Var g_i = tape.GatherRows(reps, std::move(rows_i));
  Var g_j = tape.GatherRows(reps, std::move(rows_j));
  const Var parts[] = {
      g_i, g_j, tape.Mul(g_i, g_j),
      tape.GatherRows(tape.Param(p, "features/distance"), std::move(distance)),
      tape.GatherRows(tape.Param(p, "features/same_speaker"), std::move(speaker)),
      tape.GatherRows(tape.Param(p, "features/genre"), std::move(genre))};
  if (counters) counters->antecedent_ffnn_evals += pairs.size();
  return FfnnForward(tape, tape.ConcatCols(parts), AntecedentFfnnSpec(model.config()), p,
                     "antecedent");
}

Var CoarseScores(Tape& tape, Var reps, const Model& model, CostCounters* counters) {
  const size_t m = tape.value(reps).rows();
  if (counters) counters->coarse_pairs += static_cast<int64_t>(m * m);
  Var projected = tape.MatMul(reps, tape.Param(model.params(), "coarse/weights"));
  return tape.MatMul(projected, tape.Transpose(reps));
}

double MentionScore(std::span<const double> g, const Model& model) {
  return FfnnApply(Tensor::RowVector(g), MentionFfnnSpec(model.config()), model.params(),
                   "mention")
      .scalar();
}

Tensor AntecedentInput(std::span<const double> g_i, std::span<const double> g_j,
                       const PairFeatures& features, const Model& model) {
  if (g_i.size() != g_j.size()) throw ShapeError("antecedent input: span widths differ");
  CheckGenre(features.genre, model);
  const ParamStore& p = model.params();
  std::vector<double> x(g_i.begin(), g_i.end());
  x.insert(x.end(), g_j.begin(), g_j.end());
  for (size_t d = 0; d < g_i.size(); ++d) x.push_back(g_i[d] * g_j[d]);
  for (auto row : {p.Get("features/distance").row(features.distance_bucket),
                   p.Get("features/same_speaker").row(features.same_speaker ? 1 : 0),
                   p.Get("features/genre").row(features.genre)}) {
    x.insert(x.end(), row.begin(), row.end());
  }
  return Tensor::RowVector(x);
}

double AntecedentScore(std::span<const double> g_i, std::span<const double> g_j,
                       const PairFeatures& features, const Model& model) {
  return FfnnApply(AntecedentInput(g_i, g_j, features, model),
                   AntecedentFfnnSpec(model.config()), model.params(), "antecedent")
      .scalar();
}

Tensor CoarseScoreTable(const Tensor& reps, const Model& model) {
  return MatMul(MatMul(reps, model.params().Get("coarse/weights")), Transpose(reps));
}

}  // namespace coref
