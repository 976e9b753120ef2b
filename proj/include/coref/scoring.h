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

#ifndef COREF_SCORING_H_
#define COREF_SCORING_H_

#include <cstdint>
#include <span>
#include <vector>

#include "coref/document.h"
#include "coref/model.h"
#include "coref/tape.h"

namespace coref {

// Counts of scoring work done for one document.
struct CostCounters {
  int64_t mention_ffnn_evals = 0;     // rows passed through FFNN_m
  int64_t antecedent_ffnn_evals = 0;  // pairs passed through FFNN_a (sa_evals)
  int64_t coarse_pairs = 0;           // ordered pairs in coarse tables (sc_pairs)
  double wall_ms = 0.0;

  int64_t ffnn_evals() const { return mention_ffnn_evals + antecedent_ffnn_evals; }
  CostCounters& operator+=(const CostCounters& other);
};

struct PairFeatures {
  int32_t distance_bucket = 0;
  bool same_speaker = false;
  int32_t genre = 0;
};

// Antecedent-rank distance buckets {1, 2, 3, 4, 5-7, 8-15, 16-31, 32-63, 64+}
// -> 0..8. Distance must be positive.
int32_t DistanceBucket(int32_t rank_distance);

// Features of the ordered pair (i, j), j < i, where i and j are positions in
// `beam_spans`. Speaker comes from each span's start token.
PairFeatures ComputePairFeatures(int32_t i, int32_t j, const std::vector<Span>& beam_spans,
                                 const Document& doc);

struct PairIndex {
  int32_t i = 0;  // anaphor
  int32_t j = 0;  // antecedent
};

// s_m = w_m . FFNN_m(g) for every row of `reps`; result rows x 1.
Var MentionScores(Tape& tape, Var reps, const Model& model,
                  CostCounters* counters = nullptr);

// s_a = w_a . FFNN_a([g_i; g_j; g_i o g_j; phi]) for every pair; result is
// pairs x 1.
Var AntecedentScores(Tape& tape, Var reps, const std::vector<PairIndex>& pairs,
                     const std::vector<PairFeatures>& features, const Model& model,
                     CostCounters* counters = nullptr);

// s_c(i, j) = g_i . W_c . g_j for all ordered pairs as (G W_c) G^T; M x M.
Var CoarseScores(Tape& tape, Var reps, const Model& model,
                 CostCounters* counters = nullptr);

// Direct evaluations that record nothing.
double MentionScore(std::span<const double> g, const Model& model);
double AntecedentScore(std::span<const double> g_i, std::span<const double> g_j,
                       const PairFeatures& features, const Model& model);
Tensor CoarseScoreTable(const Tensor& reps, const Model& model);
// [g_i; g_j; g_i o g_j; phi] as a 1-row tensor.
Tensor AntecedentInput(std::span<const double> g_i, std::span<const double> g_j,
                       const PairFeatures& features, const Model& model);

}  // namespace coref

#endif  // COREF_SCORING_H_
