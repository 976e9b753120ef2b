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

#ifndef COREF_INFERENCE_H_
#define COREF_INFERENCE_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coref/document.h"
#include "coref/model.h"
#include "coref/scoring.h"
#include "coref/tape.h"

namespace coref {

// Antecedent pruning and pairwise factors.
//
//   kHeuristic     nearest-K antecedents; s = s_m(i) + s_m(j) + s_a(i, j)
//   kCoarseToFine  top-K antecedents by s_m(i) + s_m(j) + s_c(i, j);
//                  s = s_m(i) + s_m(j) + s_c(i, j) + s_a(i, j)
//   kCoarseOnly    as kCoarseToFine with s_a dropped from the final score
enum class Mode { kHeuristic, kCoarseToFine, kCoarseOnly };

std::string_view ModeName(Mode mode);
// Accepts "heuristic", "coarse_to_fine" and "coarse_only".
Mode ParseMode(std::string_view name);

struct InferenceConfig {
  int32_t iterations = 2;         // N
  int32_t max_antecedents = 50;   // K
  double spans_per_token = 0.4;   // lambda
  Mode mode = Mode::kCoarseToFine;
  // When false every predecessor is kept (stage 2 disabled).
  bool prune_antecedents = true;
  // Reject stage-1 spans that cross an already accepted span.
  bool suppress_crossing = false;

  void Validate() const;
};

// Surviving spans as indices into the candidate list, in document order.
struct SpanBeam {
  std::vector<int32_t> candidate_indices;
  size_t size() const { return candidate_indices.size(); }
};

// Candidate antecedents of each beam span as beam positions. Heuristic and
// unpruned sets are in document order; coarse-to-fine sets are in descending
// coarse score.
struct AntecedentBeam {
  std::vector<std::vector<int32_t>> candidates;
  size_t total() const;
};

// Stage 1: the ceil(lambda * T) highest mention scores, ties broken by
// (start, end), returned in document order.
SpanBeam Stage1Prune(std::span<const double> mention_scores,
                     const std::vector<Span>& candidates, double spans_per_token,
                     int32_t num_tokens, bool suppress_crossing = false);

// The K beam spans immediately preceding each span.
AntecedentBeam HeuristicAntecedents(size_t beam_size, int32_t max_antecedents);

// Every predecessor of each span.
AntecedentBeam AllAntecedents(size_t beam_size);

// Stage 2: the top K predecessors j of each i by
// s_m(i) + s_m(j) + s_c(i, j); ties go to the nearer j.
AntecedentBeam CoarseToFineAntecedents(std::span<const double> mention_scores,
                                       const Tensor& coarse_scores,
                                       int32_t max_antecedents);

// s(i, j) over beam positions, evaluated directly from `reps` (M x |g|) and
// the beam's mention scores. The dummy score is never computed: it is the
// fixed zero logit of the distribution.
double PairwiseScore(int32_t i, int32_t j, const Tensor& reps,
                     std::span<const double> mention_scores, const PairFeatures& features,
                     const Model& model, Mode mode);

// softmax([0; scores]). Throws NumericError on non-finite scores.
std::vector<double> AntecedentDistribution(std::span<const double> scores);

// a_i = P(eps) g_i + sum_k P(c_k) g_{c_k}: the dummy stands for the span
// itself. `probs` has one more entry than `candidates`.
std::vector<double> ExpectedAntecedent(std::span<const double> probs, int32_t self,
                                       std::span<const int32_t> candidates,
                                       const Tensor& reps);

// f = sigmoid([g; a] W_f + b_f); returns f o g + (1 - f) o a.
std::vector<double> RefineSpan(std::span<const double> g, std::span<const double> a,
                               const Model& model);

// Links each span to its most probable antecedent (eps, slot 0, wins ties),
// takes connected components and drops singletons.
std::vector<Cluster> DecodeClusters(const std::vector<std::vector<double>>& distributions,
                                    const AntecedentBeam& antecedents,
                                    const std::vector<Span>& beam_spans);

// The recorded computation for one document.
struct ForwardGraph {
  std::vector<Span> candidates;
  Var candidate_mention_scores;  // candidates x 1
  SpanBeam beam;
  std::vector<Span> beam_spans;
  Var beam_mention_scores;  // M x 1
  AntecedentBeam antecedents;
  std::vector<PairIndex> pairs;  // grouped by anaphor, in candidate order
  std::vector<PairFeatures> features;
  Offsets pair_offsets;  // pairs of beam span i: [pair_offsets[i], pair_offsets[i+1])
  // Distribution slots of beam span i: [slot_offsets[i], slot_offsets[i+1]);
  // the first slot is the dummy.
  Offsets slot_offsets;
  std::vector<int32_t> slot_spans;  // beam position each slot stands for
  std::vector<Var> reps;            // g^1 .. g^N, M x |g|
  std::vector<Var> logits;          // per iteration, pairs x 1
  std::vector<Var> distributions;   // per iteration, slots x 1
  std::vector<Var> expected;        // a^1 .. a^(N-1)
  std::vector<Var> gates;           // f^1 .. f^(N-1)
  CostCounters counters;

  bool empty() const { return beam_spans.empty(); }
};

ForwardGraph BuildForward(Tape& tape, const Model& model, const Document& doc,
                          const InferenceConfig& config);

// Splits a slots x 1 distribution into per-span rows.
std::vector<std::vector<double>> DistributionRows(const Tensor& flat,
                                                  const Offsets& slot_offsets);

struct InferenceResult {
  std::vector<Span> beam_spans;
  AntecedentBeam antecedents;
  std::vector<std::vector<double>> distributions;  // final iteration
  std::vector<Cluster> clusters;
  CostCounters counters;
};

InferenceResult RunInference(const Model& model, const Document& doc,
                             const InferenceConfig& config);

}  // namespace coref

#endif  // COREF_INFERENCE_H_
