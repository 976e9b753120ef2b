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

#include "coref/inference.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "coref/encoder.h"
#include "coref/errors.h"
#include "coref/spans.h"

namespace coref {
namespace {

bool Crosses(const Span& a, const Span& b) {
  return (a.start < b.start && b.start <= a.end && a.end < b.end) ||
         (b.start < a.start && a.start <= b.end && b.end < a.end);
}

bool UsesCoarse(Mode mode) { return mode != Mode::kHeuristic; }
bool UsesFine(Mode mode) { return mode != Mode::kCoarseOnly; }

// Minimal disjoint-set forest over beam positions.
class DisjointSets {
 public:
  explicit DisjointSets(size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int32_t Find(int32_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void Union(int32_t a, int32_t b) {
    a = Find(a);
    b = Find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int32_t> parent_;
};

}  // namespace

std::string_view ModeName(Mode mode) {
  switch (mode) {
    case Mode::kHeuristic: return "heuristic";
    case Mode::kCoarseToFine: return "coarse_to_fine";
    case Mode::kCoarseOnly: return "coarse_only";
  }
  return "unknown";
}

Mode ParseMode(std::string_view name) {
  if (name == "heuristic") return Mode::kHeuristic;
  if (name == "coarse_to_fine") return Mode::kCoarseToFine;
  if (name == "coarse_only") return Mode::kCoarseOnly;
  throw InputError("unknown mode '" + std::string(name) +
                   "' (expected heuristic, coarse_to_fine or coarse_only)");
}

void InferenceConfig::Validate() const {
  if (iterations < 1) throw InputError("iterations (N) must be at least 1");
  if (max_antecedents < 1) throw InputError("max_antecedents (K) must be at least 1");
  if (!(spans_per_token > 0.0)) throw InputError("spans_per_token must be positive");
}

size_t AntecedentBeam::total() const {
  size_t n = 0;
  for (const auto& c : candidates) n += c.size();
  return n;
}

SpanBeam Stage1Prune(std::span<const double> mention_scores,
                     const std::vector<Span>& candidates, double spans_per_token,
                     int32_t num_tokens, bool suppress_crossing) {
  if (mention_scores.size() != candidates.size()) {
    throw ShapeError("stage 1: scores and candidates differ in length");
  }
  const size_t limit = std::min(
      candidates.size(), static_cast<size_t>(std::ceil(spans_per_token * num_tokens)));
  std::vector<int32_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int32_t a, int32_t b) {
    if (mention_scores[a] != mention_scores[b]) return mention_scores[a] > mention_scores[b];
    return candidates[a] < candidates[b];
  });
  SpanBeam beam;
  for (int32_t idx : order) {
    if (beam.size() == limit) break;
    if (suppress_crossing &&
        std::any_of(beam.candidate_indices.begin(), beam.candidate_indices.end(),
                    [&](int32_t kept) { return Crosses(candidates[kept], candidates[idx]); })) {
      continue;
    }
    beam.candidate_indices.push_back(idx);
  }
  std::sort(beam.candidate_indices.begin(), beam.candidate_indices.end(),
            [&](int32_t a, int32_t b) { return candidates[a] < candidates[b]; });
  return beam;
}

AntecedentBeam HeuristicAntecedents(size_t beam_size, int32_t max_antecedents) {
  if (max_antecedents < 1) throw InputError("K must be at least 1");
  AntecedentBeam out;
  out.candidates.resize(beam_size);
  for (size_t i = 0; i < beam_size; ++i) {
    const int32_t first = std::max<int32_t>(0, static_cast<int32_t>(i) - max_antecedents);
    for (int32_t j = first; j < static_cast<int32_t>(i); ++j) out.candidates[i].push_back(j);
  }
  return out;
}

AntecedentBeam AllAntecedents(size_t beam_size) {
  AntecedentBeam out;
  out.candidates.resize(beam_size);
  for (size_t i = 0; i < beam_size; ++i) {
    for (int32_t j = 0; j < static_cast<int32_t>(i); ++j) out.candidates[i].push_back(j);
  }
  return out;
}

AntecedentBeam CoarseToFineAntecedents(std::span<const double> mention_scores,
                                       const Tensor& coarse_scores,
                                       int32_t max_antecedents) {
  if (max_antecedents < 1) throw InputError("K must be at least 1");
  const size_t m = mention_scores.size();
  if (coarse_scores.rows() != m || coarse_scores.cols() != m) {
    throw ShapeError("stage 2: coarse table " + coarse_scores.ShapeString() +
                     " does not cover a beam of " + std::to_string(m));
  }
  AntecedentBeam out;
  out.candidates.resize(m);
  std::vector<double> score;
  for (size_t i = 0; i < m; ++i) {
    std::vector<int32_t>& cands = out.candidates[i];
    score.assign(i, 0.0);
    for (size_t j = 0; j < i; ++j) {
      score[j] = mention_scores[i] + mention_scores[j] + coarse_scores(i, j);
      cands.push_back(static_cast<int32_t>(j));
    }
    const size_t keep = std::min<size_t>(i, max_antecedents);
    auto better = [&](int32_t a, int32_t b) {
      if (score[a] != score[b]) return score[a] > score[b];
      return a > b;
    };
    std::partial_sort(cands.begin(), cands.begin() + keep, cands.end(), better);
    cands.resize(keep);
  }
  return out;
}

double PairwiseScore(int32_t i, int32_t j, const Tensor& reps,
                     std::span<const double> mention_scores, const PairFeatures& features,
                     const Model& model, Mode mode) {
  double s = mention_scores[i] + mention_scores[j];
  if (UsesCoarse(mode)) {
    const Tensor& w = model.params().Get("coarse/weights");
    const auto g_i = reps.row(i);
    const auto g_j = reps.row(j);
    double coarse = 0.0;
    for (size_t a = 0; a < g_i.size(); ++a) {
      double inner = 0.0;
      for (size_t b = 0; b < g_j.size(); ++b) inner += w(a, b) * g_j[b];
      coarse += g_i[a] * inner;
    }
    s += coarse;
  }
  if (UsesFine(mode)) s += AntecedentScore(reps.row(i), reps.row(j), features, model);
  return s;
}

std::vector<double> AntecedentDistribution(std::span<const double> scores) {
  double max_logit = 0.0;
  for (double s : scores) {
    if (!std::isfinite(s)) throw NumericError("antecedent distribution: non-finite score");
    max_logit = std::max(max_logit, s);
  }
  std::vector<double> probs(scores.size() + 1);
  probs[0] = std::exp(-max_logit);
  double total = probs[0];
  for (size_t k = 0; k < scores.size(); ++k) {
    probs[k + 1] = std::exp(scores[k] - max_logit);
    total += probs[k + 1];
  }
  for (double& p : probs) p /= total;
  return probs;
}

std::vector<double> ExpectedAntecedent(std::span<const double> probs, int32_t self,
                                       std::span<const int32_t> candidates,
                                       const Tensor& reps) {
  if (probs.size() != candidates.size() + 1) {
    throw ShapeError("expected antecedent: probabilities do not match candidates");
  }
  std::vector<double> a(reps.cols(), 0.0);
  for (size_t k = 0; k < probs.size(); ++k) {
    const auto g = reps.row(k == 0 ? self : candidates[k - 1]);
    for (size_t d = 0; d < a.size(); ++d) a[d] += probs[k] * g[d];
  }
  return a;
}

std::vector<double> RefineSpan(std::span<const double> g, std::span<const double> a,
                               const Model& model) {
  if (g.size() != a.size()) throw ShapeError("refine: span and antecedent widths differ");
  const Tensor& w = model.params().Get("refine/gate/weights");
  const Tensor& b = model.params().Get("refine/gate/bias");
  std::vector<double> out(g.size());
  for (size_t d = 0; d < g.size(); ++d) {
    double z = b[d];
    for (size_t k = 0; k < g.size(); ++k) z += g[k] * w(k, d) + a[k] * w(g.size() + k, d);
    const double f = 1.0 / (1.0 + std::exp(-z));
    out[d] = f * g[d] + (1.0 - f) * a[d];
  }
  return out;
}

std::vector<Cluster> DecodeClusters(const std::vector<std::vector<double>>& distributions,
                                    const AntecedentBeam& antecedents,
                                    const std::vector<Span>& beam_spans) {
  const size_t m = beam_spans.size();
  if (distributions.size() != m || antecedents.candidates.size() != m) {
    throw ShapeError("decode: distributions, antecedents and beam differ in size");
  }
  DisjointSets sets(m);
  std::vector<bool> linked(m, false);
  for (size_t i = 0; i < m; ++i) {
    const auto& row = distributions[i];
    const size_t best = std::max_element(row.begin(), row.end()) - row.begin();
    if (best == 0) continue;
    const int32_t j = antecedents.candidates[i][best - 1];
    sets.Union(static_cast<int32_t>(i), j);
    linked[i] = linked[j] = true;
  }
  std::vector<Cluster> by_root(m);
  for (size_t i = 0; i < m; ++i) {
    if (linked[i]) by_root[sets.Find(static_cast<int32_t>(i))].push_back(beam_spans[i]);
  }
  std::vector<Cluster> clusters;
  for (Cluster& c : by_root) {
    if (c.size() >= 2) clusters.push_back(std::move(c));
  }
  return CanonicalClusters(std::move(clusters));
}

ForwardGraph BuildForward(Tape& tape, const Model& model, const Document& doc,
                          const InferenceConfig& config) {
  config.Validate();
  ForwardGraph graph;
  if (doc.tokens.empty()) return graph;

  Var inputs = TokenInputs(tape, model, doc);
  Var states = EncodeTokens(tape, inputs, doc, model);
  graph.candidates = CandidateSpans(doc, model.config().max_span_width);
  Var candidate_reps = SpanRepresentations(tape, graph.candidates, states, inputs, model);
  graph.candidate_mention_scores = MentionScores(tape, candidate_reps, model, &graph.counters);

  // Stage 1.
  graph.beam = Stage1Prune(tape.value(graph.candidate_mention_scores).data(),
                           graph.candidates, config.spans_per_token, doc.num_tokens(),
                           config.suppress_crossing);
  for (int32_t idx : graph.beam.candidate_indices) {
    graph.beam_spans.push_back(graph.candidates[idx]);
  }
  const size_t m = graph.beam.size();
  if (m == 0) return graph;
  graph.reps.push_back(tape.GatherRows(candidate_reps, graph.beam.candidate_indices));
  graph.beam_mention_scores =
      tape.GatherRows(graph.candidate_mention_scores, graph.beam.candidate_indices);

  // Stage 2.
  Var first_coarse;
  if (UsesCoarse(config.mode)) {
    first_coarse = CoarseScores(tape, graph.reps[0], model, &graph.counters);
  }
  if (!config.prune_antecedents) {
    graph.antecedents = AllAntecedents(m);
  } else if (config.mode == Mode::kHeuristic) {
    graph.antecedents = HeuristicAntecedents(m, config.max_antecedents);
  } else {
    graph.antecedents = CoarseToFineAntecedents(tape.value(graph.beam_mention_scores).data(),
                                                tape.value(first_coarse),
                                                config.max_antecedents);
  }

  std::vector<int32_t> rows_i, rows_j, coarse_entries;
  graph.pair_offsets = {0};
  graph.slot_offsets = {0};
  for (size_t i = 0; i < m; ++i) {
    graph.slot_spans.push_back(static_cast<int32_t>(i));
    for (int32_t j : graph.antecedents.candidates[i]) {
      graph.pairs.push_back(PairIndex{static_cast<int32_t>(i), j});
      graph.features.push_back(
          ComputePairFeatures(static_cast<int32_t>(i), j, graph.beam_spans, doc));
      rows_i.push_back(static_cast<int32_t>(i));
      rows_j.push_back(j);
      coarse_entries.push_back(static_cast<int32_t>(i * m) + j);
      graph.slot_spans.push_back(j);
    }
    graph.pair_offsets.push_back(static_cast<int32_t>(graph.pairs.size()));
    graph.slot_offsets.push_back(static_cast<int32_t>(graph.slot_spans.size()));
  }

  // Stage 3 with N - 1 refinement steps. Mention scores stay those of g^1.
  Var base = tape.Add(tape.GatherRows(graph.beam_mention_scores, rows_i),
                      tape.GatherRows(graph.beam_mention_scores, rows_j));
  for (int32_t n = 1; n <= config.iterations; ++n) {
    Var reps = graph.reps.back();
    Var logits = base;
    if (UsesCoarse(config.mode)) {
      Var coarse = n == 1 ? first_coarse : CoarseScores(tape, reps, model, &graph.counters);
      logits = tape.Add(logits, tape.GatherEntries(coarse, coarse_entries));
    }
    if (UsesFine(config.mode)) {
      logits = tape.Add(
          logits, AntecedentScores(tape, reps, graph.pairs, graph.features, model,
                                   &graph.counters));
    }
    graph.logits.push_back(logits);
    Var probs = tape.SegmentSoftmax(logits, graph.pair_offsets, /*fixed_zero_logit=*/true);
    graph.distributions.push_back(probs);
    if (n == config.iterations) break;

    Var expected = tape.SegmentWeightedSum(probs, tape.GatherRows(reps, graph.slot_spans),
                                           graph.slot_offsets);
    const Var gate_in[] = {reps, expected};
    Var gate = tape.Sigmoid(tape.AddBias(
        tape.MatMul(tape.ConcatCols(gate_in),
                    tape.Param(model.params(), "refine/gate/weights")),
        tape.Param(model.params(), "refine/gate/bias")));
    graph.expected.push_back(expected);
    graph.gates.push_back(gate);
    graph.reps.push_back(tape.Add(expected, tape.Mul(gate, tape.Sub(reps, expected))));
  }
  return graph;
}

std::vector<std::vector<double>> DistributionRows(const Tensor& flat,
                                                  const Offsets& slot_offsets) {
  std::vector<std::vector<double>> rows;
  for (size_t s = 0; s + 1 < slot_offsets.size(); ++s) {
    rows.emplace_back(flat.data().begin() + slot_offsets[s],
                      flat.data().begin() + slot_offsets[s + 1]);
  }
  return rows;
}

InferenceResult RunInference(const Model& model, const Document& doc,
                             const InferenceConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  Tape tape;
  ForwardGraph graph = BuildForward(tape, model, doc, config);
  InferenceResult result;
  result.beam_spans = graph.beam_spans;
  result.antecedents = graph.antecedents;
  if (!graph.empty()) {
    result.distributions =
        DistributionRows(tape.value(graph.distributions.back()), graph.slot_offsets);
    result.clusters = DecodeClusters(result.distributions, result.antecedents,
                                     result.beam_spans);
  }
  result.counters = graph.counters;
  result.counters.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
          .count();
  return result;
}

}  // namespace coref
