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

#ifndef COREF_TRAINING_H_
#define COREF_TRAINING_H_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "coref/document.h"
#include "coref/inference.h"
#include "coref/metrics.h"
#include "coref/model.h"
#include "coref/tape.h"

namespace coref {

// For each beam span, the distribution slots (0 = dummy, k = k-th candidate)
// holding a gold antecedent. Spans with no surviving gold antecedent get {0}.
struct GoldAntecedentSets {
  std::vector<std::vector<int32_t>> slots;
  // Gold mentions whose gold predecessors are in the beam but were all pruned
  // from their candidate set.
  int64_t pruned_fallbacks = 0;
};

GoldAntecedentSets GoldAntecedents(const std::vector<Span>& beam_spans,
                                   const std::vector<Cluster>& gold_clusters,
                                   const AntecedentBeam& antecedents);

// -sum_i log sum_{slot in GOLD(i)} P(slot), evaluated directly.
double MarginalNll(const std::vector<std::vector<double>>& distributions,
                   const GoldAntecedentSets& gold);

// The same loss recorded on the tape over a flat slots x 1 distribution.
Var MarginalNllLoss(Tape& tape, Var distribution, const Offsets& slot_offsets,
                    const GoldAntecedentSets& gold);

// Adam with bias correction.
class AdamOptimizer {
 public:
  AdamOptimizer(double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                double epsilon = 1e-8)
      : learning_rate_(learning_rate), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

  void Step(ParamStore& params, const Gradients& grads);
  int64_t steps() const { return step_; }

 private:
  double learning_rate_, beta1_, beta2_, epsilon_;
  int64_t step_ = 0;
  std::map<std::string, Tensor> first_moment_, second_moment_;
};

// Scales gradients in place so their global L2 norm is at most max_norm.
// Returns the norm before clipping.
double ClipGlobalNorm(Gradients& grads, double max_norm);

struct TrainConfig {
  int32_t epochs = 10;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double clip_norm = 5.0;
  uint64_t seed = 1;
  InferenceConfig inference;
  // Documents per update. Gradients within a batch are summed in document
  // order, so results do not depend on `threads`.
  int32_t batch_size = 1;
  int32_t threads = 1;
  // Written after every epoch when non-empty; "{epoch}" is replaced by the
  // epoch number.
  std::string checkpoint_pattern;

  void Validate() const;
};

struct EpochLog {
  int32_t epoch = 0;
  double train_loss = 0.0;  // mean over documents
  double dev_avg_f1 = 0.0;
  int64_t pruned_fallbacks = 0;
};

// {"epoch": int, "train_loss": float, "dev_avg_f1": float}
std::string EpochLogToJson(const EpochLog& log);

struct DocumentGradient {
  double loss = 0.0;
  Gradients grads;  // only blocks the document touched
  int64_t pruned_fallbacks = 0;
};

DocumentGradient ComputeDocumentGradient(const Model& model, const Document& doc,
                                         const InferenceConfig& config);

// Loss of one document without gradients.
double DocumentLoss(const Model& model, const Document& doc, const InferenceConfig& config);

// Corpus metrics of running inference on `docs`.
MetricReport Evaluate(const Model& model, const std::vector<Document>& docs,
                      const InferenceConfig& config);

struct TrainResult {
  Model model;
  std::vector<EpochLog> log;
  bool diverged = false;
  std::string message;
};

// Trains from `initial`. Dev F1 is measured on `dev`, or on `train` when dev
// is empty. On a non-finite loss training stops and the parameters from the
// end of the last completed epoch are returned with diverged = true.
TrainResult Train(Model initial, const std::vector<Document>& train,
                  const std::vector<Document>& dev, const TrainConfig& config,
                  const std::function<void(const EpochLog&)>& on_epoch = {});

}  // namespace coref

#endif  // COREF_TRAINING_H_
