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

#ifndef COREF_COMMANDS_H_
#define COREF_COMMANDS_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "coref/document.h"
#include "coref/inference.h"
#include "coref/metrics.h"
#include "coref/model.h"
#include "coref/synthetic.h"
#include "coref/training.h"

namespace coref {

// Every tunable of a run. Populated from defaults, then a key=value config
// file, then command-line overrides, each layer replacing the previous one.
struct RunConfig {
  ModelConfig model;
  InferenceConfig inference;
  TrainConfig train;
  SyntheticSpec synthetic;
  // Keys assigned by a file or override, in the order first seen.
  std::vector<std::string> assigned;

  // Throws InputError for unknown keys or values of the wrong type.
  void Set(const std::string& key, const std::string& value);
  bool WasAssigned(const std::string& key) const;
};

// Documented config keys in a stable order.
std::vector<std::string> RunConfigKeys();

// Current value of `key` rendered as it would appear in a config file.
std::string RunConfigValue(const RunConfig& config, const std::string& key);

// Lines are "key = value"; '#' starts a comment; blank lines are ignored.
void ApplyConfigText(RunConfig& config, const std::string& text, const std::string& source);
void ApplyConfigFile(RunConfig& config, const std::string& path);
// "key=value".
void ApplyOverride(RunConfig& config, const std::string& assignment);

// Model keys that must agree with a loaded checkpoint. Throws CheckpointError
// naming the first disagreeing key that the config assigned explicitly.
void CheckModelCompatible(const RunConfig& config, const ModelConfig& checkpoint);

struct CostReport {
  int64_t sa_evals = 0;
  int64_t sc_pairs = 0;
  double wall_ms = 0.0;
};

// {"sa_evals": int, "sc_pairs": int, "wall_ms": float}
std::string CostReportToJson(const CostReport& report);

// Runs inference on every document and fills predicted_clusters.
CostReport Predict(const Model& model, std::vector<Document>& docs,
                   const InferenceConfig& config);

// Pairs gold and predicted documents by doc_key. Throws AlignmentError listing
// every unpaired or repeated key. Predicted documents without
// predicted_clusters are scored by their clusters field.
MetricReport EvaluateFiles(const std::vector<Document>& gold,
                           const std::vector<Document>& pred);

struct PruningRow {
  std::string mode;
  int32_t k = 0;
  double avg_f1 = 0.0;
};

// Scores each (mode, model) pair at each K on `docs`.
std::vector<PruningRow> BenchPruning(const std::vector<std::pair<Mode, const Model*>>& models,
                                     const std::vector<Document>& docs,
                                     const InferenceConfig& base,
                                     const std::vector<int32_t>& ks);

// Header "mode,K,avg_f1".
std::string PruningCsv(const std::vector<PruningRow>& rows);
std::vector<PruningRow> ParsePruningCsv(const std::string& csv);
std::string PruningSvg(const std::vector<PruningRow>& rows);

struct ComputeSide {
  std::string mode;
  int32_t k = 0;
  CostReport cost;
};

struct ComputeComparison {
  ComputeSide heuristic;
  ComputeSide coarse_to_fine;
  double sa_ratio = 0.0;  // coarse-to-fine over heuristic
  double k_ratio = 0.0;
  // Share of heuristic antecedent slots owned by spans with fewer than
  // k_large predecessors.
  double short_fraction = 0.0;
  double bound = 0.0;  // k_ratio + (1 - k_ratio) * short_fraction
  bool within_bound = false;
};

ComputeComparison BenchCompute(const Model& model, const std::vector<Document>& docs,
                               const InferenceConfig& base, int32_t k_small,
                               int32_t k_large);

std::string ComputeComparisonToJson(const ComputeComparison& comparison);

}  // namespace coref

#endif  // COREF_COMMANDS_H_
