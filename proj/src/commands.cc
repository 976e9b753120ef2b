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

#include "coref/commands.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "coref/errors.h"
#include "json.hpp"

namespace coref {
namespace {

int64_t ParseInt(const std::string& key, const std::string& value) {
  int64_t out = 0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || value.empty()) {
    throw InputError("config key '" + key + "' expects an integer, got '" + value + "'");
  }
  return out;
}

int32_t ParseInt32(const std::string& key, const std::string& value) {
  const int64_t v = ParseInt(key, value);
  if (v < INT32_MIN || v > INT32_MAX) {
    throw InputError("config key '" + key + "' is out of range: " + value);
  }
  return static_cast<int32_t>(v);
}

uint64_t ParseSeed(const std::string& key, const std::string& value) {
  uint64_t out = 0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || value.empty()) {
    throw InputError("config key '" + key + "' expects a non-negative integer, got '" +
                     value + "'");
  }
  return out;
}

double ParseDouble(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || value.empty()) {
    throw InputError("config key '" + key + "' expects a number, got '" + value + "'");
  }
  return out;
}

bool ParseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw InputError("config key '" + key + "' expects true or false, got '" + value + "'");
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Trim(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct KeySpec {
  std::string name;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define INT_KEY(NAME, FIELD)                                                         \
  KeySpec {                                                                          \
    NAME, [](RunConfig& c, const std::string& k, const std::string& v) {             \
      c.FIELD = ParseInt32(k, v);                                                    \
    },                                                                               \
        [](const RunConfig& c) { return std::to_string(c.FIELD); }                   \
  }
#define DOUBLE_KEY(NAME, FIELD)                                                      \
  KeySpec {                                                                          \
    NAME, [](RunConfig& c, const std::string& k, const std::string& v) {             \
      c.FIELD = ParseDouble(k, v);                                                   \
    },                                                                               \
        [](const RunConfig& c) { return FormatDouble(c.FIELD); }                     \
  }
#define BOOL_KEY(NAME, FIELD)                                                        \
  KeySpec {                                                                          \
    NAME, [](RunConfig& c, const std::string& k, const std::string& v) {             \
      c.FIELD = ParseBool(k, v);                                                     \
    },                                                                               \
        [](const RunConfig& c) { return std::string(c.FIELD ? "true" : "false"); }   \
  }
#define SEED_KEY(NAME, FIELD)                                                        \
  KeySpec {                                                                          \
    NAME, [](RunConfig& c, const std::string& k, const std::string& v) {             \
      c.FIELD = ParseSeed(k, v);                                                     \
    },                                                                               \
        [](const RunConfig& c) { return std::to_string(c.FIELD); }                   \
  }

const std::vector<KeySpec>& Keys() {
  static const std::vector<KeySpec> keys = {
      // Model.
      INT_KEY("token_dim", model.encoder.token_dim),
      INT_KEY("hidden_dim", model.encoder.hidden_dim),
      INT_KEY("encoder_layers", model.encoder.num_layers),
      INT_KEY("width_buckets", model.encoder.width_buckets),
      INT_KEY("width_dim", model.encoder.width_dim),
      INT_KEY("ffnn_hidden", model.ffnn_hidden),
      INT_KEY("ffnn_layers", model.ffnn_layers),
      INT_KEY("feature_dim", model.feature_dim),
      INT_KEY("num_genres", model.num_genres),
      INT_KEY("max_span_width", model.max_span_width),
      DOUBLE_KEY("init_scale", model.init_scale),
      // Inference.
      INT_KEY("iterations", inference.iterations),
      INT_KEY("max_antecedents", inference.max_antecedents),
      DOUBLE_KEY("spans_per_token", inference.spans_per_token),
      KeySpec{"mode",
              [](RunConfig& c, const std::string&, const std::string& v) {
                c.inference.mode = ParseMode(v);
              },
              [](const RunConfig& c) { return std::string(ModeName(c.inference.mode)); }},
      BOOL_KEY("prune_antecedents", inference.prune_antecedents),
      BOOL_KEY("suppress_crossing", inference.suppress_crossing),
      // Training.
      INT_KEY("epochs", train.epochs),
      DOUBLE_KEY("learning_rate", train.learning_rate),
      DOUBLE_KEY("beta1", train.beta1),
      DOUBLE_KEY("beta2", train.beta2),
      DOUBLE_KEY("adam_epsilon", train.adam_epsilon),
      DOUBLE_KEY("clip_norm", train.clip_norm),
      SEED_KEY("seed", train.seed),
      INT_KEY("batch_size", train.batch_size),
      INT_KEY("threads", train.threads),
      KeySpec{"checkpoint_pattern",
              [](RunConfig& c, const std::string&, const std::string& v) {
                c.train.checkpoint_pattern = v;
              },
              [](const RunConfig& c) { return c.train.checkpoint_pattern; }},
      // Synthetic corpus.
      INT_KEY("synthetic_documents", synthetic.num_documents),
      INT_KEY("synthetic_entities", synthetic.entity_count),
      INT_KEY("synthetic_mentions_per_entity", synthetic.mentions_per_entity),
      INT_KEY("synthetic_attributes", synthetic.attribute_count),
      DOUBLE_KEY("synthetic_ambiguity_rate", synthetic.ambiguity_rate),
      DOUBLE_KEY("synthetic_pronoun_rate", synthetic.pronoun_rate),
      DOUBLE_KEY("synthetic_repeat_rate", synthetic.repeat_rate),
      DOUBLE_KEY("synthetic_filler_rate", synthetic.filler_sentence_rate),
      INT_KEY("synthetic_vocabulary_size", synthetic.vocabulary_size),
      INT_KEY("synthetic_name_pool_size", synthetic.name_pool_size),
      INT_KEY("synthetic_min_sentence_length", synthetic.min_sentence_length),
      INT_KEY("synthetic_max_sentence_length", synthetic.max_sentence_length),
      DOUBLE_KEY("synthetic_long_range_fraction", synthetic.long_range_fraction),
      INT_KEY("synthetic_long_range_gap", synthetic.long_range_gap),
      INT_KEY("synthetic_genres", synthetic.num_genres),
      INT_KEY("synthetic_speakers", synthetic.num_speakers),
      SEED_KEY("synthetic_seed", synthetic.seed),
  };
  return keys;
}

#undef INT_KEY
#undef DOUBLE_KEY
#undef BOOL_KEY
#undef SEED_KEY

const KeySpec& FindKey(const std::string& key) {
  for (const KeySpec& spec : Keys()) {
    if (spec.name == key) return spec;
  }
  throw InputError("unknown config key '" + key + "'");
}

}  // namespace

void RunConfig::Set(const std::string& key, const std::string& value) {
  const KeySpec& spec = FindKey(key);
  try {
    spec.set(*this, key, value);
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    throw InputError("config key '" + key + "': " + e.what());
  }
  if (!WasAssigned(key)) assigned.push_back(key);
}

bool RunConfig::WasAssigned(const std::string& key) const {
  return std::find(assigned.begin(), assigned.end(), key) != assigned.end();
}

std::vector<std::string> RunConfigKeys() {
  std::vector<std::string> names;
  for (const KeySpec& spec : Keys()) names.push_back(spec.name);
  return names;
}

std::string RunConfigValue(const RunConfig& config, const std::string& key) {
  return FindKey(key).get(config);
}

void ApplyConfigText(RunConfig& config, const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError(source + ":" + std::to_string(line_number) + ": expected key = value");
    }
    try {
      config.Set(Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
    } catch (const InputError& e) {
      throw InputError(source + ":" + std::to_string(line_number) + ": " + e.what());
    }
  }
}

void ApplyConfigFile(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path);
  std::stringstream text;
  text << in.rdbuf();
  ApplyConfigText(config, text.str(), path);
}

void ApplyOverride(RunConfig& config, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw InputError("override '" + assignment + "' is not of the form key=value");
  }
  config.Set(Trim(assignment.substr(0, eq)), Trim(assignment.substr(eq + 1)));
}

void CheckModelCompatible(const RunConfig& config, const ModelConfig& checkpoint) {
  static const char* kShapeKeys[] = {"token_dim",   "hidden_dim",  "encoder_layers",
                                     "width_buckets", "width_dim", "ffnn_hidden",
                                     "ffnn_layers", "feature_dim", "num_genres",
                                     "max_span_width"};
  RunConfig loaded;
  loaded.model = checkpoint;
  for (const char* key : kShapeKeys) {
    if (!config.WasAssigned(key)) continue;
    const std::string want = RunConfigValue(config, key);
    const std::string have = RunConfigValue(loaded, key);
    if (want != have) {
      throw CheckpointError("checkpoint has " + std::string(key) + " = " + have +
                            " but the config requests " + want);
    }
  }
}

std::string CostReportToJson(const CostReport& report) {
  nlohmann::json j = {{"sa_evals", report.sa_evals},
                      {"sc_pairs", report.sc_pairs},
                      {"wall_ms", report.wall_ms}};
  return j.dump();
}

CostReport Predict(const Model& model, std::vector<Document>& docs,
                   const InferenceConfig& config) {
  CostReport report;
  for (Document& doc : docs) {
    InferenceResult result = RunInference(model, doc, config);
    doc.predicted_clusters = std::move(result.clusters);
    report.sa_evals += result.counters.antecedent_ffnn_evals;
    report.sc_pairs += result.counters.coarse_pairs;
    report.wall_ms += result.counters.wall_ms;
  }
  return report;
}

MetricReport EvaluateFiles(const std::vector<Document>& gold,
                           const std::vector<Document>& pred) {
  std::map<std::string, const Document*> by_key;
  std::vector<std::string> problems;
  for (const Document& doc : pred) {
    if (!by_key.emplace(doc.doc_key, &doc).second) {
      problems.push_back("duplicate predicted doc_key " + doc.doc_key);
    }
  }
  std::set<std::string> seen;
  for (const Document& doc : gold) {
    if (!seen.insert(doc.doc_key).second) {
      problems.push_back("duplicate gold doc_key " + doc.doc_key);
    } else if (!by_key.count(doc.doc_key)) {
      problems.push_back("missing prediction for " + doc.doc_key);
    }
  }
  for (const auto& [key, doc] : by_key) {
    if (!seen.count(key)) problems.push_back("prediction without gold document " + key);
  }
  if (!problems.empty()) {
    std::string message = "doc_key mismatch:";
    for (const std::string& p : problems) message += "\n  " + p;
    throw AlignmentError(message);
  }
  CorpusEvaluator evaluator;
  for (const Document& doc : gold) {
    const Document& p = *by_key.at(doc.doc_key);
    evaluator.Add(doc.gold_clusters,
                  p.predicted_clusters ? *p.predicted_clusters : p.gold_clusters);
  }
  return evaluator.Report();
}

std::vector<PruningRow> BenchPruning(const std::vector<std::pair<Mode, const Model*>>& models,
                                     const std::vector<Document>& docs,
                                     const InferenceConfig& base,
                                     const std::vector<int32_t>& ks) {
  std::vector<PruningRow> rows;
  for (const auto& [mode, model] : models) {
    for (int32_t k : ks) {
      InferenceConfig config = base;
      config.mode = mode;
      config.max_antecedents = k;
      config.prune_antecedents = true;
      rows.push_back({std::string(ModeName(mode)), k, Evaluate(*model, docs, config).avg_f1});
    }
  }
  return rows;
}

std::string PruningCsv(const std::vector<PruningRow>& rows) {
  std::string csv = "mode,K,avg_f1\n";
  for (const PruningRow& row : rows) {
    csv += row.mode + "," + std::to_string(row.k) + "," + FormatDouble(row.avg_f1) + "\n";
  }
  return csv;
}

std::vector<PruningRow> ParsePruningCsv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || Trim(line) != "mode,K,avg_f1") {
    throw InputError("pruning csv: bad header");
  }
  std::vector<PruningRow> rows;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    std::istringstream fields(line);
    std::string mode, k, f1;
    if (!std::getline(fields, mode, ',') || !std::getline(fields, k, ',') ||
        !std::getline(fields, f1)) {
      throw InputError("pruning csv: bad row '" + line + "'");
    }
    rows.push_back({mode, ParseInt32("K", k), ParseDouble("avg_f1", Trim(f1))});
  }
  return rows;
}

std::string PruningSvg(const std::vector<PruningRow>& rows) {
  constexpr double kWidth = 640, kHeight = 400, kLeft = 70, kRight = 170, kTop = 30,
                   kBottom = 60;
  static const char* kColors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::vector<int32_t> ks;
  std::vector<std::string> modes;
  double lo = 1.0, hi = 0.0;
  for (const PruningRow& row : rows) {
    if (std::find(ks.begin(), ks.end(), row.k) == ks.end()) ks.push_back(row.k);
    if (std::find(modes.begin(), modes.end(), row.mode) == modes.end()) {
      modes.push_back(row.mode);
    }
    lo = std::min(lo, row.avg_f1);
    hi = std::max(hi, row.avg_f1);
  }
  std::sort(ks.begin(), ks.end());
  if (rows.empty()) lo = 0.0, hi = 1.0;
  const double pad = std::max(0.02, 0.1 * (hi - lo));
  lo = std::max(0.0, lo - pad);
  hi = std::min(1.0, hi + pad);
  if (hi <= lo) hi = lo + 0.05;
  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  auto x_of = [&](int32_t k) {
    const size_t idx = std::find(ks.begin(), ks.end(), k) - ks.begin();
    return kLeft + (ks.size() == 1 ? plot_w / 2 : plot_w * idx / (ks.size() - 1));
  };
  auto y_of = [&](double f1) { return kTop + plot_h * (1.0 - (f1 - lo) / (hi - lo)); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return std::string(buf);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"black\"/>\n";
  for (int32_t k : ks) {
    svg << "<text x=\"" << num(x_of(k)) << "\" y=\"" << kTop + plot_h + 18
        << "\" text-anchor=\"middle\">" << k << "</text>\n";
  }
  for (int t = 0; t <= 4; ++t) {
    const double f1 = lo + (hi - lo) * t / 4.0;
    char label[16];
    std::snprintf(label, sizeof(label), "%.1f", 100.0 * f1);
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(y_of(f1) + 4)
        << "\" text-anchor=\"end\">" << label << "</text>\n";
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << num(y_of(f1)) << "\" x2=\""
        << kLeft + plot_w << "\" y2=\"" << num(y_of(f1)) << "\" stroke=\"#dddddd\"/>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\">K (antecedents per span)</text>\n";
  svg << "<text x=\"18\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 18 " << kTop + plot_h / 2 << ")\">Average F1</text>\n";
  for (size_t m = 0; m < modes.size(); ++m) {
    const char* color = kColors[m % 5];
    std::vector<std::pair<int32_t, double>> points;
    for (const PruningRow& row : rows) {
      if (row.mode == modes[m]) points.emplace_back(row.k, row.avg_f1);
    }
    std::sort(points.begin(), points.end());
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [k, f1] : points) svg << num(x_of(k)) << "," << num(y_of(f1)) << " ";
    svg << "\"/>\n";
    for (const auto& [k, f1] : points) {
      svg << "<circle cx=\"" << num(x_of(k)) << "\" cy=\"" << num(y_of(f1))
          << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
    }
    const double ly = kTop + 10 + 20.0 * m;
    svg << "<line x1=\"" << kLeft + plot_w + 15 << "\" y1=\"" << ly << "\" x2=\""
        << kLeft + plot_w + 40 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kLeft + plot_w + 46 << "\" y=\"" << ly + 4 << "\">" << modes[m]
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

ComputeComparison BenchCompute(const Model& model, const std::vector<Document>& docs,
                               const InferenceConfig& base, int32_t k_small,
                               int32_t k_large) {
  if (k_small < 1 || k_large < 1) throw InputError("bench-compute: K must be positive");
  ComputeComparison out;
  InferenceConfig heuristic = base;
  heuristic.mode = Mode::kHeuristic;
  heuristic.max_antecedents = k_large;
  heuristic.prune_antecedents = true;
  InferenceConfig fine = base;
  fine.mode = Mode::kCoarseToFine;
  fine.max_antecedents = k_small;
  fine.prune_antecedents = true;

  int64_t short_slots = 0, all_slots = 0;
  for (const Document& doc : docs) {
    InferenceResult h = RunInference(model, doc, heuristic);
    InferenceResult c = RunInference(model, doc, fine);
    out.heuristic.cost.sa_evals += h.counters.antecedent_ffnn_evals;
    out.heuristic.cost.sc_pairs += h.counters.coarse_pairs;
    out.heuristic.cost.wall_ms += h.counters.wall_ms;
    out.coarse_to_fine.cost.sa_evals += c.counters.antecedent_ffnn_evals;
    out.coarse_to_fine.cost.sc_pairs += c.counters.coarse_pairs;
    out.coarse_to_fine.cost.wall_ms += c.counters.wall_ms;
    for (size_t i = 0; i < h.beam_spans.size(); ++i) {
      const int64_t slots = static_cast<int64_t>(h.antecedents.candidates[i].size());
      all_slots += slots;
      if (static_cast<int64_t>(i) < k_large) short_slots += slots;
    }
  }
  out.heuristic.mode = std::string(ModeName(Mode::kHeuristic));
  out.heuristic.k = k_large;
  out.coarse_to_fine.mode = std::string(ModeName(Mode::kCoarseToFine));
  out.coarse_to_fine.k = k_small;
  out.k_ratio = static_cast<double>(k_small) / k_large;
  out.short_fraction = all_slots == 0 ? 0.0 : static_cast<double>(short_slots) / all_slots;
  out.sa_ratio = out.heuristic.cost.sa_evals == 0
                     ? 0.0
                     : static_cast<double>(out.coarse_to_fine.cost.sa_evals) /
                           out.heuristic.cost.sa_evals;
  out.bound = out.k_ratio + std::max(0.0, 1.0 - out.k_ratio) * out.short_fraction;
  out.within_bound = out.sa_ratio <= out.bound + 1e-12;
  return out;
}

std::string ComputeComparisonToJson(const ComputeComparison& c) {
  auto side = [](const ComputeSide& s) {
    return nlohmann::json{{"mode", s.mode},
                          {"K", s.k},
                          {"sa_evals", s.cost.sa_evals},
                          {"sc_pairs", s.cost.sc_pairs},
                          {"wall_ms", s.cost.wall_ms}};
  };
  nlohmann::json j = {{"heuristic", side(c.heuristic)},
                      {"coarse_to_fine", side(c.coarse_to_fine)},
                      {"sa_ratio", c.sa_ratio},
                      {"k_ratio", c.k_ratio},
                      {"short_fraction", c.short_fraction},
                      {"bound", c.bound},
                      {"within_bound", c.within_bound}};
  return j.dump(2);
}

}  // namespace coref
