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

#include "coref/training.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "coref/errors.h"
#include "json.hpp"

namespace coref {
namespace {

std::string CheckpointPath(const std::string& pattern, int32_t epoch) {
  std::string path = pattern;
  const std::string key = "{epoch}";
  for (size_t at = path.find(key); at != std::string::npos; at = path.find(key, at)) {
    path.replace(at, key.size(), std::to_string(epoch));
  }
  return path;
}

void Accumulate(Gradients& total, const Gradients& part) {
  for (const auto& [name, g] : part) total.at(name).AddInPlace(g);
}

}  // namespace

GoldAntecedentSets GoldAntecedents(const std::vector<Span>& beam_spans,
                                   const std::vector<Cluster>& gold_clusters,
                                   const AntecedentBeam& antecedents) {
  std::map<Span, size_t> cluster_of;
  for (size_t c = 0; c < gold_clusters.size(); ++c) {
    for (const Span& s : gold_clusters[c]) cluster_of.emplace(s, c);
  }
  std::vector<int64_t> beam_cluster(beam_spans.size(), -1);
  for (size_t i = 0; i < beam_spans.size(); ++i) {
    auto it = cluster_of.find(beam_spans[i]);
    if (it != cluster_of.end()) beam_cluster[i] = static_cast<int64_t>(it->second);
  }

  GoldAntecedentSets gold;
  gold.slots.resize(beam_spans.size());
  for (size_t i = 0; i < beam_spans.size(); ++i) {
    const auto& cands = antecedents.candidates[i];
    if (beam_cluster[i] >= 0) {
      for (size_t k = 0; k < cands.size(); ++k) {
        if (beam_cluster[cands[k]] == beam_cluster[i]) {
          gold.slots[i].push_back(static_cast<int32_t>(k + 1));
        }
      }
      if (gold.slots[i].empty()) {
        for (size_t j = 0; j < i; ++j) {
          if (beam_cluster[j] == beam_cluster[i]) {
            ++gold.pruned_fallbacks;
            break;
          }
        }
      }
    }
    if (gold.slots[i].empty()) gold.slots[i].push_back(0);
  }
  return gold;
}

double MarginalNll(const std::vector<std::vector<double>>& distributions,
                   const GoldAntecedentSets& gold) {
  if (distributions.size() != gold.slots.size()) {
    throw ShapeError("marginal nll: distributions and gold sets differ in length");
  }
  double loss = 0.0;
  for (size_t i = 0; i < distributions.size(); ++i) {
    if (gold.slots[i].empty()) throw Error("marginal nll: empty gold antecedent set");
    double mass = 0.0;
    for (int32_t slot : gold.slots[i]) mass += distributions[i].at(slot);
    loss -= std::log(mass);
  }
  return loss;
}

Var MarginalNllLoss(Tape& tape, Var distribution, const Offsets& slot_offsets,
                    const GoldAntecedentSets& gold) {
  if (gold.slots.size() + 1 != slot_offsets.size()) {
    throw ShapeError("marginal nll: gold sets do not match distribution segments");
  }
  Tensor mask(tape.value(distribution).rows(), 1);
  for (size_t i = 0; i < gold.slots.size(); ++i) {
    if (gold.slots[i].empty()) throw Error("marginal nll: empty gold antecedent set");
    for (int32_t slot : gold.slots[i]) mask[slot_offsets[i] + slot] = 1.0;
  }
  Var mass = tape.SegmentSum(tape.Mul(distribution, tape.Constant(std::move(mask))),
                             slot_offsets);
  return tape.Scale(tape.Sum(tape.Log(mass)), -1.0);
}

void AdamOptimizer::Step(ParamStore& params, const Gradients& grads) {
  ++step_;
  const double correction1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double correction2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  for (const auto& [name, g] : grads) {
    Tensor& p = params.Mutable(name);
    auto [m_it, m_new] = first_moment_.try_emplace(name, g.rows(), g.cols());
    auto [v_it, v_new] = second_moment_.try_emplace(name, g.rows(), g.cols());
    Tensor& m = m_it->second;
    Tensor& v = v_it->second;
    for (size_t k = 0; k < g.size(); ++k) {
      m[k] = beta1_ * m[k] + (1.0 - beta1_) * g[k];
      v[k] = beta2_ * v[k] + (1.0 - beta2_) * g[k] * g[k];
      p[k] -= learning_rate_ * (m[k] / correction1) /
              (std::sqrt(v[k] / correction2) + epsilon_);
    }
  }
}

double ClipGlobalNorm(Gradients& grads, double max_norm) {
  double sq = 0.0;
  for (const auto& [name, g] : grads) {
    for (double v : g.data()) sq += v * v;
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& [name, g] : grads) {
      for (double& v : g.data()) v *= scale;
    }
  }
  return norm;
}

void TrainConfig::Validate() const {
  if (epochs < 0) throw InputError("epochs must be non-negative");
  if (!(learning_rate > 0.0)) throw InputError("learning_rate must be positive");
  if (batch_size < 1 || threads < 1) throw InputError("batch_size and threads must be >= 1");
  inference.Validate();
}

std::string EpochLogToJson(const EpochLog& log) {
  nlohmann::json j = {{"epoch", log.epoch},
                      {"train_loss", log.train_loss},
                      {"dev_avg_f1", log.dev_avg_f1},
                      {"pruned_gold_fallbacks", log.pruned_fallbacks}};
  return j.dump();
}

DocumentGradient ComputeDocumentGradient(const Model& model, const Document& doc,
                                         const InferenceConfig& config) {
  Tape tape;
  ForwardGraph graph = BuildForward(tape, model, doc, config);
  DocumentGradient out;
  if (graph.empty()) return out;
  GoldAntecedentSets gold =
      GoldAntecedents(graph.beam_spans, doc.gold_clusters, graph.antecedents);
  out.pruned_fallbacks = gold.pruned_fallbacks;
  Var loss = MarginalNllLoss(tape, graph.distributions.back(), graph.slot_offsets, gold);
  out.loss = tape.value(loss).scalar();
  tape.Backward(loss);
  out.grads = tape.ParamGradients();
  return out;
}

double DocumentLoss(const Model& model, const Document& doc, const InferenceConfig& config) {
  Tape tape;
  ForwardGraph graph = BuildForward(tape, model, doc, config);
  if (graph.empty()) return 0.0;
  GoldAntecedentSets gold =
      GoldAntecedents(graph.beam_spans, doc.gold_clusters, graph.antecedents);
  return tape.value(MarginalNllLoss(tape, graph.distributions.back(), graph.slot_offsets,
                                    gold))
      .scalar();
}

MetricReport Evaluate(const Model& model, const std::vector<Document>& docs,
                      const InferenceConfig& config) {
  CorpusEvaluator evaluator;
  for (const Document& doc : docs) {
    evaluator.Add(doc.gold_clusters, RunInference(model, doc, config).clusters);
  }
  return evaluator.Report();
}

TrainResult Train(Model initial, const std::vector<Document>& train,
                  const std::vector<Document>& dev, const TrainConfig& config,
                  const std::function<void(const EpochLog&)>& on_epoch) {
  config.Validate();
  if (train.empty()) throw InputError("training corpus is empty");
  TrainResult result;
  result.model = std::move(initial);
  Model& model = result.model;
  AdamOptimizer adam(config.learning_rate, config.beta1, config.beta2, config.adam_epsilon);
  std::mt19937_64 rng(config.seed);
  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  const std::vector<Document>& eval_docs = dev.empty() ? train : dev;

  for (int32_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const ParamStore last_good = model.params();
    for (size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng() % k]);

    EpochLog log;
    log.epoch = epoch;
    double total_loss = 0.0;
    bool diverged = false;
    for (size_t begin = 0; begin < order.size() && !diverged; begin += config.batch_size) {
      const size_t end = std::min(order.size(), begin + config.batch_size);
      std::vector<DocumentGradient> parts(end - begin);
      std::vector<std::string> errors(parts.size());
      auto work = [&](size_t slot) {
        try {
          parts[slot] = ComputeDocumentGradient(model, train[order[begin + slot]],
                                                config.inference);
        } catch (const NumericError& e) {
          errors[slot] = e.what();
        }
      };
      if (config.threads > 1 && parts.size() > 1) {
        std::vector<std::thread> pool;
        const size_t workers = std::min<size_t>(config.threads, parts.size());
        for (size_t w = 0; w < workers; ++w) {
          pool.emplace_back([&, w] {
            for (size_t slot = w; slot < parts.size(); slot += workers) work(slot);
          });
        }
        for (std::thread& t : pool) t.join();
      } else {
        for (size_t slot = 0; slot < parts.size(); ++slot) work(slot);
      }

      Gradients grads = model.params().ZeroGradients();
      for (size_t slot = 0; slot < parts.size(); ++slot) {
        if (!errors[slot].empty() || !std::isfinite(parts[slot].loss)) {
          diverged = true;
          result.message = errors[slot].empty() ? "non-finite loss" : errors[slot];
          break;
        }
        total_loss += parts[slot].loss;
        log.pruned_fallbacks += parts[slot].pruned_fallbacks;
        Accumulate(grads, parts[slot].grads);
      }
      if (diverged) break;
      ClipGlobalNorm(grads, config.clip_norm);
      adam.Step(model.mutable_params(), grads);
    }
    if (diverged) {
      model.mutable_params() = last_good;
      result.diverged = true;
      result.message = "training diverged in epoch " + std::to_string(epoch) + ": " +
                       result.message;
      return result;
    }
    log.train_loss = total_loss / static_cast<double>(train.size());
    log.dev_avg_f1 = Evaluate(model, eval_docs, config.inference).avg_f1;
    if (!config.checkpoint_pattern.empty()) {
      model.Save(CheckpointPath(config.checkpoint_pattern, epoch));
    }
    result.log.push_back(log);
    if (on_epoch) on_epoch(log);
  }
  return result;
}

}  // namespace coref
