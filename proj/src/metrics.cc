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

#include "coref/metrics.h"

#include <map>
#include <set>

#include "coref/hungarian.h"
#include "json.hpp"

namespace coref {
namespace {

// Cluster index of every mention.
std::map<Span, size_t> MentionToCluster(const std::vector<Cluster>& clusters) {
  std::map<Span, size_t> index;
  for (size_t c = 0; c < clusters.size(); ++c) {
    for (const Span& s : clusters[c]) index.emplace(s, c);
  }
  return index;
}

size_t Overlap(const Cluster& a, const Cluster& b) {
  const std::set<Span> in_b(b.begin(), b.end());
  size_t n = 0;
  for (const Span& s : std::set<Span>(a.begin(), a.end())) n += in_b.count(s);
  return n;
}

// Recall direction of MUC: key clusters partitioned by the response.
void MucOneSide(const std::vector<Cluster>& key, const std::vector<Cluster>& response,
                double& num, double& den) {
  const auto response_of = MentionToCluster(response);
  for (const Cluster& k : key) {
    const std::set<Span> mentions(k.begin(), k.end());
    std::set<size_t> parts;
    size_t unresolved = 0;
    for (const Span& s : mentions) {
      auto it = response_of.find(s);
      if (it == response_of.end()) {
        ++unresolved;
      } else {
        parts.insert(it->second);
      }
    }
    const double size = static_cast<double>(mentions.size());
    num += size - static_cast<double>(parts.size() + unresolved);
    den += size - 1.0;
  }
}

void BCubedOneSide(const std::vector<Cluster>& key, const std::vector<Cluster>& response,
                   double& num, double& den) {
  const auto response_of = MentionToCluster(response);
  for (const Cluster& k : key) {
    const std::set<Span> mentions(k.begin(), k.end());
    for (const Span& s : mentions) {
      den += 1.0;
      auto it = response_of.find(s);
      if (it == response_of.end()) continue;
      num += static_cast<double>(Overlap(k, response[it->second])) /
             static_cast<double>(mentions.size());
    }
  }
}

double Phi4(const Cluster& a, const Cluster& b) {
  const double size_a = static_cast<double>(std::set<Span>(a.begin(), a.end()).size());
  const double size_b = static_cast<double>(std::set<Span>(b.begin(), b.end()).size());
  return 2.0 * static_cast<double>(Overlap(a, b)) / (size_a + size_b);
}

}  // namespace

MetricCounts& MetricCounts::operator+=(const MetricCounts& other) {
  recall_num += other.recall_num;
  recall_den += other.recall_den;
  precision_num += other.precision_num;
  precision_den += other.precision_den;
  return *this;
}

Prf ToPrf(const MetricCounts& c) {
  Prf out;
  out.recall = c.recall_den > 0.0 ? c.recall_num / c.recall_den : 0.0;
  out.precision = c.precision_den > 0.0 ? c.precision_num / c.precision_den : 0.0;
  const double sum = out.precision + out.recall;
  out.f1 = sum > 0.0 ? 2.0 * out.precision * out.recall / sum : 0.0;
  return out;
}

MetricCounts MucCounts(const std::vector<Cluster>& gold, const std::vector<Cluster>& pred) {
  MetricCounts c;
  MucOneSide(gold, pred, c.recall_num, c.recall_den);
  MucOneSide(pred, gold, c.precision_num, c.precision_den);
  return c;
}

MetricCounts BCubedCounts(const std::vector<Cluster>& gold,
                          const std::vector<Cluster>& pred) {
  MetricCounts c;
  BCubedOneSide(gold, pred, c.recall_num, c.recall_den);
  BCubedOneSide(pred, gold, c.precision_num, c.precision_den);
  return c;
}

MetricCounts CeafeCounts(const std::vector<Cluster>& gold,
                         const std::vector<Cluster>& pred) {
  std::vector<std::vector<double>> similarity(gold.size(),
                                              std::vector<double>(pred.size(), 0.0));
  for (size_t i = 0; i < gold.size(); ++i) {
    for (size_t j = 0; j < pred.size(); ++j) similarity[i][j] = Phi4(gold[i], pred[j]);
  }
  const double total = AssignmentValue(similarity, MaxWeightAssignment(similarity));
  MetricCounts c;
  c.recall_num = total;
  c.precision_num = total;
  c.recall_den = static_cast<double>(gold.size());
  c.precision_den = static_cast<double>(pred.size());
  return c;
}

double AvgF1(const Prf& muc, const Prf& bcub, const Prf& ceafe) {
  return (muc.f1 + bcub.f1 + ceafe.f1) / 3.0;
}

void CorpusEvaluator::Add(const std::vector<Cluster>& gold,
                          const std::vector<Cluster>& pred) {
  muc_ += MucCounts(gold, pred);
  bcub_ += BCubedCounts(gold, pred);
  ceafe_ += CeafeCounts(gold, pred);
}

MetricReport CorpusEvaluator::Report() const {
  MetricReport r;
  r.muc = ToPrf(muc_);
  r.bcub = ToPrf(bcub_);
  r.ceafe = ToPrf(ceafe_);
  r.avg_f1 = AvgF1(r.muc, r.bcub, r.ceafe);
  return r;
}

std::string MetricReportToJson(const MetricReport& report) {
  auto prf = [](const Prf& p) {
    return nlohmann::json{{"p", p.precision}, {"r", p.recall}, {"f1", p.f1}};
  };
  nlohmann::json j = {{"muc", prf(report.muc)},
                      {"bcub", prf(report.bcub)},
                      {"ceafe", prf(report.ceafe)},
                      {"avg_f1", report.avg_f1}};
  return j.dump();
}

}  // namespace coref
