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

#ifndef COREF_METRICS_H_
#define COREF_METRICS_H_

#include <string>
#include <vector>

#include "coref/document.h"

namespace coref {

// Numerators and denominators of one metric. Corpus scores add these across
// documents before dividing, as the CoNLL scorer does.
struct MetricCounts {
  double recall_num = 0.0;
  double recall_den = 0.0;
  double precision_num = 0.0;
  double precision_den = 0.0;

  MetricCounts& operator+=(const MetricCounts& other);
};

// Precision and recall are 0 when their denominator is 0; F1 is 0 when
// P + R = 0.
struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

Prf ToPrf(const MetricCounts& counts);

// Link-based: recall = sum_K (|K| - p(K)) / sum_K (|K| - 1), where p(K) counts
// the parts K is split into by the response (unresolved mentions count as
// their own part). Precision swaps key and response.
MetricCounts MucCounts(const std::vector<Cluster>& gold, const std::vector<Cluster>& pred);
// Mention-based: each key mention m scores |K(m) & R(m)| / |K(m)| for recall,
// 0 when m is unresolved; precision swaps roles.
MetricCounts BCubedCounts(const std::vector<Cluster>& gold,
                          const std::vector<Cluster>& pred);
// Entity-based CEAF with phi4(K, R) = 2 |K & R| / (|K| + |R|) under the
// optimal one-to-one alignment of clusters.
MetricCounts CeafeCounts(const std::vector<Cluster>& gold,
                         const std::vector<Cluster>& pred);

inline Prf Muc(const std::vector<Cluster>& gold, const std::vector<Cluster>& pred) {
  return ToPrf(MucCounts(gold, pred));
}
inline Prf BCubed(const std::vector<Cluster>& gold, const std::vector<Cluster>& pred) {
  return ToPrf(BCubedCounts(gold, pred));
}
inline Prf Ceafe(const std::vector<Cluster>& gold, const std::vector<Cluster>& pred) {
  return ToPrf(CeafeCounts(gold, pred));
}

struct MetricReport {
  Prf muc;
  Prf bcub;
  Prf ceafe;
  double avg_f1 = 0.0;
};

// Arithmetic mean of the three F1 values.
double AvgF1(const Prf& muc, const Prf& bcub, const Prf& ceafe);

// Accumulates documents and reports corpus-level scores.
class CorpusEvaluator {
 public:
  void Add(const std::vector<Cluster>& gold, const std::vector<Cluster>& pred);
  MetricReport Report() const;

 private:
  MetricCounts muc_, bcub_, ceafe_;
};

// {"muc": {"p", "r", "f1"}, "bcub": {...}, "ceafe": {...}, "avg_f1": float}
std::string MetricReportToJson(const MetricReport& report);

}  // namespace coref

#endif  // COREF_METRICS_H_
