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

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "coref/hungarian.h"
#include "coref/metrics.h"
#include "metric_oracle.h"
#include "test_util.h"

namespace coref {
namespace {

using testing::BruteForceAssignment;
using testing::C;
using testing::MetricOracle;
using testing::OracleScores;
using testing::RandomClustering;
using testing::S;

TEST(MucTest, HandExamples) {
  const std::vector<Cluster> gold = {C({0, 1, 2})};
  Prf split = Muc(gold, {C({0, 1}), C({2})});
  EXPECT_DOUBLE_EQ(split.recall, 0.5);
  EXPECT_DOUBLE_EQ(split.precision, 1.0);
  EXPECT_NEAR(split.f1, 2.0 / 3.0, 1e-15);
  Prf none = Muc(gold, {});
  EXPECT_EQ(none.recall, 0.0);
  EXPECT_EQ(none.precision, 0.0);
  EXPECT_EQ(none.f1, 0.0);
  // Merging two gold entities: recall stays 1, precision drops.
  Prf merged = Muc({C({0, 1}), C({2, 3})}, {C({0, 1, 2, 3})});
  EXPECT_DOUBLE_EQ(merged.recall, 1.0);
  EXPECT_NEAR(merged.precision, 2.0 / 3.0, 1e-15);
}

TEST(BCubedTest, HandExamples) {
  Prf singletons = BCubed({C({0, 1})}, {C({0}), C({1})});
  EXPECT_DOUBLE_EQ(singletons.recall, 0.5);
  EXPECT_DOUBLE_EQ(singletons.precision, 1.0);
  // Gold {a,b,c}, pred {a,b},{c}: recall (2/3 + 2/3 + 1/3) / 3 = 5/9.
  Prf split = BCubed({C({0, 1, 2})}, {C({0, 1}), C({2})});
  EXPECT_NEAR(split.recall, 5.0 / 9.0, 1e-15);
  EXPECT_DOUBLE_EQ(split.precision, 1.0);
  // Missing mentions contribute zero recall.
  Prf partial = BCubed({C({0, 1, 2, 3})}, {C({0, 1})});
  EXPECT_NEAR(partial.recall, 0.25, 1e-15);
}

TEST(BCubedTest, PrecisionAndRecallSwapWithRoles) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = RandomClustering(rng, 4, 9), p = RandomClustering(rng, 4, 9);
    EXPECT_DOUBLE_EQ(BCubed(g, p).precision, BCubed(p, g).recall);
    EXPECT_DOUBLE_EQ(Muc(g, p).precision, Muc(p, g).recall);
    EXPECT_DOUBLE_EQ(Ceafe(g, p).precision, Ceafe(p, g).recall);
  }
}

TEST(CeafeTest, HandExamples) {
  // phi4({a,b,c},{a,b}) = 4/5.
  Prf a = Ceafe({C({0, 1, 2})}, {C({0, 1}), C({2})});
  EXPECT_NEAR(a.recall, 0.8, 1e-15);
  EXPECT_NEAR(a.precision, 0.4, 1e-15);
  // Alignment must prefer the pairing with the larger total.
  Prf b = Ceafe({C({0, 1}), C({2, 3})}, {C({0, 1, 2}), C({3})});
  EXPECT_NEAR(b.recall, (0.8 + 2.0 / 3.0) / 2.0, 1e-15);
}

TEST(MetricsTest, IdentityScoresOneAndDisjointScoresZero) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = RandomClustering(rng, 5, 12);
    MetricReport same = [&] {
      CorpusEvaluator e;
      e.Add(g, g);
      return e.Report();
    }();
    EXPECT_EQ(same.bcub.f1, 1.0);
    EXPECT_EQ(same.ceafe.f1, 1.0);
    bool has_link = false;
    for (const Cluster& c : g) has_link |= c.size() > 1;
    if (has_link) {
      EXPECT_EQ(same.muc.f1, 1.0);
      EXPECT_EQ(same.avg_f1, 1.0);
    }
    std::vector<Cluster> shifted = g;
    for (Cluster& c : shifted) {
      for (Span& s : c) s = S(s.start + 100);
    }
    EXPECT_EQ(Muc(g, shifted).f1, 0.0);
    EXPECT_EQ(BCubed(g, shifted).f1, 0.0);
    EXPECT_EQ(Ceafe(g, shifted).f1, 0.0);
  }
}

TEST(MetricsTest, InvariantToClusterAndMentionOrder) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = RandomClustering(rng, 5, 10), p = RandomClustering(rng, 5, 10);
    auto g2 = g, p2 = p;
    std::shuffle(g2.begin(), g2.end(), rng);
    std::shuffle(p2.begin(), p2.end(), rng);
    for (Cluster& c : g2) std::shuffle(c.begin(), c.end(), rng);
    for (Cluster& c : p2) std::shuffle(c.begin(), c.end(), rng);
    for (auto metric : {Muc, BCubed, Ceafe}) {
      Prf a = metric(g, p), b = metric(g2, p2);
      EXPECT_NEAR(a.precision, b.precision, 1e-14);
      EXPECT_NEAR(a.recall, b.recall, 1e-14);
    }
  }
}

TEST(MetricsTest, MatchDefinitionsOn200RandomCases) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = RandomClustering(rng, 6, 14), p = RandomClustering(rng, 6, 14);
    ASSERT_LE(g.size(), 6u);
    ASSERT_LE(p.size(), 6u);
    OracleScores o = MetricOracle(g, p);
    EXPECT_NEAR(Muc(g, p).recall, o.muc_r, 1e-12);
    EXPECT_NEAR(Muc(g, p).precision, o.muc_p, 1e-12);
    EXPECT_NEAR(BCubed(g, p).recall, o.b3_r, 1e-12);
    EXPECT_NEAR(BCubed(g, p).precision, o.b3_p, 1e-12);
    EXPECT_NEAR(Ceafe(g, p).recall, o.ceaf_r, 1e-12);
    EXPECT_NEAR(Ceafe(g, p).precision, o.ceaf_p, 1e-12);
    for (auto metric : {Muc, BCubed, Ceafe}) {
      Prf r = metric(g, p);
      for (double v : {r.precision, r.recall, r.f1}) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
      const double hm = r.precision + r.recall == 0.0
                            ? 0.0
                            : 2 * r.precision * r.recall / (r.precision + r.recall);
      EXPECT_NEAR(r.f1, hm, 1e-15);
    }
  }
}

TEST(HungarianTest, MatchesPermutationBruteForce) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const size_t rows = 1 + rng() % 6, cols = 1 + rng() % 6;
    std::vector<std::vector<double>> w(rows, std::vector<double>(cols));
    for (auto& row : w) {
      for (double& v : row) v = (trial % 3 == 0) ? static_cast<double>(rng() % 3) : UniformUnit(rng);
    }
    std::vector<int> a = MaxWeightAssignment(w);
    ASSERT_EQ(a.size(), rows);
    std::set<int> used;
    int matched = 0;
    for (int c : a) {
      if (c < 0) continue;
      ++matched;
      EXPECT_TRUE(used.insert(c).second);
      EXPECT_LT(c, static_cast<int>(cols));
    }
    EXPECT_EQ(matched, static_cast<int>(std::min(rows, cols)));
    EXPECT_NEAR(AssignmentValue(w, a), BruteForceAssignment(w), 1e-12);
  }
}

TEST(CorpusEvaluatorTest, AggregatesCountsBeforeDividing) {
  CorpusEvaluator e;
  e.Add({C({0, 1, 2})}, {C({0, 1}), C({2})});  // MUC recall 1/2
  e.Add({C({0, 1})}, {C({0, 1})});              // MUC recall 1/1
  MetricReport r = e.Report();
  EXPECT_NEAR(r.muc.recall, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.avg_f1, (r.muc.f1 + r.bcub.f1 + r.ceafe.f1) / 3.0, 1e-15);
  EXPECT_EQ(CorpusEvaluator().Report().avg_f1, 0.0);
}

TEST(AvgF1Test, Examples) {
  auto prf = [](double f1) { return Prf{f1, f1, f1}; };
  EXPECT_EQ(AvgF1(prf(1), prf(1), prf(1)), 1.0);
  EXPECT_EQ(AvgF1(prf(0), prf(0), prf(0)), 0.0);
  // Rounds to 73.0 at one decimal in percent.
  const double avg = AvgF1(prf(0.804), prf(0.708), prf(0.676));
  EXPECT_NEAR(avg, 0.7293333333333333, 1e-12);
  EXPECT_NEAR(avg, 0.730, 1e-3);
}

TEST(MetricReportTest, JsonHasExpectedKeys) {
  CorpusEvaluator e;
  e.Add({C({0, 1})}, {C({0, 1})});
  const std::string json = MetricReportToJson(e.Report());
  for (const char* key : {"\"muc\"", "\"bcub\"", "\"ceafe\"", "\"avg_f1\"", "\"p\"", "\"r\"",
                          "\"f1\""}) {
    EXPECT_NE(json.find(key), std::string::npos) << key;
  }
}

}  // namespace
}  // namespace coref
