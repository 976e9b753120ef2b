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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "coref/cli.h"
#include "coref/commands.h"
#include "coref/corpus_io.h"
#include "coref/spans.h"
#include "test_util.h"

namespace coref {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void Spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("coref_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  static CliResult Run(std::vector<std::string> args) {
    args.insert(args.begin(), "coref");
    std::ostringstream out, err;
    const int code = RunCli(args, out, err);
    return {code, out.str(), err.str()};
  }

  // Small corpus plus a briefly trained checkpoint.
  void MakeCorpusAndCheckpoint(int32_t docs = 4, int32_t epochs = 1) {
    ASSERT_EQ(Run({"generate", "--out", Path("corpus.jsonl"), "--set",
                   "synthetic_documents=" + std::to_string(docs), "--set",
                   "synthetic_entities=3", "--set", "synthetic_mentions_per_entity=3"})
                  .code,
              0);
    CliResult r = Run({"train", "--train", Path("corpus.jsonl"), "--out", Path("model.ckpt"),
                       "--epochs", std::to_string(epochs), "--set", "hidden_dim=3", "--set",
                       "token_dim=4", "--set", "max_span_width=3"});
    ASSERT_EQ(r.code, 0) << r.err;
  }

  fs::path dir_;
};

TEST_F(CliTest, MissingCorpusExitsTwoAndNamesPath) {
  CliResult r = Run({"train", "--train", Path("nope.jsonl"), "--out", Path("m.ckpt")});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("nope.jsonl"), std::string::npos);
  EXPECT_EQ(Run({"train"}).code, kExitInput);
  EXPECT_EQ(Run({"frobnicate"}).code, kExitInput);
  EXPECT_EQ(Run({"predict", "--checkpoint", Path("x"), "--input", Path("y"), "--output",
                 Path("z"), "--mode", "fastest"})
                .code,
            kExitInput);
}

TEST_F(CliTest, ZeroEpochsWritesInitialCheckpoint) {
  ASSERT_EQ(Run({"generate", "--out", Path("c.jsonl"), "--set", "synthetic_documents=2"}).code, 0);
  CliResult r = Run({"train", "--train", Path("c.jsonl"), "--out", Path("m.ckpt"), "--epochs",
                     "0", "--seed", "3"});
  EXPECT_EQ(r.code, 0) << r.err;
  ASSERT_TRUE(fs::exists(Path("m.ckpt")));
  Model loaded = Model::Load(Path("m.ckpt"));
  Model expected = Model::Initialize(loaded.config(), loaded.vocabulary(), 3);
  EXPECT_EQ(loaded.params().tensors(), expected.params().tensors());
}

TEST_F(CliTest, ConfigPrecedence) {
  ASSERT_EQ(Run({"generate", "--out", Path("c.jsonl"), "--set", "synthetic_documents=1"}).code, 0);
  Spit(Path("run.cfg"), "# comment\nhidden_dim = 3\ntoken_dim = 5\nepochs = 7\n");
  CliResult r = Run({"train", "--train", Path("c.jsonl"), "--out", Path("m.ckpt"), "--config",
                     Path("run.cfg"), "--set", "hidden_dim=4", "--set", "epochs=9", "--epochs",
                     "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());  // epochs 0 from the flag: no epoch lines
  const ModelConfig c = Model::Load(Path("m.ckpt")).config();
  EXPECT_EQ(c.encoder.token_dim, 5);
  EXPECT_EQ(c.encoder.hidden_dim, 4);

  Spit(Path("bad.cfg"), "hidden_dim = three\n");
  EXPECT_EQ(Run({"train", "--train", Path("c.jsonl"), "--out", Path("m2.ckpt"), "--config",
                 Path("bad.cfg")})
                .code,
            kExitInput);
  EXPECT_EQ(Run({"train", "--train", Path("c.jsonl"), "--out", Path("m2.ckpt"), "--set",
                 "no_such_key=1"})
                .code,
            kExitInput);
}

TEST_F(CliTest, CheckpointMismatchAndCorruptionExitThree) {
  MakeCorpusAndCheckpoint();
  CliResult r = Run({"predict", "--checkpoint", Path("model.ckpt"), "--input",
                     Path("corpus.jsonl"), "--output", Path("p.jsonl"), "--set", "hidden_dim=7"});
  EXPECT_EQ(r.code, kExitCheckpoint);
  EXPECT_NE(r.err.find("hidden_dim"), std::string::npos);
  Spit(Path("broken.ckpt"), "coref-params 1\ntensor w 2 2\n0x1p+0\n");
  EXPECT_EQ(Run({"predict", "--checkpoint", Path("broken.ckpt"), "--input", Path("corpus.jsonl"),
                 "--output", Path("p.jsonl")})
                .code,
            kExitCheckpoint);
}

TEST_F(CliTest, PredictIsDeterministicAndEmptyInputIsEmpty) {
  MakeCorpusAndCheckpoint();
  for (const char* name : {"a.jsonl", "b.jsonl"}) {
    ASSERT_EQ(Run({"predict", "--checkpoint", Path("model.ckpt"), "--input", Path("corpus.jsonl"),
                   "--output", Path(name), "--cost-report", Path(std::string(name) + ".cost")})
                  .code,
              0);
  }
  EXPECT_EQ(Slurp(Path("a.jsonl")), Slurp(Path("b.jsonl")));
  EXPECT_FALSE(Slurp(Path("a.jsonl")).empty());

  Spit(Path("empty.jsonl"), "");
  CliResult r = Run({"predict", "--checkpoint", Path("model.ckpt"), "--input", Path("empty.jsonl"),
                     "--output", Path("e.jsonl")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Slurp(Path("e.jsonl")), "");
  const json cost = json::parse(r.out);
  EXPECT_EQ(cost["sa_evals"], 0);
  EXPECT_EQ(cost["sc_pairs"], 0);
}

TEST_F(CliTest, CostReportMatchesAnalyticCounts) {
  MakeCorpusAndCheckpoint(5);
  const ModelConfig mc = Model::Load(Path("model.ckpt")).config();
  const auto docs = LoadDocuments(Path("corpus.jsonl"));
  for (const char* mode : {"heuristic", "coarse_to_fine", "coarse_only"}) {
    for (int n : {1, 2}) {
      for (int k : {2, 6}) {
        CliResult r = Run({"predict", "--checkpoint", Path("model.ckpt"), "--input",
                           Path("corpus.jsonl"), "--output", Path("p.jsonl"), "--mode", mode,
                           "--iterations", std::to_string(n), "-K", std::to_string(k)});
        ASSERT_EQ(r.code, 0) << r.err;
        int64_t sa = 0, sc = 0;
        for (const Document& doc : docs) {
          const int64_t cands =
              static_cast<int64_t>(CandidateSpans(doc, mc.max_span_width).size());
          const int64_t m = std::min<int64_t>(
              cands, static_cast<int64_t>(std::ceil(0.4 * doc.num_tokens())));
          for (int64_t i = 0; i < m; ++i) sa += n * std::min<int64_t>(k, i);
          sc += n * m * m;
        }
        const std::string m(mode);
        const json cost = json::parse(r.out);
        EXPECT_EQ(cost["sa_evals"].get<int64_t>(), m == "coarse_only" ? 0 : sa) << m;
        EXPECT_EQ(cost["sc_pairs"].get<int64_t>(), m == "heuristic" ? 0 : sc) << m;
        EXPECT_GE(cost["wall_ms"].get<double>(), 0.0);
      }
    }
  }
}

std::string DocLine(const std::string& key, const json& clusters, const char* field = "clusters") {
  json doc = {{"doc_key", key},
              {"sentences", {{"a", "b", "c", "d"}}},
              {"speakers", {{0, 0, 0, 0}}},
              {"clusters", json::array()}};
  doc[field] = clusters;
  return doc.dump() + "\n";
}

TEST_F(CliTest, EvaluateExamples) {
  const json g1 = {{{0, 0}, {1, 1}, {2, 2}}};
  const json g2 = {{{0, 0}, {1, 1}}, {{2, 2}, {3, 3}}};
  Spit(Path("gold.jsonl"), DocLine("d1", g1) + DocLine("d2", g2));
  CliResult same = Run({"evaluate", "--gold", Path("gold.jsonl"), "--pred", Path("gold.jsonl")});
  ASSERT_EQ(same.code, 0) << same.err;
  EXPECT_EQ(json::parse(same.out)["avg_f1"].get<double>(), 1.0);

  Spit(Path("none.jsonl"), DocLine("d1", json::array(), "predicted_clusters") +
                               DocLine("d2", json::array(), "predicted_clusters"));
  CliResult none = Run({"evaluate", "--gold", Path("gold.jsonl"), "--pred", Path("none.jsonl")});
  ASSERT_EQ(none.code, 0) << none.err;
  EXPECT_EQ(json::parse(none.out)["avg_f1"].get<double>(), 0.0);

  // d1 predicts {0,1},{2}; d2 predicts everything merged.
  const json p1 = {{{0, 0}, {1, 1}}};
  const json p2 = {{{0, 0}, {1, 1}, {2, 2}, {3, 3}}};
  Spit(Path("pred.jsonl"), DocLine("d2", p2, "predicted_clusters") +
                               DocLine("d1", p1, "predicted_clusters"));
  CliResult mixed = Run({"evaluate", "--gold", Path("gold.jsonl"), "--pred", Path("pred.jsonl"),
                         "--output", Path("report.json")});
  ASSERT_EQ(mixed.code, 0) << mixed.err;
  const json report = json::parse(Slurp(Path("report.json")));
  // MUC: recall (1 + 2) / (2 + 2), precision (1 + 2) / (1 + 3).
  EXPECT_NEAR(report["muc"]["r"].get<double>(), 0.75, 1e-12);
  EXPECT_NEAR(report["muc"]["p"].get<double>(), 0.75, 1e-12);
  // B3 recall: d1 (2/3 + 2/3 + 0) + d2 (1 * 4), over 7 mentions.
  EXPECT_NEAR(report["bcub"]["r"].get<double>(), (4.0 / 3.0 + 4.0) / 7.0, 1e-12);
  // B3 precision: d1 (1 + 1) + d2 (4 * 1/2), over 6 mentions.
  EXPECT_NEAR(report["bcub"]["p"].get<double>(), 4.0 / 6.0, 1e-12);
  // CEAF: d1 phi 4/5 over 1 gold, 1 pred; d2 phi 2/3 over 2 gold, 1 pred.
  EXPECT_NEAR(report["ceafe"]["r"].get<double>(), (0.8 + 2.0 / 3.0) / 3.0, 1e-12);
  EXPECT_NEAR(report["ceafe"]["p"].get<double>(), (0.8 + 2.0 / 3.0) / 2.0, 1e-12);
}

TEST_F(CliTest, EvaluateMisalignedKeysExitsFour) {
  Spit(Path("gold.jsonl"), DocLine("d1", json::array()) + DocLine("d2", json::array()));
  Spit(Path("pred.jsonl"), DocLine("d1", json::array()) + DocLine("d9", json::array()));
  CliResult r = Run({"evaluate", "--gold", Path("gold.jsonl"), "--pred", Path("pred.jsonl")});
  EXPECT_EQ(r.code, kExitAlignment);
  EXPECT_NE(r.err.find("d2"), std::string::npos);
  EXPECT_NE(r.err.find("d9"), std::string::npos);
}

TEST_F(CliTest, BenchPruningCsvRoundTripAndPlot) {
  MakeCorpusAndCheckpoint();
  CliResult r = Run({"bench-pruning", "--heuristic", Path("model.ckpt"), "--coarse-to-fine",
                     Path("model.ckpt"), "--dev", Path("corpus.jsonl"), "--k-values", "1,1000",
                     "--csv", Path("p.csv"), "--plot", Path("p.svg")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = Slurp(Path("p.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "mode,K,avg_f1");
  const std::vector<PruningRow> rows = ParsePruningCsv(csv);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(PruningCsv(rows), csv);
  EXPECT_NE(Slurp(Path("p.svg")).find("<svg"), std::string::npos);

  // No pruning pressure: both modes equal their unpruned scores.
  Model model = Model::Load(Path("model.ckpt"));
  auto docs = LoadDocuments(Path("corpus.jsonl"));
  for (const PruningRow& row : rows) {
    if (row.k != 1000) continue;
    InferenceConfig unpruned;
    unpruned.mode = ParseMode(row.mode);
    unpruned.prune_antecedents = false;
    CorpusEvaluator e;
    for (Document& doc : docs) e.Add(doc.gold_clusters, RunInference(model, doc, unpruned).clusters);
    EXPECT_NEAR(row.avg_f1, e.Report().avg_f1, 1e-9) << row.mode;
  }
  CliResult single = Run({"bench-pruning", "--heuristic", Path("model.ckpt"), "--coarse-to-fine",
                          Path("model.ckpt"), "--dev", Path("corpus.jsonl"), "--k-values", "3"});
  ASSERT_EQ(single.code, 0);
  EXPECT_EQ(ParsePruningCsv(single.out).size(), 2u);
}

TEST_F(CliTest, BenchComputeCountArithmetic) {
  MakeCorpusAndCheckpoint();
  CliResult same = Run({"bench-compute", "--checkpoint", Path("model.ckpt"), "--input",
                        Path("corpus.jsonl"), "--k-small", "4", "--k-large", "4"});
  ASSERT_EQ(same.code, 0) << same.err;
  const json a = json::parse(same.out);
  EXPECT_EQ(a["heuristic"]["sa_evals"], a["coarse_to_fine"]["sa_evals"]);

  CliResult halved = Run({"bench-compute", "--checkpoint", Path("model.ckpt"), "--input",
                          Path("corpus.jsonl"), "--k-small", "2", "--k-large", "4", "--output",
                          Path("c.json")});
  ASSERT_EQ(halved.code, 0) << halved.err;
  const json b = json::parse(Slurp(Path("c.json")));
  const int64_t small = b["coarse_to_fine"]["sa_evals"], large = b["heuristic"]["sa_evals"];
  EXPECT_GE(2 * small, large);
  EXPECT_LE(small, large);
  EXPECT_TRUE(b["within_bound"].get<bool>());
  EXPECT_LE(b["sa_ratio"].get<double>(), b["bound"].get<double>() + 1e-12);

  // Every span has at least K predecessors after the first K: halving K
  // exactly halves the count on those spans.
  Model model = Model::Load(Path("model.ckpt"));
  auto docs = LoadDocuments(Path("corpus.jsonl"));
  InferenceConfig base;
  ComputeComparison c = BenchCompute(model, docs, base, 2, 4);
  int64_t long_small = 0, long_large = 0;
  for (const Document& doc : docs) {
    const int64_t m = static_cast<int64_t>(RunInference(model, doc, base).beam_spans.size());
    for (int64_t i = 4; i < m; ++i) {
      long_small += 2 * 2;
      long_large += 2 * 4;
    }
  }
  EXPECT_EQ(2 * long_small, long_large);
  EXPECT_EQ(c.coarse_to_fine.cost.sa_evals, small);
}

TEST_F(CliTest, TrainedRecipeBeatsNoLinkBaseline) {
  ASSERT_EQ(Run({"generate", "--out", Path("train.jsonl"), "--set", "synthetic_documents=20",
                 "--set", "synthetic_seed=1"})
                .code,
            0);
  ASSERT_EQ(Run({"generate", "--out", Path("dev.jsonl"), "--set", "synthetic_documents=5",
                 "--set", "synthetic_seed=2"})
                .code,
            0);
  CliResult r = Run({"train", "--train", Path("train.jsonl"), "--dev", Path("dev.jsonl"), "--out",
                     Path("m.ckpt"), "--epochs", "4", "--learning-rate", "5e-3", "--log",
                     Path("log.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(Slurp(Path("log.jsonl")));
  std::string line, last;
  int count = 0;
  while (std::getline(lines, line)) {
    last = line;
    ++count;
  }
  EXPECT_EQ(count, 4);
  const json epoch = json::parse(last);
  EXPECT_EQ(epoch["epoch"], 4);
  // The majority-class resolver links nothing and scores 0.
  EXPECT_GT(epoch["dev_avg_f1"].get<double>(), 0.0);
  EXPECT_EQ(r.out, Slurp(Path("log.jsonl")));
}

}  // namespace
}  // namespace coref
