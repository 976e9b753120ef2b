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

#include "coref/cli.h"

#include <charconv>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "coref/commands.h"
#include "coref/corpus_io.h"
#include "coref/embeddings.h"
#include "coref/errors.h"

namespace coref {
namespace {

// Options shared by every subcommand that reads a RunConfig.
struct ConfigFlags {
  std::string config_file;
  std::vector<std::string> overrides;
  std::optional<int32_t> epochs;
  std::optional<uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<int32_t> iterations;
  std::optional<int32_t> max_antecedents;
  std::optional<double> learning_rate;

  void Register(CLI::App* app, bool training) {
    app->add_option("--config", config_file, "Flat key = value config file");
    app->add_option("--set", overrides, "Override a config key (key=value); repeatable");
    app->add_option("--mode", mode, "heuristic, coarse_to_fine or coarse_only");
    app->add_option("--iterations", iterations, "Inference iterations N");
    app->add_option("-K,--max-antecedents", max_antecedents, "Antecedents kept per span");
    if (training) {
      app->add_option("--epochs", epochs, "Training epochs");
      app->add_option("--seed", seed, "Random seed");
      app->add_option("--learning-rate", learning_rate, "Learning rate");
    } else {
      app->add_option("--seed", seed, "Random seed");
    }
  }

  // Defaults, then the file, then --set, then the dedicated flags.
  RunConfig Resolve() const {
    RunConfig config;
    if (!config_file.empty()) ApplyConfigFile(config, config_file);
    for (const std::string& o : overrides) ApplyOverride(config, o);
    if (epochs) config.Set("epochs", std::to_string(*epochs));
    if (seed) config.Set("seed", std::to_string(*seed));
    if (mode) config.Set("mode", *mode);
    if (iterations) config.Set("iterations", std::to_string(*iterations));
    if (max_antecedents) config.Set("max_antecedents", std::to_string(*max_antecedents));
    if (learning_rate) {
      std::ostringstream s;
      s.precision(17);
      s << *learning_rate;
      config.Set("learning_rate", s.str());
    }
    return config;
  }
};

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("failed writing " + path);
}

std::vector<int32_t> ParseKList(const std::string& list) {
  std::vector<int32_t> ks;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    int32_t k = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), k);
    if (ec != std::errc() || ptr != item.data() + item.size() || k < 1) {
      throw InputError("bad K value '" + item + "' in list '" + list + "'");
    }
    ks.push_back(k);
  }
  if (ks.empty()) throw InputError("empty K list");
  return ks;
}

Model LoadCheckpoint(const std::string& path, const RunConfig& config) {
  Model model = Model::Load(path);
  CheckModelCompatible(config, model.config());
  return model;
}

void MaybeAttachEmbeddings(const std::string& path, const Model& model,
                           std::vector<Document>& docs) {
  if (!model.config().fixed_embeddings) return;
  if (path.empty()) throw InputError("model uses fixed embeddings; pass --embeddings");
  EmbeddingTable table = EmbeddingTable::Load(path, model.config().encoder.token_dim);
  for (Document& doc : docs) AttachEmbeddings(table, doc);
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Span-ranking coreference resolver"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  // generate
  CLI::App* generate = app.add_subcommand("generate", "Write a synthetic corpus");
  ConfigFlags generate_flags;
  std::string generate_out;
  generate->add_option("--out", generate_out, "Output jsonlines")->required();
  generate_flags.Register(generate, false);

  // train
  CLI::App* train = app.add_subcommand("train", "Train a model");
  ConfigFlags train_flags;
  std::string train_path, dev_path, train_out, log_path, train_embeddings;
  train->add_option("--train", train_path, "Training corpus (jsonlines)")->required();
  train->add_option("--dev", dev_path, "Dev corpus; defaults to the training corpus");
  train->add_option("--out", train_out, "Checkpoint to write")->required();
  train->add_option("--log", log_path, "Also write the epoch log here");
  train->add_option("--embeddings", train_embeddings, "Fixed word vectors (word v1 v2 ...)");
  train_flags.Register(train, true);

  // predict
  CLI::App* predict = app.add_subcommand("predict", "Predict clusters");
  ConfigFlags predict_flags;
  std::string predict_ckpt, predict_in, predict_out, cost_path, predict_embeddings;
  predict->add_option("--checkpoint", predict_ckpt, "Model checkpoint")->required();
  predict->add_option("--input", predict_in, "Input corpus (jsonlines)")->required();
  predict->add_option("--output", predict_out, "Predictions (jsonlines)")->required();
  predict->add_option("--cost-report", cost_path, "Cost report JSON; stdout if omitted");
  predict->add_option("--embeddings", predict_embeddings, "Fixed word vectors");
  predict_flags.Register(predict, false);

  // evaluate
  CLI::App* evaluate = app.add_subcommand("evaluate", "Score predictions against gold");
  std::string gold_path, pred_path, eval_out;
  evaluate->add_option("--gold", gold_path, "Gold corpus")->required();
  evaluate->add_option("--pred", pred_path, "Predicted corpus")->required();
  evaluate->add_option("--output", eval_out, "Report JSON; stdout if omitted");

  // bench-pruning
  CLI::App* bench_pruning =
      app.add_subcommand("bench-pruning", "Average F1 against K for both pruning modes");
  ConfigFlags pruning_flags;
  std::string heuristic_ckpt, c2f_ckpt, pruning_dev, k_list = "5,10,25,50", csv_path,
                                                     plot_path, pruning_embeddings;
  bench_pruning->add_option("--heuristic", heuristic_ckpt, "Heuristic-trained checkpoint")
      ->required();
  bench_pruning->add_option("--coarse-to-fine", c2f_ckpt, "Coarse-to-fine checkpoint")
      ->required();
  bench_pruning->add_option("--dev", pruning_dev, "Dev corpus")->required();
  bench_pruning->add_option("--k-values", k_list, "Comma separated K values");
  bench_pruning->add_option("--csv", csv_path, "CSV output; stdout if omitted");
  bench_pruning->add_option("--plot", plot_path, "SVG plot output");
  bench_pruning->add_option("--embeddings", pruning_embeddings, "Fixed word vectors");
  pruning_flags.Register(bench_pruning, false);

  // bench-compute
  CLI::App* bench_compute =
      app.add_subcommand("bench-compute", "Antecedent scoring cost of both pruning modes");
  ConfigFlags compute_flags;
  std::string compute_ckpt, compute_in, compute_out, compute_embeddings;
  int32_t k_small = 50, k_large = 250;
  bench_compute->add_option("--checkpoint", compute_ckpt, "Model checkpoint")->required();
  bench_compute->add_option("--input", compute_in, "Corpus")->required();
  bench_compute->add_option("--k-small", k_small, "Coarse-to-fine K");
  bench_compute->add_option("--k-large", k_large, "Heuristic K");
  bench_compute->add_option("--output", compute_out, "Report JSON; stdout if omitted");
  bench_compute->add_option("--embeddings", compute_embeddings, "Fixed word vectors");
  compute_flags.Register(bench_compute, false);

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*generate) {
      RunConfig config = generate_flags.Resolve();
      if (generate_flags.seed) config.Set("synthetic_seed", std::to_string(*generate_flags.seed));
      SaveDocuments(generate_out, GenerateSynthetic(config.synthetic));
      return kExitOk;
    }

    if (*train) {
      RunConfig config = train_flags.Resolve();
      std::vector<Document> train_docs = LoadDocuments(train_path);
      std::vector<Document> dev_docs;
      if (!dev_path.empty()) dev_docs = LoadDocuments(dev_path);
      if (!train_embeddings.empty()) {
        config.model.fixed_embeddings = true;
        EmbeddingTable table =
            EmbeddingTable::Load(train_embeddings, config.model.encoder.token_dim);
        for (Document& doc : train_docs) AttachEmbeddings(table, doc);
        for (Document& doc : dev_docs) AttachEmbeddings(table, doc);
      }
      config.model.Validate();
      config.train.inference = config.inference;
      config.train.Validate();
      Model initial =
          Model::Initialize(config.model, BuildVocabulary(train_docs), config.train.seed);
      std::unique_ptr<std::ofstream> log;
      if (!log_path.empty()) {
        log = std::make_unique<std::ofstream>(log_path);
        if (!*log) throw InputError("cannot write " + log_path);
      }
      if (config.train.epochs == 0) {
        initial.Save(train_out);
        return kExitOk;
      }
      TrainResult result =
          Train(std::move(initial), train_docs, dev_docs, config.train, [&](const EpochLog& e) {
            const std::string line = EpochLogToJson(e);
            out << line << "\n" << std::flush;
            if (log) *log << line << "\n" << std::flush;
          });
      result.model.Save(train_out);
      if (result.diverged) {
        err << "error: " << result.message << "; wrote last good parameters to "
            << train_out << "\n";
        return kExitFailure;
      }
      return kExitOk;
    }

    if (*predict) {
      RunConfig config = predict_flags.Resolve();
      Model model = LoadCheckpoint(predict_ckpt, config);
      std::vector<Document> docs = LoadDocuments(predict_in);
      MaybeAttachEmbeddings(predict_embeddings, model, docs);
      const CostReport cost = Predict(model, docs, config.inference);
      for (Document& doc : docs) doc.embeddings.reset();
      SaveDocuments(predict_out, docs);
      const std::string report = CostReportToJson(cost);
      if (cost_path.empty()) {
        out << report << "\n";
      } else {
        WriteText(cost_path, report + "\n");
      }
      return kExitOk;
    }

    if (*evaluate) {
      const std::string report = MetricReportToJson(
          EvaluateFiles(LoadDocuments(gold_path), LoadDocuments(pred_path)));
      if (eval_out.empty()) {
        out << report << "\n";
      } else {
        WriteText(eval_out, report + "\n");
      }
      return kExitOk;
    }

    if (*bench_pruning) {
      RunConfig config = pruning_flags.Resolve();
      Model heuristic = LoadCheckpoint(heuristic_ckpt, config);
      Model c2f = LoadCheckpoint(c2f_ckpt, config);
      std::vector<Document> docs = LoadDocuments(pruning_dev);
      std::vector<Document> c2f_docs = docs;
      MaybeAttachEmbeddings(pruning_embeddings, heuristic, docs);
      MaybeAttachEmbeddings(pruning_embeddings, c2f, c2f_docs);
      const std::vector<int32_t> ks = ParseKList(k_list);
      std::vector<PruningRow> rows =
          BenchPruning({{Mode::kHeuristic, &heuristic}}, docs, config.inference, ks);
      for (const PruningRow& row :
           BenchPruning({{Mode::kCoarseToFine, &c2f}}, c2f_docs, config.inference, ks)) {
        rows.push_back(row);
      }
      const std::string csv = PruningCsv(rows);
      if (csv_path.empty()) {
        out << csv;
      } else {
        WriteText(csv_path, csv);
      }
      if (!plot_path.empty()) WriteText(plot_path, PruningSvg(rows));
      return kExitOk;
    }

    if (*bench_compute) {
      RunConfig config = compute_flags.Resolve();
      Model model = LoadCheckpoint(compute_ckpt, config);
      std::vector<Document> docs = LoadDocuments(compute_in);
      MaybeAttachEmbeddings(compute_embeddings, model, docs);
      const std::string report = ComputeComparisonToJson(
          BenchCompute(model, docs, config.inference, k_small, k_large));
      if (compute_out.empty()) {
        out << report << "\n";
      } else {
        WriteText(compute_out, report + "\n");
      }
      return kExitOk;
    }
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const CheckpointError& e) {
    err << "checkpoint error: " << e.what() << "\n";
    return kExitCheckpoint;
  } catch (const AlignmentError& e) {
    err << "alignment error: " << e.what() << "\n";
    return kExitAlignment;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace coref
