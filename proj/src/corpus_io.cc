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

#include "coref/corpus_io.h"

#include <fstream>
#include <istream>
#include <ostream>

#include "coref/errors.h"
#include "json.hpp"

namespace coref {
namespace {

using json = nlohmann::json;

class RecordError {
 public:
  RecordError(const std::string& source, size_t line) : source_(source), line_(line) {}

  [[noreturn]] void Fail(const std::string& field, const std::string& what) const {
    throw InputError(source_ + ":" + std::to_string(line_) + ": field '" + field +
                     "': " + what);
  }

 private:
  const std::string& source_;
  size_t line_;
};

const json& Field(const json& record, const char* name, const RecordError& err) {
  auto it = record.find(name);
  if (it == record.end()) err.Fail(name, "missing");
  return *it;
}

std::vector<Cluster> ParseClusters(const json& value, const char* field,
                                   const RecordError& err) {
  if (!value.is_array()) err.Fail(field, "expected an array of clusters");
  std::vector<Cluster> clusters;
  for (const json& c : value) {
    if (!c.is_array()) err.Fail(field, "expected a cluster array");
    Cluster cluster;
    for (const json& m : c) {
      if (!m.is_array() || m.size() != 2 || !m[0].is_number_integer() ||
          !m[1].is_number_integer()) {
        err.Fail(field, "expected [start, end] integer pairs");
      }
      cluster.push_back(Span{m[0].get<int32_t>(), m[1].get<int32_t>()});
    }
    clusters.push_back(std::move(cluster));
  }
  return clusters;
}

json ClustersToJson(const std::vector<Cluster>& clusters) {
  json out = json::array();
  for (const Cluster& c : clusters) {
    json cluster = json::array();
    for (const Span& s : c) cluster.push_back({s.start, s.end});
    out.push_back(std::move(cluster));
  }
  return out;
}

Document ParseDocument(const json& record, const RecordError& err) {
  if (!record.is_object()) err.Fail("<record>", "expected a JSON object");
  Document doc;
  const json& key = Field(record, "doc_key", err);
  if (!key.is_string()) err.Fail("doc_key", "expected a string");
  doc.doc_key = key.get<std::string>();

  auto genre = record.find("genre");
  if (genre != record.end()) {
    if (!genre->is_number_integer() || genre->get<int64_t>() < 0) {
      err.Fail("genre", "expected a non-negative integer");
    }
    doc.genre = genre->get<int32_t>();
  }

  const json& sentences = Field(record, "sentences", err);
  if (!sentences.is_array()) err.Fail("sentences", "expected an array");
  auto speakers = record.find("speakers");
  if (speakers != record.end() &&
      (!speakers->is_array() || speakers->size() != sentences.size())) {
    err.Fail("speakers", "must be parallel to sentences");
  }
  int32_t sentence_index = 0;
  for (size_t s = 0; s < sentences.size(); ++s) {
    const json& sentence = sentences[s];
    if (!sentence.is_array()) err.Fail("sentences", "expected arrays of strings");
    if (sentence.empty()) continue;
    const json* spk = speakers != record.end() ? &(*speakers)[s] : nullptr;
    if (spk && (!spk->is_array() || spk->size() != sentence.size())) {
      err.Fail("speakers", "sentence " + std::to_string(s) + " length mismatch");
    }
    for (size_t t = 0; t < sentence.size(); ++t) {
      if (!sentence[t].is_string()) err.Fail("sentences", "tokens must be strings");
      Token token;
      token.text = sentence[t].get<std::string>();
      token.sentence_index = sentence_index;
      if (spk) {
        if (!(*spk)[t].is_number_integer()) err.Fail("speakers", "expected integers");
        token.speaker = (*spk)[t].get<int32_t>();
      }
      doc.tokens.push_back(std::move(token));
    }
    ++sentence_index;
  }

  auto clusters = record.find("clusters");
  if (clusters != record.end()) doc.gold_clusters = ParseClusters(*clusters, "clusters", err);
  auto predicted = record.find("predicted_clusters");
  if (predicted != record.end()) {
    doc.predicted_clusters = ParseClusters(*predicted, "predicted_clusters", err);
  }
  try {
    ValidateDocument(doc);
  } catch (const InputError& e) {
    err.Fail("clusters", e.what());
  }
  return doc;
}

}  // namespace

std::vector<Document> ReadDocuments(std::istream& in, const std::string& source) {
  std::vector<Document> docs;
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    RecordError err(source, line_number);
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      err.Fail("<record>", std::string("invalid JSON: ") + e.what());
    }
    docs.push_back(ParseDocument(record, err));
  }
  return docs;
}

std::vector<Document> LoadDocuments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open corpus file " + path);
  return ReadDocuments(in, path);
}

std::string DocumentToJsonLine(const Document& doc) {
  json sentences = json::array();
  json speakers = json::array();
  for (const auto& [first, last] : doc.SentenceBounds()) {
    json words = json::array();
    json spk = json::array();
    for (int32_t i = first; i <= last; ++i) {
      words.push_back(doc.tokens[i].text);
      spk.push_back(doc.tokens[i].speaker);
    }
    sentences.push_back(std::move(words));
    speakers.push_back(std::move(spk));
  }
  json record = {{"doc_key", doc.doc_key},
                 {"genre", doc.genre},
                 {"sentences", std::move(sentences)},
                 {"speakers", std::move(speakers)},
                 {"clusters", ClustersToJson(doc.gold_clusters)}};
  if (doc.predicted_clusters) {
    record["predicted_clusters"] = ClustersToJson(*doc.predicted_clusters);
  }
  return record.dump();
}

void WriteDocuments(std::ostream& out, const std::vector<Document>& docs) {
  for (const Document& doc : docs) out << DocumentToJsonLine(doc) << "\n";
}

void SaveDocuments(const std::string& path, const std::vector<Document>& docs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write corpus file " + path);
  WriteDocuments(out, docs);
}

}  // namespace coref
