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

#ifndef COREF_EMBEDDINGS_H_
#define COREF_EMBEDDINGS_H_

#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "coref/document.h"

namespace coref {

// Fixed word vectors read from a text file with one word per line followed by
// `dim` decimal values (GloVe layout). Unknown words map to the zero vector.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(size_t dim) : dim_(dim), oov_(dim, 0.0) {}

  static EmbeddingTable Read(std::istream& in, size_t dim, const std::string& source);
  static EmbeddingTable Load(const std::string& path, size_t dim);

  size_t dim() const { return dim_; }
  size_t size() const { return vectors_.size(); }
  bool Contains(const std::string& word) const { return vectors_.count(word) > 0; }
  std::span<const double> Lookup(const std::string& word) const;

  void Add(const std::string& word, std::vector<double> vector);

 private:
  size_t dim_;
  std::vector<double> oov_;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

// Sets doc.embeddings to one row per token.
void AttachEmbeddings(const EmbeddingTable& table, Document& doc);

}  // namespace coref

#endif  // COREF_EMBEDDINGS_H_
