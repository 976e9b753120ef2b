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

#include "coref/embeddings.h"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "coref/errors.h"

namespace coref {

EmbeddingTable EmbeddingTable::Read(std::istream& in, size_t dim,
                                    const std::string& source) {
  if (dim == 0) throw InputError("embedding dimension must be positive");
  EmbeddingTable table(dim);
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    std::vector<double> values;
    std::string token;
    while (fields >> token) {
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(token.c_str(), &end);
      if (end == token.c_str() || *end != '\0' || errno == ERANGE) {
        throw InputError(source + ":" + std::to_string(line_number) +
                         ": bad value '" + token + "'");
      }
      values.push_back(v);
    }
    if (values.size() != dim) {
      throw InputError(source + ":" + std::to_string(line_number) + ": expected " +
                       std::to_string(dim) + " values for '" + word + "', got " +
                       std::to_string(values.size()));
    }
    table.Add(word, std::move(values));
  }
  return table;
}

EmbeddingTable EmbeddingTable::Load(const std::string& path, size_t dim) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open embedding file " + path);
  return Read(in, dim, path);
}

std::span<const double> EmbeddingTable::Lookup(const std::string& word) const {
  auto it = vectors_.find(word);
  return it == vectors_.end() ? std::span<const double>(oov_)
                              : std::span<const double>(it->second);
}

void EmbeddingTable::Add(const std::string& word, std::vector<double> vector) {
  if (vector.size() != dim_) throw InputError("embedding for '" + word + "' has wrong size");
  vectors_[word] = std::move(vector);
}

void AttachEmbeddings(const EmbeddingTable& table, Document& doc) {
  Tensor vectors(doc.tokens.size(), table.dim());
  for (size_t i = 0; i < doc.tokens.size(); ++i) {
    auto v = table.Lookup(doc.tokens[i].text);
    std::copy(v.begin(), v.end(), vectors.row(i).begin());
  }
  doc.embeddings = std::move(vectors);
}

}  // namespace coref
