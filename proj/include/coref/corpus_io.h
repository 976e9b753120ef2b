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

#ifndef COREF_CORPUS_IO_H_
#define COREF_CORPUS_IO_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "coref/document.h"

namespace coref {

// Jsonlines interchange format, one document per line:
//
//   {"doc_key": str, "genre": int,
//    "sentences": [[str, ...], ...],
//    "speakers": [[int, ...], ...],          (parallel to sentences)
//    "clusters": [[[start, end], ...], ...]}  (global token indices, end inclusive)
//
// Prediction files carry the same fields plus "predicted_clusters".
// Blank lines are skipped. Malformed records raise InputError naming the line
// and field.
std::vector<Document> ReadDocuments(std::istream& in, const std::string& source);
std::vector<Document> LoadDocuments(const std::string& path);

std::string DocumentToJsonLine(const Document& doc);
void WriteDocuments(std::ostream& out, const std::vector<Document>& docs);
void SaveDocuments(const std::string& path, const std::vector<Document>& docs);

}  // namespace coref

#endif  // COREF_CORPUS_IO_H_
