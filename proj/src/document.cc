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

#include "coref/document.h"

#include <algorithm>
#include <set>

#include "coref/errors.h"

namespace coref {

std::vector<std::pair<int32_t, int32_t>> Document::SentenceBounds() const {
  std::vector<std::pair<int32_t, int32_t>> bounds;
  for (int32_t i = 0; i < num_tokens(); ++i) {
    if (i == 0 || tokens[i].sentence_index != tokens[i - 1].sentence_index) {
      bounds.emplace_back(i, i);
    } else {
      bounds.back().second = i;
    }
  }
  return bounds;
}

bool Document::SameSentence(const Span& span) const {
  return tokens[span.start].sentence_index == tokens[span.end].sentence_index;
}

void ValidateDocument(const Document& doc) {
  const std::string where = "document '" + doc.doc_key + "': ";
  for (int32_t i = 0; i < doc.num_tokens(); ++i) {
    const int32_t s = doc.tokens[i].sentence_index;
    const int32_t prev = i == 0 ? 0 : doc.tokens[i - 1].sentence_index;
    if (s < prev || s > prev + 1 || (i == 0 && s != 0)) {
      throw InputError(where + "sentence indices must start at 0 and increase by 1");
    }
  }
  if (doc.embeddings && doc.embeddings->rows() != doc.tokens.size()) {
    throw InputError(where + "embedding rows do not match token count");
  }
  std::set<Span> seen;
  for (size_t c = 0; c < doc.gold_clusters.size(); ++c) {
    const Cluster& cluster = doc.gold_clusters[c];
    if (cluster.size() < 2) {
      throw InputError(where + "cluster " + std::to_string(c) +
                       " has fewer than two mentions");
    }
    for (const Span& span : cluster) {
      const std::string text =
          "[" + std::to_string(span.start) + ", " + std::to_string(span.end) + "]";
      if (span.start < 0 || span.end >= doc.num_tokens() || span.start > span.end) {
        throw InputError(where + "span " + text + " is out of range");
      }
      if (!doc.SameSentence(span)) {
        throw InputError(where + "span " + text + " crosses a sentence boundary");
      }
      if (!seen.insert(span).second) {
        throw InputError(where + "span " + text + " appears in more than one cluster");
      }
    }
  }
}

std::vector<Cluster> CanonicalClusters(std::vector<Cluster> clusters) {
  for (Cluster& c : clusters) std::sort(c.begin(), c.end());
  std::erase_if(clusters, [](const Cluster& c) { return c.empty(); });
  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster& a, const Cluster& b) { return a.front() < b.front(); });
  return clusters;
}

}  // namespace coref
