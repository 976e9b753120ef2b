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

#include "coref/spans.h"

#include <algorithm>

#include "coref/errors.h"

namespace coref {

std::vector<Span> CandidateSpans(const Document& doc, int max_width) {
  if (max_width < 1) throw InputError("max span width must be at least 1");
  std::vector<Span> spans;
  for (const auto& [first, last] : doc.SentenceBounds()) {
    for (int32_t start = first; start <= last; ++start) {
      const int32_t stop = std::min(last, start + max_width - 1);
      for (int32_t end = start; end <= stop; ++end) spans.push_back(Span{start, end});
    }
  }
  return spans;
}

}  // namespace coref
