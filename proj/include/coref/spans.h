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

#ifndef COREF_SPANS_H_
#define COREF_SPANS_H_

#include <vector>

#include "coref/document.h"

namespace coref {

// Every span of width <= max_width that lies inside one sentence, ordered by
// (start, end).
std::vector<Span> CandidateSpans(const Document& doc, int max_width);

}  // namespace coref

#endif  // COREF_SPANS_H_
