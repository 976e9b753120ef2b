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

#ifndef COREF_HUNGARIAN_H_
#define COREF_HUNGARIAN_H_

#include <vector>

namespace coref {

// Maximum-weight one-to-one assignment (Kuhn-Munkres with potentials,
// O(n^3)) for a rows x cols weight matrix; the smaller side is matched
// completely. Returns the assigned column of each row, or -1 if the row is
// left unmatched (only possible when rows > cols).
std::vector<int> MaxWeightAssignment(const std::vector<std::vector<double>>& weights);

// Sum of weights selected by an assignment.
double AssignmentValue(const std::vector<std::vector<double>>& weights,
                       const std::vector<int>& assignment);

}  // namespace coref

#endif  // COREF_HUNGARIAN_H_
