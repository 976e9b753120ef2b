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

#ifndef COREF_GRADCHECK_H_
#define COREF_GRADCHECK_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "coref/param_store.h"

namespace coref {

// Loss at the given parameters. Must be deterministic.
using LossFn = std::function<double(const ParamStore&)>;

struct BlockCheck {
  std::string name;
  size_t entries_checked = 0;
  double max_abs_error = 0.0;
  // Normwise: max |analytic - numeric| over the checked entries divided by
  // max(max |analytic|, max |numeric|, kRelativeFloor).
  double relative_error = 0.0;
  double max_abs_analytic = 0.0;
  double max_abs_numeric = 0.0;
  bool finite = true;
};

struct GradCheckReport {
  std::vector<BlockCheck> blocks;

  // The block with the largest relative error; non-finite blocks rank first.
  const BlockCheck* Worst() const;
  bool Passed(double tolerance) const;
};

struct GradCheckOptions {
  double epsilon = 1e-5;
  // 0 checks every entry. Otherwise checks the entries with the largest
  // analytic magnitude plus as many seeded random entries, up to this total.
  size_t max_entries_per_block = 0;
  uint64_t seed = 0;
};

inline constexpr double kRelativeFloor = 1e-7;

// Compares `analytic` against central differences of `loss` for every block
// of `params`. Blocks absent from `analytic` are taken to have zero gradient.
GradCheckReport FiniteDifferenceCheck(const LossFn& loss, const Gradients& analytic,
                                      const ParamStore& params,
                                      const GradCheckOptions& options = {});

}  // namespace coref

#endif  // COREF_GRADCHECK_H_
