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

#include "coref/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "coref/errors.h"

namespace coref {
namespace {

std::vector<size_t> ChooseEntries(const Tensor& grad, const GradCheckOptions& options,
                                  std::mt19937_64& rng) {
  std::vector<size_t> all(grad.size());
  std::iota(all.begin(), all.end(), 0);
  if (options.max_entries_per_block == 0 || grad.size() <= options.max_entries_per_block) {
    return all;
  }
  const size_t largest = options.max_entries_per_block / 2;
  std::stable_sort(all.begin(), all.end(), [&](size_t a, size_t b) {
    return std::abs(grad[a]) > std::abs(grad[b]);
  });
  std::vector<size_t> chosen(all.begin(), all.begin() + largest);
  std::vector<size_t> rest(all.begin() + largest, all.end());
  while (chosen.size() < options.max_entries_per_block && !rest.empty()) {
    const size_t pick = rng() % rest.size();
    chosen.push_back(rest[pick]);
    rest[pick] = rest.back();
    rest.pop_back();
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

const BlockCheck* GradCheckReport::Worst() const {
  const BlockCheck* worst = nullptr;
  for (const BlockCheck& b : blocks) {
    if (worst == nullptr || (!b.finite && worst->finite) ||
        (b.finite == worst->finite && b.relative_error > worst->relative_error)) {
      worst = &b;
    }
  }
  return worst;
}

bool GradCheckReport::Passed(double tolerance) const {
  return std::all_of(blocks.begin(), blocks.end(), [&](const BlockCheck& b) {
    return b.finite && b.relative_error <= tolerance;
  });
}

GradCheckReport FiniteDifferenceCheck(const LossFn& loss, const Gradients& analytic,
                                      const ParamStore& params,
                                      const GradCheckOptions& options) {
  GradCheckReport report;
  ParamStore probe = params;
  std::mt19937_64 rng(options.seed);
  for (const auto& [name, value] : params.tensors()) {
    auto it = analytic.find(name);
    const Tensor zeros(value.rows(), value.cols());
    const Tensor& grad = it == analytic.end() ? zeros : it->second;
    if (grad.rows() != value.rows() || grad.cols() != value.cols()) {
      throw ShapeError("gradient shape mismatch for block " + name);
    }
    BlockCheck check;
    check.name = name;
    for (size_t idx : ChooseEntries(grad, options, rng)) {
      Tensor& slot = probe.Mutable(name);
      const double original = slot[idx];
      slot[idx] = original + options.epsilon;
      const double plus = loss(probe);
      slot[idx] = original - options.epsilon;
      const double minus = loss(probe);
      slot[idx] = original;
      const double numeric = (plus - minus) / (2.0 * options.epsilon);
      const double a = grad[idx];
      if (!std::isfinite(numeric) || !std::isfinite(a)) check.finite = false;
      check.max_abs_error = std::max(check.max_abs_error, std::abs(a - numeric));
      check.max_abs_analytic = std::max(check.max_abs_analytic, std::abs(a));
      check.max_abs_numeric = std::max(check.max_abs_numeric, std::abs(numeric));
      ++check.entries_checked;
    }
    const double scale =
        std::max({check.max_abs_analytic, check.max_abs_numeric, kRelativeFloor});
    check.relative_error = check.finite ? check.max_abs_error / scale : NAN;
    report.blocks.push_back(check);
  }
  return report;
}

}  // namespace coref
