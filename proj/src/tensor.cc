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

#include "coref/tensor.h"

#include <algorithm>
#include <cmath>

#include "coref/errors.h"

namespace coref {

Tensor::Tensor(size_t rows, size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Tensor::Tensor(size_t rows, size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match shape " + coref::ShapeString(rows, cols));
  }
}

Tensor Tensor::FromRows(
    std::initializer_list<std::initializer_list<double>> rows) {
  size_t cols = rows.size() == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw ShapeError("ragged rows in Tensor::FromRows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Tensor(rows.size(), cols, std::move(data));
}

Tensor Tensor::RowVector(std::span<const double> values) {
  return Tensor(1, values.size(),
                std::vector<double>(values.begin(), values.end()));
}

Tensor Tensor::Identity(size_t n) {
  Tensor t(n, n);
  for (size_t i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

double Tensor::scalar() const {
  if (rows_ != 1 || cols_ != 1) {
    throw ShapeError("scalar() on tensor of shape " + ShapeString());
  }
  return data_[0];
}

bool Tensor::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::string Tensor::ShapeString() const {
  return coref::ShapeString(rows_, cols_);
}

void Tensor::Fill(double value) { std::fill(data_.begin(), data_.end(), value); }

void Tensor::AddInPlace(const Tensor& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw ShapeError("AddInPlace: " + ShapeString() + " vs " +
                     other.ShapeString());
  }
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
}

std::string ShapeString(size_t rows, size_t cols) {
  return "[" + std::to_string(rows) + "x" + std::to_string(cols) + "]";
}

Tensor MatMul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + a.ShapeString() + " x " + b.ShapeString());
  }
  Tensor out(a.rows(), b.cols());
  const size_t n = b.cols();
  for (size_t i = 0; i < a.rows(); ++i) {
    double* out_row = out.data().data() + i * n;
    for (size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* b_row = b.data().data() + k * n;
      for (size_t j = 0; j < n; ++j) out_row[j] += aik * b_row[j];
    }
  }
  return out;
}

Tensor Transpose(const Tensor& a) {
  Tensor out(a.cols(), a.rows());
  for (size_t i = 0; i < a.rows(); ++i) {
    for (size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  }
  return out;
}

}  // namespace coref
