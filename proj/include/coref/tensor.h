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

#ifndef COREF_TENSOR_H_
#define COREF_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace coref {

// Dense row-major matrix of doubles. Vectors are 1 x n rows and scalars are
// 1 x 1, so every tensor has rank two.
class Tensor {
 public:
  Tensor() = default;
  Tensor(size_t rows, size_t cols, double fill = 0.0);
  Tensor(size_t rows, size_t cols, std::vector<double> data);

  // Builds a tensor from nested rows; all rows must have equal length.
  static Tensor FromRows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor RowVector(std::span<const double> values);
  static Tensor Scalar(double value) { return Tensor(1, 1, value); }
  static Tensor Identity(size_t n);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  std::vector<size_t> shape() const { return {rows_, cols_}; }
  bool empty() const { return data_.empty(); }

  double& operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
  double operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }
  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<double> row(size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  // Only valid for 1 x 1 tensors.
  double scalar() const;

  bool AllFinite() const;
  std::string ShapeString() const;

  void Fill(double value);
  // this += other (same shape).
  void AddInPlace(const Tensor& other);

  friend bool operator==(const Tensor& a, const Tensor& b) = default;

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> data_;
};

std::string ShapeString(size_t rows, size_t cols);

// Plain (tape-free) kernels. The tape records these and they also serve the
// direct scoring paths.
Tensor MatMul(const Tensor& a, const Tensor& b);
Tensor Transpose(const Tensor& a);

}  // namespace coref

#endif  // COREF_TENSOR_H_
