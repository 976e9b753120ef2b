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

#ifndef COREF_ERRORS_H_
#define COREF_ERRORS_H_

#include <stdexcept>
#include <string>

namespace coref {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes do not conform to an operation's rules.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A NaN or infinity appeared where finite values are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data (corpus, embeddings, config).
class InputError : public Error {
 public:
  using Error::Error;
};

// Unreadable checkpoint or one that does not match the model config.
class CheckpointError : public Error {
 public:
  using Error::Error;
};

// Gold and predicted corpora do not line up document by document.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

}  // namespace coref

#endif  // COREF_ERRORS_H_
