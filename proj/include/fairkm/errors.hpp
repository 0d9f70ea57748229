// Copyright 2026 The fairkm Authors.
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

#ifndef FAIRKM_ERRORS_HPP_
#define FAIRKM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace fairkm {

// Precondition on shapes, ranges or parameters violated.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Two-color routines called on data whose color weights differ.
class BalanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input is outside what an algorithm supports (e.g. more than two colors).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A transport/flow instance admits no complete solution.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An exhaustive routine was asked to enumerate beyond its size guard.
class GuardError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace fairkm

#endif  // FAIRKM_ERRORS_HPP_
