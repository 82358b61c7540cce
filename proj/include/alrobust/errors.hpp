// Copyright 2026 The Authors.
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

#ifndef ALROBUST_ERRORS_HPP_
#define ALROBUST_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace alrobust {

// Malformed arguments: unknown examples/labels, length mismatches,
// out-of-range parameters, unparsable files.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A precondition on the mathematical setting does not hold (e.g. a policy
// that does not identify the truth, a non-Lipschitz utility passed to a
// Lipschitz bound).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Brute-force oracle caps exceeded.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Conditioning on observations with zero consistent prior mass.
class EmptyVersionSpaceError : public std::domain_error {
 public:
  EmptyVersionSpaceError() : std::domain_error("empty version space") {}
  using std::domain_error::domain_error;
};

// An oracle reported a label the model considers impossible.
class ImpossibleObservationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace alrobust

#endif  // ALROBUST_ERRORS_HPP_
