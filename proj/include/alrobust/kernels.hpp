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

// Reductions over probability vectors. Every kernel has a portable scalar
// reference and an AVX2 variant; the dispatcher picks AVX2 at runtime when
// the CPU supports it. The two variants differ only in summation order.

#ifndef ALROBUST_KERNELS_HPP_
#define ALROBUST_KERNELS_HPP_

#include <cstddef>
#include <span>
#include <string_view>

namespace alrobust::kernels {

enum class Isa { kScalar, kAvx2 };

bool avx2_available();

// Instruction set used by the dispatching entry points below.
Isa active_isa();
std::string_view isa_name(Isa isa);

// Pins dispatch to `isa` (falls back to scalar if AVX2 is unavailable).
// Intended for tests and benchmarks; not synchronized with concurrent
// kernel calls.
void force_isa(Isa isa);
void reset_isa();

// sum_i a[i] * b[i]
double dot(std::span<const double> a, std::span<const double> b);
// sum_i |a[i] - b[i]|
double l1_distance(std::span<const double> a, std::span<const double> b);
// sum_i a[i]
double sum(std::span<const double> a);
// v^T M v for a row-major n x n matrix.
double quadratic_form(std::span<const double> matrix,
                      std::span<const double> v);

namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
double l1_distance(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
double quadratic_form(std::span<const double> matrix,
                      std::span<const double> v);
}  // namespace scalar

namespace avx2 {
// Callers must check avx2_available() first.
double dot(std::span<const double> a, std::span<const double> b);
double l1_distance(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
double quadratic_form(std::span<const double> matrix,
                      std::span<const double> v);
}  // namespace avx2

}  // namespace alrobust::kernels

#endif  // ALROBUST_KERNELS_HPP_
