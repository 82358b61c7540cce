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

#include "alrobust/kernels.hpp"

#include <atomic>
#include <cassert>
#include <cmath>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define ALROBUST_HAVE_X86 1
#else
#define ALROBUST_HAVE_X86 0
#endif

namespace alrobust::kernels {
namespace {

// -1: not forced.
std::atomic<int> g_forced_isa{-1};

}  // namespace

bool avx2_available() {
#if ALROBUST_HAVE_X86 && (defined(__GNUC__) || defined(__clang__))
  static const bool available = __builtin_cpu_supports("avx2") != 0;
  return available;
#else
  return false;
#endif
}

Isa active_isa() {
  const int forced = g_forced_isa.load(std::memory_order_relaxed);
  if (forced == static_cast<int>(Isa::kScalar)) return Isa::kScalar;
  return avx2_available() ? Isa::kAvx2 : Isa::kScalar;
}

std::string_view isa_name(Isa isa) {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

void force_isa(Isa isa) {
  g_forced_isa.store(static_cast<int>(isa), std::memory_order_relaxed);
}

void reset_isa() { g_forced_isa.store(-1, std::memory_order_relaxed); }

namespace scalar {

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

double sum(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

double quadratic_form(std::span<const double> matrix,
                      std::span<const double> v) {
  const std::size_t n = v.size();
  assert(matrix.size() == n * n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] == 0.0) continue;
    s += v[i] * dot(matrix.subspan(i * n, n), v);
  }
  return s;
}

}  // namespace scalar

#if ALROBUST_HAVE_X86 && (defined(__GNUC__) || defined(__clang__))
namespace avx2 {
namespace {

__attribute__((target("avx2"))) inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

}  // namespace

__attribute__((target("avx2"))) double dot(std::span<const double> a,
                                           std::span<const double> b) {
  assert(a.size() == b.size());
  const std::size_t n = a.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(
        acc0, _mm256_mul_pd(_mm256_loadu_pd(a.data() + i),
                            _mm256_loadu_pd(b.data() + i)));
    acc1 = _mm256_add_pd(
        acc1, _mm256_mul_pd(_mm256_loadu_pd(a.data() + i + 4),
                            _mm256_loadu_pd(b.data() + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_add_pd(
        acc0, _mm256_mul_pd(_mm256_loadu_pd(a.data() + i),
                            _mm256_loadu_pd(b.data() + i)));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

__attribute__((target("avx2"))) double l1_distance(
    std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  const std::size_t n = a.size();
  // Clears the sign bit.
  const __m256d abs_mask =
      _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i),
                                    _mm256_loadu_pd(b.data() + i));
    acc = _mm256_add_pd(acc, _mm256_and_pd(d, abs_mask));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

__attribute__((target("avx2"))) double sum(std::span<const double> a) {
  const std::size_t n = a.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(a.data() + i));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

__attribute__((target("avx2"))) double quadratic_form(
    std::span<const double> matrix, std::span<const double> v) {
  const std::size_t n = v.size();
  assert(matrix.size() == n * n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] == 0.0) continue;
    s += v[i] * dot(matrix.subspan(i * n, n), v);
  }
  return s;
}

}  // namespace avx2
#else
namespace avx2 {
double dot(std::span<const double> a, std::span<const double> b) {
  return scalar::dot(a, b);
}
double l1_distance(std::span<const double> a, std::span<const double> b) {
  return scalar::l1_distance(a, b);
}
double sum(std::span<const double> a) { return scalar::sum(a); }
double quadratic_form(std::span<const double> matrix,
                      std::span<const double> v) {
  return scalar::quadratic_form(matrix, v);
}
}  // namespace avx2
#endif

double dot(std::span<const double> a, std::span<const double> b) {
  return active_isa() == Isa::kAvx2 ? avx2::dot(a, b) : scalar::dot(a, b);
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  return active_isa() == Isa::kAvx2 ? avx2::l1_distance(a, b)
                                    : scalar::l1_distance(a, b);
}

double sum(std::span<const double> a) {
  return active_isa() == Isa::kAvx2 ? avx2::sum(a) : scalar::sum(a);
}

double quadratic_form(std::span<const double> matrix,
                      std::span<const double> v) {
  return active_isa() == Isa::kAvx2 ? avx2::quadratic_form(matrix, v)
                                    : scalar::quadratic_form(matrix, v);
}

}  // namespace alrobust::kernels
