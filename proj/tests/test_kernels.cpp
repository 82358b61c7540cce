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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "alrobust/kernels.hpp"

namespace alrobust::kernels {
namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

class KernelEquivalence : public ::testing::TestWithParam<std::size_t> {
 protected:
  void SetUp() override {
    if (!avx2_available()) GTEST_SKIP() << "no AVX2 on this machine";
  }
};

TEST_P(KernelEquivalence, VectorKernelsMatchScalar) {
  std::mt19937_64 rng(GetParam() * 7919 + 1);
  const std::size_t n = GetParam();
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = random_vector(n, rng);
    const auto b = random_vector(n, rng);
    double mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::fabs(a[i] * b[i]) + std::fabs(a[i]) + std::fabs(b[i]);
    const double tol = 1e-14 * (mag + 1.0);
    EXPECT_NEAR(avx2::dot(a, b), scalar::dot(a, b), tol);
    EXPECT_NEAR(avx2::l1_distance(a, b), scalar::l1_distance(a, b), tol);
    EXPECT_NEAR(avx2::sum(a), scalar::sum(a), tol);
  }
}

TEST_P(KernelEquivalence, QuadraticFormMatchesScalar) {
  std::mt19937_64 rng(GetParam() + 17);
  const std::size_t n = GetParam();
  const auto m = random_vector(n * n, rng);
  const auto v = random_vector(n, rng);
  double mag = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      mag += std::fabs(m[i * n + j] * v[i] * v[j]);
    }
  }
  EXPECT_NEAR(avx2::quadratic_form(m, v), scalar::quadratic_form(m, v),
              1e-14 * mag);
}

TEST_P(KernelEquivalence, IntegerInputsAgreeExactly) {
  const std::size_t n = GetParam();
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = static_cast<double>(i % 5);
    b[i] = static_cast<double>((3 * i) % 7) - 3.0;
  }
  EXPECT_EQ(avx2::dot(a, b), scalar::dot(a, b));
  EXPECT_EQ(avx2::l1_distance(a, b), scalar::l1_distance(a, b));
  EXPECT_EQ(avx2::sum(a), scalar::sum(a));
}

INSTANTIATE_TEST_SUITE_P(Lengths, KernelEquivalence,
                         ::testing::Values(0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16,
                                           17, 31, 64, 81, 100));

TEST(KernelDispatch, ForcedScalarIsHonored) {
  force_isa(Isa::kScalar);
  EXPECT_EQ(active_isa(), Isa::kScalar);
  const std::vector<double> a{0.1, 0.2, 0.3, 0.4, 0.5};
  EXPECT_EQ(dot(a, a), scalar::dot(a, a));
  reset_isa();
  EXPECT_EQ(active_isa(), avx2_available() ? Isa::kAvx2 : Isa::kScalar);
}

TEST(KernelDispatch, IsaNames) {
  EXPECT_EQ(isa_name(Isa::kScalar), "scalar");
  EXPECT_EQ(isa_name(Isa::kAvx2), "avx2");
}

TEST(ScalarKernels, SmallValues) {
  const std::vector<double> a{1.0, -2.0, 3.0};
  const std::vector<double> b{0.5, 0.5, -1.0};
  EXPECT_DOUBLE_EQ(scalar::dot(a, b), -3.5);
  EXPECT_DOUBLE_EQ(scalar::l1_distance(a, b), 0.5 + 2.5 + 4.0);
  EXPECT_DOUBLE_EQ(scalar::sum(a), 2.0);
  // [[0,1],[1,0]] with v=(2,3): 2*2*3.
  const std::vector<double> m{0.0, 1.0, 1.0, 0.0};
  const std::vector<double> v{2.0, 3.0};
  EXPECT_DOUBLE_EQ(scalar::quadratic_form(m, v), 12.0);
}

}  // namespace
}  // namespace alrobust::kernels
