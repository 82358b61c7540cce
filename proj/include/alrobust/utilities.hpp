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

// Utility functions f_p(S, h) over (queried set, hypothesis) pairs.

#ifndef ALROBUST_UTILITIES_HPP_
#define ALROBUST_UTILITIES_HPP_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alrobust/core.hpp"

namespace alrobust {

// Symmetric nonnegative loss between labelings with zero diagonal.
class LossMatrix {
 public:
  // Row-major n x n. `bound` defaults to the largest entry; a supplied bound
  // must dominate every entry.
  LossMatrix(std::size_t n, std::vector<double> values,
             std::optional<double> bound = std::nullopt);

  static LossMatrix zero_one(std::size_t n);
  // (1/|X|) * #{x : h(x) != h'(x)}, bounded by m = 1.
  static LossMatrix normalized_hamming(const Instance& inst);

  std::size_t size() const { return n_; }
  double operator()(HypothesisIndex a, HypothesisIndex b) const {
    return values_[a * n_ + b];
  }
  double bound() const { return bound_; }
  std::span<const double> values() const { return values_; }

 private:
  std::size_t n_;
  std::vector<double> values_;
  double bound_;
};

// Comma-separated rows in hypothesis order.
LossMatrix read_loss_matrix(std::istream& in, std::size_t num_hypotheses);
LossMatrix load_loss_matrix_file(const std::string& path,
                                 std::size_t num_hypotheses);

enum class UtilityKind {
  kVersionSpaceReduction,
  kGeneralized,
  kPruningCount,
};

class Utility {
 public:
  // f_p(S, h) = 1 - p[h(S); S]
  static Utility version_space_reduction();
  // t_p(S, h): loss-weighted mass of pairs not both consistent with h on S.
  static Utility generalized(LossMatrix loss);
  // #{h' : p[h'] > mu and h'(S) != h(S)}; not Lipschitz in the prior.
  static Utility pruning_count(double mu = 0.01);

  UtilityKind kind() const { return kind_; }
  const LossMatrix& loss() const;
  double mu() const { return mu_; }
  std::string name() const;

 private:
  Utility(UtilityKind kind, std::shared_ptr<const LossMatrix> loss, double mu)
      : kind_(kind), loss_(std::move(loss)), mu_(mu) {}

  UtilityKind kind_;
  std::shared_ptr<const LossMatrix> loss_;
  double mu_ = 0.0;
};

double eval_utility(const Utility& u, const Prior& p, const Instance& inst,
                    std::span<const ExampleIndex> examples, HypothesisIndex h);

// Lipschitz constant L and upper bound M; both empty for non-Lipschitz
// utilities.
struct LipschitzConstants {
  std::optional<double> lipschitz;
  std::optional<double> bound;
};

LipschitzConstants lipschitz_constant(const Utility& u);

// Largest observed |f_p(S,h) - f_p'(S,h)| / ||p - p'||_1 over `trials`
// sampled (p, p', S, h). Half of the trials are small moves that push one
// hypothesis across the utility's threshold (mu for pruning counts).
double lipschitz_probe(const Utility& u, const Instance& inst, int trials,
                       std::uint64_t seed);

}  // namespace alrobust

#endif  // ALROBUST_UTILITIES_HPP_
