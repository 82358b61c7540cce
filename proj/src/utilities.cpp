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

#include "alrobust/utilities.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <random>
#include <sstream>

#include "alrobust/errors.hpp"
#include "alrobust/kernels.hpp"

namespace alrobust {

LossMatrix::LossMatrix(std::size_t n, std::vector<double> values,
                       std::optional<double> bound)
    : n_(n), values_(std::move(values)), bound_(0.0) {
  if (values_.size() != n_ * n_) {
    throw InputError("loss matrix must be " + std::to_string(n_) + "x" +
                     std::to_string(n_));
  }
  double largest = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    if (values_[i * n_ + i] != 0.0) {
      throw InputError("loss matrix diagonal must be 0 (row " +
                       std::to_string(i + 1) + ")");
    }
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = values_[i * n_ + j];
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw InputError("loss matrix entries must be finite and >= 0");
      }
      if (std::fabs(v - values_[j * n_ + i]) > 1e-9) {
        throw InputError("loss matrix is not symmetric at (" +
                         std::to_string(i + 1) + "," + std::to_string(j + 1) +
                         ")");
      }
      largest = std::max(largest, v);
    }
  }
  bound_ = bound.value_or(largest);
  if (bound_ < largest) {
    throw InputError("loss bound m is smaller than a matrix entry");
  }
}

LossMatrix LossMatrix::zero_one(std::size_t n) {
  std::vector<double> v(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 0.0;
  return LossMatrix(n, std::move(v), 1.0);
}

LossMatrix LossMatrix::normalized_hamming(const Instance& inst) {
  const std::size_t n = inst.num_hypotheses();
  const double scale = 1.0 / static_cast<double>(inst.num_examples());
  std::vector<double> v(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      std::size_t diff = 0;
      for (std::size_t x = 0; x < inst.num_examples(); ++x) {
        diff += inst.label_of(a, x) != inst.label_of(b, x);
      }
      v[a * n + b] = static_cast<double>(diff) * scale;
    }
  }
  return LossMatrix(n, std::move(v), 1.0);
}

LossMatrix read_loss_matrix(std::istream& in, std::size_t num_hypotheses) {
  std::vector<double> values;
  std::string line;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string field;
    std::size_t cols = 0;
    while (std::getline(ss, field, ',')) {
      double v = 0.0;
      auto b = field.find_first_not_of(' ');
      auto e = field.find_last_not_of(' ');
      if (b == std::string::npos) {
        throw InputError("line " + std::to_string(line_no) + ": empty entry");
      }
      auto res = std::from_chars(field.data() + b, field.data() + e + 1, v);
      if (res.ec != std::errc() || res.ptr != field.data() + e + 1) {
        throw InputError("line " + std::to_string(line_no) + ": bad number '" +
                         field + "'");
      }
      values.push_back(v);
      ++cols;
    }
    if (cols != num_hypotheses) {
      throw InputError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(num_hypotheses) + " columns");
    }
    ++rows;
  }
  if (rows != num_hypotheses) {
    throw InputError("loss matrix has " + std::to_string(rows) +
                     " rows, expected " + std::to_string(num_hypotheses));
  }
  return LossMatrix(num_hypotheses, std::move(values));
}

LossMatrix load_loss_matrix_file(const std::string& path,
                                 std::size_t num_hypotheses) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open loss matrix file '" + path + "'");
  try {
    return read_loss_matrix(in, num_hypotheses);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

Utility Utility::version_space_reduction() {
  return Utility(UtilityKind::kVersionSpaceReduction, nullptr, 0.0);
}

Utility Utility::generalized(LossMatrix loss) {
  return Utility(UtilityKind::kGeneralized,
                 std::make_shared<const LossMatrix>(std::move(loss)), 0.0);
}

Utility Utility::pruning_count(double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw InputError("pruning-count threshold mu must be >= 0");
  }
  return Utility(UtilityKind::kPruningCount, nullptr, mu);
}

const LossMatrix& Utility::loss() const {
  if (!loss_) throw ContractError("utility has no loss matrix");
  return *loss_;
}

std::string Utility::name() const {
  switch (kind_) {
    case UtilityKind::kVersionSpaceReduction:
      return "version_space_reduction";
    case UtilityKind::kGeneralized:
      return "generalized";
    case UtilityKind::kPruningCount:
      return "pruning_count";
  }
  return "unknown";
}

double eval_utility(const Utility& u, const Prior& p, const Instance& inst,
                    std::span<const ExampleIndex> examples,
                    HypothesisIndex h) {
  inst.check_hypothesis(h);
  if (p.size() != inst.num_hypotheses()) {
    throw InputError("prior dimension does not match the instance");
  }
  for (ExampleIndex x : examples) inst.check_example(x);

  switch (u.kind()) {
    case UtilityKind::kVersionSpaceReduction: {
      std::vector<LabelIndex> labels(examples.size());
      for (std::size_t i = 0; i < examples.size(); ++i) {
        labels[i] = inst.label_of(h, examples[i]);
      }
      return std::max(0.0, 1.0 - label_seq_prob(p, inst, examples, labels));
    }
    case UtilityKind::kGeneralized: {
      const LossMatrix& loss = u.loss();
      if (loss.size() != inst.num_hypotheses()) {
        throw InputError("loss matrix dimension does not match the instance");
      }
      // Sum over all pairs minus the pairs where both agree with h on S.
      std::vector<double> consistent(p.probs().begin(), p.probs().end());
      for (std::size_t g = 0; g < consistent.size(); ++g) {
        if (!inst.agree_on(g, h, examples)) consistent[g] = 0.0;
      }
      const double total = kernels::quadratic_form(loss.values(), p.probs());
      const double kept = kernels::quadratic_form(loss.values(), consistent);
      return std::max(0.0, total - kept);
    }
    case UtilityKind::kPruningCount: {
      // Strict comparison on the stored value; hypotheses sitting exactly at
      // mu are not counted.
      std::size_t count = 0;
      for (std::size_t g = 0; g < inst.num_hypotheses(); ++g) {
        if (p[g] > u.mu() && !inst.agree_on(g, h, examples)) ++count;
      }
      return static_cast<double>(count);
    }
  }
  return 0.0;
}

LipschitzConstants lipschitz_constant(const Utility& u) {
  switch (u.kind()) {
    case UtilityKind::kVersionSpaceReduction:
      return {1.0, 1.0};
    case UtilityKind::kGeneralized: {
      const double m = u.loss().bound();
      return {2.0 * m, m};
    }
    case UtilityKind::kPruningCount:
      return {std::nullopt, std::nullopt};
  }
  return {};
}

double lipschitz_probe(const Utility& u, const Instance& inst, int trials,
                       std::uint64_t seed) {
  if (trials < 1) throw InputError("lipschitz_probe needs trials >= 1");
  const std::size_t n = inst.num_hypotheses();
  if (n < 2) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_h(0, n - 1);
  std::bernoulli_distribution coin(0.5);

  double worst = 0.0;
  std::vector<ExampleIndex> examples;
  for (int t = 0; t < trials; ++t) {
    examples.clear();
    for (std::size_t x = 0; x < inst.num_examples(); ++x) {
      if (coin(rng)) examples.push_back(x);
    }
    const HypothesisIndex h = pick_h(rng);

    std::vector<double> a;
    std::vector<double> b;
    if (t % 2 == 0) {
      Prior p = random_prior(n, rng);
      const double radius = 2.0 * (1.0 - unit(rng));  // (0, 2]
      Prior q = perturb(p, radius, rng());
      a.assign(p.probs().begin(), p.probs().end());
      b.assign(q.probs().begin(), q.probs().end());
    } else {
      // One hypothesis sits exactly at the threshold in p and just above it
      // in p'.
      const double tau = u.kind() == UtilityKind::kPruningCount
                             ? u.mu()
                             : 0.5 * unit(rng);
      if (tau >= 1.0) continue;
      const HypothesisIndex at = pick_h(rng);
      Prior rest = random_prior(n - 1, rng);
      a.assign(n, 0.0);
      for (std::size_t g = 0, k = 0; g < n; ++g) {
        if (g == at) continue;
        a[g] = (1.0 - tau) * rest[k++];
      }
      a[at] = tau;
      std::size_t donor = at == 0 ? 1 : 0;
      for (std::size_t g = 0; g < n; ++g) {
        if (g != at && a[g] > a[donor]) donor = g;
      }
      const double eta = std::min(a[donor], 1e-6 + (1e-3 - 1e-6) * unit(rng));
      b = a;
      b[at] += eta;
      b[donor] -= eta;
    }
    const double dist = kernels::l1_distance(a, b);
    if (!(dist > 1e-6)) continue;
    const Prior p(std::move(a));
    const Prior q(std::move(b));
    const double fa = eval_utility(u, p, inst, examples, h);
    const double fb = eval_utility(u, q, inst, examples, h);
    worst = std::max(worst, std::fabs(fa - fb) / dist);
  }
  return worst;
}

}  // namespace alrobust
