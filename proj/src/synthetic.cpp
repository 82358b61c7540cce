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

#include "alrobust/synthetic.hpp"

#include <cmath>
#include <random>
#include <set>
#include <string>

#include "alrobust/errors.hpp"

namespace alrobust {

InstanceWithPrior random_instance(std::size_t num_examples,
                                  std::size_t num_hypotheses,
                                  std::size_t num_labels, std::uint64_t seed) {
  if (num_examples < 1 || num_labels < 2 || num_hypotheses < 1) {
    throw InputError("random instance needs |X| >= 1, |Y| >= 2, |H| >= 1");
  }
  const double total =
      std::pow(static_cast<double>(num_labels), static_cast<double>(num_examples));
  if (static_cast<double>(num_hypotheses) > total) {
    throw InputError("more hypotheses requested than labelings exist");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> label(0, num_labels - 1);
  std::set<std::vector<LabelIndex>> seen;
  std::vector<Hypothesis> hyps;
  while (hyps.size() < num_hypotheses) {
    std::vector<LabelIndex> labels(num_examples);
    for (auto& y : labels) y = label(rng);
    if (!seen.insert(labels).second) continue;
    hyps.push_back({"h" + std::to_string(hyps.size() + 1), std::move(labels)});
  }
  std::vector<std::string> xs;
  for (std::size_t x = 0; x < num_examples; ++x) {
    xs.push_back("x" + std::to_string(x));
  }
  std::vector<std::string> ys;
  for (std::size_t y = 0; y < num_labels; ++y) ys.push_back(std::to_string(y));
  Instance inst(std::move(xs), std::move(ys), std::move(hyps));
  Prior prior = random_prior(num_hypotheses, rng);
  return {std::move(inst), std::move(prior)};
}

std::vector<Predictor> LogisticTask::predictors() const {
  std::vector<Predictor> out;
  out.reserve(num_members());
  for (double w : slopes) {
    for (double b : offsets) {
      Predictor pred;
      pred.probs.resize(positions.size() * 2);
      for (std::size_t x = 0; x < positions.size(); ++x) {
        const double p1 = 1.0 / (1.0 + std::exp(-(w * positions[x] + b)));
        pred.probs[2 * x] = 1.0 - p1;
        pred.probs[2 * x + 1] = p1;
      }
      out.push_back(std::move(pred));
    }
  }
  return out;
}

std::vector<ModelEnsemble> LogisticTask::component_ensembles() const {
  const auto preds = predictors();
  std::vector<ModelEnsemble> out;
  for (double lambda : strengths) {
    std::vector<double> w;
    w.reserve(num_members());
    for (double s : slopes) {
      for (double b : offsets) w.push_back(std::exp(-0.5 * lambda * (s * s + b * b)));
    }
    double total = 0.0;
    for (double v : w) total += v;
    std::vector<ModelEnsemble::Member> members;
    for (std::size_t m = 0; m < w.size(); ++m) {
      members.push_back({w[m] / total, preds[m]});
    }
    out.emplace_back(positions.size(), 2, std::move(members));
  }
  return out;
}

LogisticTask default_logistic_task() {
  LogisticTask task;
  for (int i = 0; i < 16; ++i) task.positions.push_back(-1.0 + 2.0 * i / 15.0);
  for (int i = -4; i <= 4; ++i) {
    task.slopes.push_back(5.0 * i);
    task.offsets.push_back(1.0 * i);
  }
  task.strengths = {0.01, 0.1, 1.0, 10.0};
  return task;
}

}  // namespace alrobust
