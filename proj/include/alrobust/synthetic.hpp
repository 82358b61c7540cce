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

// Seeded random instances and the desk-scale probabilistic task used by the
// mixture experiment.

#ifndef ALROBUST_SYNTHETIC_HPP_
#define ALROBUST_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "alrobust/core.hpp"

namespace alrobust {

// Hypotheses drawn uniformly without replacement from Y^X (in draw order,
// ids h1..hN), prior drawn flat from the simplex.
InstanceWithPrior random_instance(std::size_t num_examples,
                                  std::size_t num_hypotheses,
                                  std::size_t num_labels, std::uint64_t seed);

// Binary logistic models P(y=1 | z) = sigmoid(w z + b) over a (w, b) grid
// on a one-dimensional pool z in [-1, 1]. Each regularization strength
// lambda yields one prior over the grid with weights proportional to
// exp(-lambda (w^2 + b^2) / 2).
struct LogisticTask {
  std::vector<double> positions;  // z per pool example
  std::vector<double> slopes;     // w grid
  std::vector<double> offsets;    // b grid
  std::vector<double> strengths;  // lambda per component

  // Member m = (slopes[m / offsets.size()], offsets[m % offsets.size()]).
  std::size_t num_members() const { return slopes.size() * offsets.size(); }
  std::size_t num_examples() const { return positions.size(); }

  // Predictor tables in member order.
  std::vector<Predictor> predictors() const;
  // One ensemble per regularization strength.
  std::vector<ModelEnsemble> component_ensembles() const;
};

// 16-example pool, 9 x 9 parameter grid, strengths {0.01, 0.1, 1, 10}.
LogisticTask default_logistic_task();

}  // namespace alrobust

#endif  // ALROBUST_SYNTHETIC_HPP_
