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

// Active learning with a weighted mixture of priors. Each component keeps
// its own posterior; mixture weights follow the components' evidence.

#ifndef ALROBUST_MIXTURE_HPP_
#define ALROBUST_MIXTURE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "alrobust/core.hpp"
#include "alrobust/policies.hpp"
#include "alrobust/synthetic.hpp"

namespace alrobust {

// P[y | x, h] for every hypothesis of a component. Deterministic tables come
// from an Instance (0/1 entries), probabilistic ones from a ModelEnsemble.
class HypothesisTable {
 public:
  static std::shared_ptr<const HypothesisTable> from_instance(
      const Instance& inst);
  static std::shared_ptr<const HypothesisTable> from_ensemble(
      const ModelEnsemble& ens);

  std::size_t num_hypotheses() const { return num_hypotheses_; }
  std::size_t num_examples() const { return num_examples_; }
  std::size_t num_labels() const { return num_labels_; }
  bool deterministic() const { return deterministic_; }

  // P[y | x, h] for every h.
  std::span<const double> likelihood(ExampleIndex x, LabelIndex y) const {
    return {values_.data() + (x * num_labels_ + y) * num_hypotheses_,
            num_hypotheses_};
  }

 private:
  HypothesisTable(std::size_t nh, std::size_t nx, std::size_t ny,
                  bool deterministic, std::vector<double> values)
      : num_hypotheses_(nh), num_examples_(nx), num_labels_(ny),
        deterministic_(deterministic), values_(std::move(values)) {}

  std::size_t num_hypotheses_;
  std::size_t num_examples_;
  std::size_t num_labels_;
  bool deterministic_;
  std::vector<double> values_;  // [(x * |Y| + y) * |H| + h]
};

struct MixtureComponent {
  double weight;
  Prior posterior;
  std::shared_ptr<const HypothesisTable> table;
};

// Immutable snapshot; steps return new states.
struct MixtureState {
  std::vector<MixtureComponent> components;
  std::size_t step = 0;
  LabeledSet transcript;

  std::size_t num_examples() const;
  std::size_t num_labels() const;
  std::vector<double> weights() const;
  bool queried(ExampleIndex x) const;
};

struct MixtureOptions {
  // When false, each component's marginal is replaced by the prediction of
  // its maximum-posterior hypothesis for selection and prediction. Weight
  // and posterior updates always use exact marginals.
  bool exact_marginals = true;
};

// Empty `weights` means uniform. Tables must agree on |X| and |Y|.
MixtureState initial_mixture(
    std::vector<Prior> priors,
    std::vector<std::shared_ptr<const HypothesisTable>> tables,
    std::vector<double> weights = {});

// Every component over the same deterministic instance.
MixtureState mixture_from_priors(const Instance& inst,
                                 std::vector<Prior> priors,
                                 std::vector<double> weights = {});

// One component per ensemble; member weights form the component prior.
MixtureState mixture_from_ensembles(const std::vector<ModelEnsemble>& ensembles,
                                    std::vector<double> weights = {});

// sum_i w_i p_i[y; x]
double mixture_marginal(const MixtureState& state, ExampleIndex x,
                        LabelIndex y, const MixtureOptions& options = {});

// Prediction of component i's maximum-posterior hypothesis (lowest index on
// ties) at (x, y).
double map_approx_marginal(const MixtureState& state, std::size_t i,
                           ExampleIndex x, LabelIndex y);

using LabelOracle = std::function<LabelIndex(ExampleIndex)>;

// Conditions on (x, y): weights then posteriors. Throws
// ImpossibleObservationError when the mixture gives (x, y) zero probability.
// A component that rules the observation out keeps its previous posterior
// with weight 0.
MixtureState mixture_step_at(const MixtureState& state, ExampleIndex x,
                             LabelIndex y);

// Queries the unqueried example preferred by `criterion` under the mixture
// marginal. The criterion must depend on marginals only.
MixtureState mixture_step(const MixtureState& state, const Criterion& criterion,
                          const LabelOracle& oracle,
                          const MixtureOptions& options = {});

// argmax_y of the mixture marginal, lowest label on ties.
LabelIndex mixture_predict(const MixtureState& state, ExampleIndex x,
                           const MixtureOptions& options = {});

MixtureState run_mixture(MixtureState initial, const Criterion& criterion,
                         std::size_t budget, const LabelOracle& oracle,
                         const MixtureOptions& options = {});

// Fraction of the pool where mixture_predict matches `truth`.
double mixture_accuracy(const MixtureState& state,
                        std::span<const LabelIndex> truth,
                        const MixtureOptions& options = {});

// One seeded trial: pick a component uniformly, draw a hypothesis from its
// prior, draw labels from it, then query `budget` examples either by the
// criterion or uniformly at random.
struct TrialStep {
  std::size_t step;
  ExampleIndex example;  // unused for step 0
  LabelIndex label;      // unused for step 0
  std::vector<double> weights;
  double accuracy;
};

struct Trial {
  std::uint64_t seed;
  std::size_t true_component;
  std::vector<LabelIndex> truth;
  std::vector<TrialStep> steps;  // step 0 is the initial state
};

enum class QueryMode { kActive, kPassive };

Trial run_trial(const MixtureState& initial, std::uint64_t seed,
                std::size_t budget, const Criterion& criterion, QueryMode mode,
                const MixtureOptions& options = {});

}  // namespace alrobust

#endif  // ALROBUST_MIXTURE_HPP_
