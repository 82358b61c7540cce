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

#include "alrobust/mixture.hpp"

#include <algorithm>
#include <random>

#include "alrobust/errors.hpp"
#include "alrobust/kernels.hpp"

namespace alrobust {
namespace {

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Inverse-CDF draw; falls back to the last positive entry on rounding.
std::size_t categorical(std::span<const double> probs, std::mt19937_64& rng) {
  const double u = unit_draw(rng);
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    acc += probs[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

double component_marginal(const MixtureComponent& c, ExampleIndex x,
                          LabelIndex y) {
  return kernels::dot(c.posterior.probs(), c.table->likelihood(x, y));
}

std::size_t map_index(const Prior& p) {
  std::size_t best = 0;
  for (std::size_t h = 1; h < p.size(); ++h) {
    if (p[h] > p[best]) best = h;
  }
  return best;
}

void check_example(const MixtureState& state, ExampleIndex x) {
  if (x >= state.num_examples()) throw InputError("example index out of range");
}

void check_label(const MixtureState& state, LabelIndex y) {
  if (y >= state.num_labels()) throw InputError("label index out of range");
}

std::vector<double> marginals_at(const MixtureState& state, ExampleIndex x,
                                 const MixtureOptions& options) {
  std::vector<double> probs(state.num_labels());
  for (LabelIndex y = 0; y < probs.size(); ++y) {
    probs[y] = mixture_marginal(state, x, y, options);
  }
  return probs;
}

}  // namespace

std::shared_ptr<const HypothesisTable> HypothesisTable::from_instance(
    const Instance& inst) {
  const std::size_t nh = inst.num_hypotheses();
  const std::size_t nx = inst.num_examples();
  const std::size_t ny = inst.num_labels();
  std::vector<double> values;
  values.reserve(nx * ny * nh);
  for (ExampleIndex x = 0; x < nx; ++x) {
    for (LabelIndex y = 0; y < ny; ++y) {
      auto ind = inst.indicator(x, y);
      values.insert(values.end(), ind.begin(), ind.end());
    }
  }
  return std::shared_ptr<const HypothesisTable>(
      new HypothesisTable(nh, nx, ny, true, std::move(values)));
}

std::shared_ptr<const HypothesisTable> HypothesisTable::from_ensemble(
    const ModelEnsemble& ens) {
  const std::size_t nh = ens.members().size();
  const std::size_t nx = ens.num_examples();
  const std::size_t ny = ens.num_labels();
  std::vector<double> values(nx * ny * nh);
  bool deterministic = true;
  for (ExampleIndex x = 0; x < nx; ++x) {
    for (LabelIndex y = 0; y < ny; ++y) {
      for (std::size_t h = 0; h < nh; ++h) {
        const double v = ens.predict(h, x, y);
        values[(x * ny + y) * nh + h] = v;
        deterministic = deterministic && (v == 0.0 || v == 1.0);
      }
    }
  }
  return std::shared_ptr<const HypothesisTable>(
      new HypothesisTable(nh, nx, ny, deterministic, std::move(values)));
}

std::size_t MixtureState::num_examples() const {
  return components.front().table->num_examples();
}

std::size_t MixtureState::num_labels() const {
  return components.front().table->num_labels();
}

std::vector<double> MixtureState::weights() const {
  std::vector<double> w;
  w.reserve(components.size());
  for (const auto& c : components) w.push_back(c.weight);
  return w;
}

bool MixtureState::queried(ExampleIndex x) const {
  return std::any_of(transcript.begin(), transcript.end(),
                     [x](const Observation& o) { return o.example == x; });
}

MixtureState initial_mixture(
    std::vector<Prior> priors,
    std::vector<std::shared_ptr<const HypothesisTable>> tables,
    std::vector<double> weights) {
  if (priors.empty()) throw InputError("mixture needs at least one component");
  if (tables.size() != priors.size()) {
    throw InputError("one hypothesis table per component is required");
  }
  if (weights.empty()) {
    weights.assign(priors.size(), 1.0 / static_cast<double>(priors.size()));
  }
  if (weights.size() != priors.size()) {
    throw InputError("one weight per component is required");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InputError("mixture weights must be >= 0");
    total += w;
  }
  if (std::abs(total - 1.0) > kNormTolerance) {
    throw InputError("mixture weights must sum to 1");
  }
  MixtureState state;
  for (std::size_t i = 0; i < priors.size(); ++i) {
    if (!tables[i]) throw InputError("missing hypothesis table");
    if (tables[i]->num_hypotheses() != priors[i].size()) {
      throw InputError("component prior does not match its hypotheses");
    }
    if (i > 0 && (tables[i]->num_examples() != tables[0]->num_examples() ||
                  tables[i]->num_labels() != tables[0]->num_labels())) {
      throw InputError("components disagree on the pool or label set");
    }
    state.components.push_back({weights[i], std::move(priors[i]), tables[i]});
  }
  return state;
}

MixtureState mixture_from_priors(const Instance& inst,
                                 std::vector<Prior> priors,
                                 std::vector<double> weights) {
  auto table = HypothesisTable::from_instance(inst);
  std::vector<std::shared_ptr<const HypothesisTable>> tables(priors.size(),
                                                             table);
  return initial_mixture(std::move(priors), std::move(tables),
                         std::move(weights));
}

MixtureState mixture_from_ensembles(const std::vector<ModelEnsemble>& ensembles,
                                    std::vector<double> weights) {
  std::vector<Prior> priors;
  std::vector<std::shared_ptr<const HypothesisTable>> tables;
  for (const auto& ens : ensembles) {
    std::vector<double> w;
    for (const auto& m : ens.members()) w.push_back(m.weight);
    priors.push_back(Prior::from_weights(std::move(w)));
    tables.push_back(HypothesisTable::from_ensemble(ens));
  }
  return initial_mixture(std::move(priors), std::move(tables),
                         std::move(weights));
}

double mixture_marginal(const MixtureState& state, ExampleIndex x,
                        LabelIndex y, const MixtureOptions& options) {
  check_example(state, x);
  check_label(state, y);
  double total = 0.0;
  for (std::size_t i = 0; i < state.components.size(); ++i) {
    const auto& c = state.components[i];
    const double m = options.exact_marginals
                         ? component_marginal(c, x, y)
                         : map_approx_marginal(state, i, x, y);
    total += c.weight * m;
  }
  return total;
}

double map_approx_marginal(const MixtureState& state, std::size_t i,
                           ExampleIndex x, LabelIndex y) {
  if (i >= state.components.size()) {
    throw InputError("component index out of range");
  }
  check_example(state, x);
  check_label(state, y);
  const auto& c = state.components[i];
  return c.table->likelihood(x, y)[map_index(c.posterior)];
}

MixtureState mixture_step_at(const MixtureState& state, ExampleIndex x,
                             LabelIndex y) {
  check_example(state, x);
  check_label(state, y);
  if (state.queried(x)) throw InputError("example already queried");
  std::vector<double> masses(state.components.size());
  double total = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const auto& c = state.components[i];
    masses[i] = component_marginal(c, x, y);
    total += c.weight * masses[i];
  }
  if (!(total > 0.0)) {
    throw ImpossibleObservationError(
        "impossible observation: label " + std::to_string(y) +
        " at example " + std::to_string(x) + " has zero mixture probability");
  }
  MixtureState next;
  next.step = state.step + 1;
  next.transcript = state.transcript;
  next.transcript.push_back({x, y});
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const auto& c = state.components[i];
    const double w = c.weight * masses[i] / total;
    if (!(masses[i] > 0.0)) {
      next.components.push_back({0.0, c.posterior, c.table});
      continue;
    }
    auto lik = c.table->likelihood(x, y);
    std::vector<double> post(c.posterior.size());
    for (std::size_t h = 0; h < post.size(); ++h) {
      post[h] = c.posterior[h] * lik[h] / masses[i];
    }
    next.components.push_back({w, Prior(std::move(post)), c.table});
  }
  return next;
}

MixtureState mixture_step(const MixtureState& state, const Criterion& criterion,
                          const LabelOracle& oracle,
                          const MixtureOptions& options) {
  if (!criterion.uses_marginals_only()) {
    throw InputError("criterion '" + criterion.name() +
                     "' is not supported for mixtures");
  }
  std::vector<ExampleIndex> candidates;
  for (ExampleIndex x = 0; x < state.num_examples(); ++x) {
    if (!state.queried(x)) candidates.push_back(x);
  }
  if (candidates.empty()) throw InputError("no unqueried examples remain");
  std::vector<double> scores(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    scores[i] = marginal_score(criterion.kind(),
                               marginals_at(state, candidates[i], options));
  }
  const ExampleIndex x = candidates[argmax_lowest(scores)];
  return mixture_step_at(state, x, oracle(x));
}

LabelIndex mixture_predict(const MixtureState& state, ExampleIndex x,
                           const MixtureOptions& options) {
  return argmax_lowest(marginals_at(state, x, options));
}

MixtureState run_mixture(MixtureState initial, const Criterion& criterion,
                         std::size_t budget, const LabelOracle& oracle,
                         const MixtureOptions& options) {
  std::size_t remaining = 0;
  for (ExampleIndex x = 0; x < initial.num_examples(); ++x) {
    remaining += initial.queried(x) ? 0 : 1;
  }
  if (budget > remaining) {
    throw InputError("budget exceeds the number of unqueried examples");
  }
  for (std::size_t t = 0; t < budget; ++t) {
    initial = mixture_step(initial, criterion, oracle, options);
  }
  return initial;
}

double mixture_accuracy(const MixtureState& state,
                        std::span<const LabelIndex> truth,
                        const MixtureOptions& options) {
  if (truth.size() != state.num_examples()) {
    throw InputError("truth must label every pool example");
  }
  std::size_t correct = 0;
  for (ExampleIndex x = 0; x < truth.size(); ++x) {
    correct += mixture_predict(state, x, options) == truth[x] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

Trial run_trial(const MixtureState& initial, std::uint64_t seed,
                std::size_t budget, const Criterion& criterion, QueryMode mode,
                const MixtureOptions& options) {
  std::mt19937_64 rng(seed);
  Trial trial{seed, 0, {}, {}};
  const auto weights = initial.weights();
  trial.true_component = categorical(weights, rng);
  const auto& comp = initial.components[trial.true_component];
  const std::size_t h = categorical(comp.posterior.probs(), rng);
  std::vector<double> label_probs(initial.num_labels());
  for (ExampleIndex x = 0; x < initial.num_examples(); ++x) {
    for (LabelIndex y = 0; y < label_probs.size(); ++y) {
      label_probs[y] = comp.table->likelihood(x, y)[h];
    }
    trial.truth.push_back(categorical(label_probs, rng));
  }
  const LabelOracle oracle = [&trial](ExampleIndex x) {
    return trial.truth[x];
  };
  MixtureState state = initial;
  trial.steps.push_back(
      {0, 0, 0, state.weights(), mixture_accuracy(state, trial.truth, options)});
  for (std::size_t t = 0; t < budget; ++t) {
    if (mode == QueryMode::kActive) {
      state = mixture_step(state, criterion, oracle, options);
    } else {
      std::vector<ExampleIndex> open;
      for (ExampleIndex x = 0; x < state.num_examples(); ++x) {
        if (!state.queried(x)) open.push_back(x);
      }
      if (open.empty()) throw InputError("no unqueried examples remain");
      const ExampleIndex x = open[rng() % open.size()];
      state = mixture_step_at(state, x, oracle(x));
    }
    const auto& last = state.transcript.back();
    trial.steps.push_back({state.step, last.example, last.label, state.weights(),
                           mixture_accuracy(state, trial.truth, options)});
  }
  return trial;
}

}  // namespace alrobust
