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

// Finite-instance data model: pools, labelings, priors over labelings,
// label-sequence probabilities and Bayes conditioning.

#ifndef ALROBUST_CORE_HPP_
#define ALROBUST_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace alrobust {

using ExampleIndex = std::size_t;
using LabelIndex = std::size_t;
using HypothesisIndex = std::size_t;

// Tolerance for normalization checks on priors and predictors.
inline constexpr double kNormTolerance = 1e-9;

// A total labeling of the pool.
struct Hypothesis {
  std::string id;
  std::vector<LabelIndex> labels;  // labels[x] = h(x)

  LabelIndex operator()(ExampleIndex x) const { return labels[x]; }
  friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
};

// Pool X, label set Y and an explicit hypothesis list H. Hypothesis order is
// declaration order; every prior over this instance is index-parallel to it.
class Instance {
 public:
  Instance(std::vector<std::string> examples, std::vector<std::string> labels,
           std::vector<Hypothesis> hypotheses);

  // H = Y^X enumerated with the first example varying fastest; ids h1..hN.
  static Instance all_labelings(std::vector<std::string> examples,
                                std::vector<std::string> labels);

  std::size_t num_examples() const { return examples_.size(); }
  std::size_t num_labels() const { return labels_.size(); }
  std::size_t num_hypotheses() const { return hypotheses_.size(); }

  const std::string& example_name(ExampleIndex x) const { return examples_[x]; }
  const std::string& label_name(LabelIndex y) const { return labels_[y]; }
  const Hypothesis& hypothesis(HypothesisIndex h) const {
    return hypotheses_[h];
  }
  const std::vector<std::string>& examples() const { return examples_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Hypothesis>& hypotheses() const { return hypotheses_; }

  LabelIndex label_of(HypothesisIndex h, ExampleIndex x) const {
    return hypotheses_[h].labels[x];
  }

  // 1(h(x) = y) for every h, as doubles so it can feed the dot kernels.
  std::span<const double> indicator(ExampleIndex x, LabelIndex y) const;

  // True when h1 and h2 agree on every example of `examples`.
  bool agree_on(HypothesisIndex h1, HypothesisIndex h2,
                std::span<const ExampleIndex> examples) const;

  // Name lookups; throw InputError when absent.
  ExampleIndex find_example(std::string_view name) const;
  LabelIndex find_label(std::string_view name) const;
  HypothesisIndex find_hypothesis(std::string_view id) const;

  void check_example(ExampleIndex x) const;
  void check_label(LabelIndex y) const;
  void check_hypothesis(HypothesisIndex h) const;

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.examples_ == b.examples_ && a.labels_ == b.labels_ &&
           a.hypotheses_ == b.hypotheses_;
  }

 private:
  std::vector<std::string> examples_;
  std::vector<std::string> labels_;
  std::vector<Hypothesis> hypotheses_;
  // [(x * |Y| + y) * |H| + h]
  std::vector<double> indicators_;
};

// Probability vector over an instance's hypotheses. Also used for
// posteriors.
class Prior {
 public:
  // Throws InputError unless entries are >= 0 and sum to 1 within
  // kNormTolerance.
  explicit Prior(std::vector<double> probs);

  // Renormalizes nonnegative weights; throws InputError on zero total.
  static Prior from_weights(std::vector<double> weights);
  static Prior uniform(std::size_t n);
  static Prior point_mass(std::size_t n, HypothesisIndex h);

  std::size_t size() const { return probs_.size(); }
  double operator[](HypothesisIndex h) const { return probs_[h]; }
  std::span<const double> probs() const { return probs_; }

  std::size_t support_size() const;
  // Smallest strictly positive entry.
  double min_positive() const;
  // Smallest entry over all hypotheses (may be zero).
  double min_entry() const;

  friend bool operator==(const Prior&, const Prior&) = default;

 private:
  std::vector<double> probs_;
};

struct Observation {
  ExampleIndex example;
  LabelIndex label;
  friend bool operator==(const Observation&, const Observation&) = default;
};

// Ordered observations with distinct examples.
using LabeledSet = std::vector<Observation>;

// Throws InputError on unknown indices or repeated examples.
void validate_labeled_set(const Instance& inst, const LabeledSet& d);

// Per-example label distribution: probs[x * num_labels + y] = P[y | x].
struct Predictor {
  std::vector<double> probs;
};

// Weighted list of probabilistic models.
class ModelEnsemble {
 public:
  struct Member {
    double weight;
    Predictor predictor;
  };

  ModelEnsemble(std::size_t num_examples, std::size_t num_labels,
                std::vector<Member> members);

  std::size_t num_examples() const { return num_examples_; }
  std::size_t num_labels() const { return num_labels_; }
  const std::vector<Member>& members() const { return members_; }

  double predict(std::size_t member, ExampleIndex x, LabelIndex y) const {
    return members_[member].predictor.probs[x * num_labels_ + y];
  }

 private:
  std::size_t num_examples_;
  std::size_t num_labels_;
  std::vector<Member> members_;
};

// p[y; S]: probability that the examples S carry label sequence y.
double label_seq_prob(const Prior& p, const Instance& inst,
                      std::span<const ExampleIndex> examples,
                      std::span<const LabelIndex> labels);

// p[y; x]
double label_prob(const Prior& p, const Instance& inst, ExampleIndex x,
                  LabelIndex y);

// Bayes update with a single observation. Throws EmptyVersionSpaceError if
// no consistent hypothesis has positive mass.
Prior condition(const Prior& p, const Instance& inst, ExampleIndex x,
                LabelIndex y);

// Bayes update with a labeled set; inconsistent hypotheses get 0.
Prior posterior(const Prior& p, const Instance& inst, const LabeledSet& d);

// sum_h |p[h] - q[h]|
double l1_distance(const Prior& p, const Prior& q);

// Prior over labelings induced by a prior over probabilistic models.
Prior induce_prior(const ModelEnsemble& ens, const Instance& inst);

// Random prior within l1 distance `radius` of p, deterministic in `seed`.
Prior perturb(const Prior& p, double radius, std::uint64_t seed);

// Flat (Dirichlet(1,...,1)) random point of the simplex.
Prior random_prior(std::size_t n, std::mt19937_64& rng);

// Instance file: `examples,...` / `labels,...` / `h,<id>,<prob>,<labels...>`.
struct InstanceWithPrior {
  Instance instance;
  Prior prior;
};

InstanceWithPrior read_instance(std::istream& in);
InstanceWithPrior load_instance_file(const std::string& path);
void write_instance(std::ostream& out, const Instance& inst, const Prior& p);

// Shortest decimal that round-trips.
std::string format_double(double v);

}  // namespace alrobust

#endif  // ALROBUST_CORE_HPP_
