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

// Executable checks of the prior-misspecification bounds, the
// non-Lipschitz counterexample, and seeded sweeps over random instances.

#ifndef ALROBUST_ROBUSTNESS_HPP_
#define ALROBUST_ROBUSTNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "alrobust/core.hpp"
#include "alrobust/optimal.hpp"
#include "alrobust/policies.hpp"
#include "alrobust/utilities.hpp"

namespace alrobust {

// Approximation factors of the greedy algorithms.
double greedy_alpha();  // 1 - 1/e
double batch_alpha();   // 1 - exp(-(e - 1) / e)
// ln(1 / min_{h: p[h] > 0} p[h]) + 1
double gbs_alpha(const Prior& p);

struct BoundReport {
  std::string bound;
  double lhs = 0.0;
  double rhs = 0.0;
  // lhs - rhs for utility bounds, rhs - lhs for cost bounds.
  double slack = 0.0;
  bool holds = false;
  std::vector<std::pair<std::string, double>> parameters;

  // NaN when absent.
  double parameter(const std::string& name) const;
};

inline constexpr double kBoundTolerance = 1e-9;

using PolicyAlgorithm = std::function<PolicyTree(const Prior&)>;

PolicyAlgorithm greedy_algorithm(Criterion criterion, const Instance& inst,
                                 std::size_t budget);
PolicyAlgorithm batch_algorithm(const Instance& inst, std::size_t budget,
                                std::size_t batch_size);
PolicyAlgorithm gbs_algorithm(const Instance& inst);

// Expected utility under p0 of algorithm(p1) against
// alpha * opt_avg(p0) - (alpha + 1)(L + M) ||p1 - p0||.
// `opt_options.batch_size` > 1 restricts the optimum to batch policies.
BoundReport check_avg_bound(const Instance& inst, const Prior& p0,
                            const Prior& p1, const Utility& u,
                            const PolicyAlgorithm& algorithm, double alpha,
                            std::size_t budget,
                            const OptOptions& opt_options = {});

// Worst-case utility under p0 of algorithm(p1) against
// alpha * opt_worst(p0) - (alpha + 1) L ||p1 - p0||.
BoundReport check_worst_bound(const Instance& inst, const Prior& p0,
                              const Prior& p1, const Utility& u,
                              const PolicyAlgorithm& algorithm, double alpha,
                              std::size_t budget,
                              const OptOptions& opt_options = {});

// Expected cost under p0 of algorithm(p1) against
// alpha(p1) * opt_min_cost(p0) + (alpha(p1) + 1) K ||p1 - p0||.
// K defaults to |X|. Requires supp(p1) to contain supp(p0).
BoundReport check_mincost_bound(const Instance& inst, const Prior& p0,
                                const Prior& p1,
                                const PolicyAlgorithm& algorithm,
                                double alpha_of_p1,
                                std::optional<double> cost_cap = std::nullopt,
                                const OptOptions& opt_options = {});

struct MinCostAlgorithm {
  std::string name;
  PolicyAlgorithm build;
  std::function<double(const Prior&)> alpha;
  // Enables the specialized ln(k / min p0) + 1 forms.
  bool generalized_binary_search = false;
};

MinCostAlgorithm gbs_min_cost_algorithm(const Instance& inst);

// Uniform mixture of the components.
Prior uniform_mixture(const std::vector<Prior>& components);

struct MixtureBoundReports {
  BoundReport versus_mixture_optimum;
  BoundReport versus_true_optimum;
  std::optional<BoundReport> versus_mixture_optimum_gbs;
  std::optional<BoundReport> versus_true_optimum_gbs;

  std::vector<BoundReport> all() const;
};

// Bounds for the true prior p0 = components[true_index] when the algorithm
// is run on the uniform mixture of `components`.
MixtureBoundReports check_mixture_bounds(const Instance& inst,
                                         const std::vector<Prior>& components,
                                         std::size_t true_index,
                                         const MinCostAlgorithm& algorithm,
                                         const OptOptions& opt_options = {});

enum class CoverageMode { kAverage, kWorst };

// The two-example, four-labeling problem on which an exact algorithm for a
// nearby prior loses a constant amount of pruning-count utility.
struct Counterexample {
  Instance instance;
  Prior p0;
  Prior p1;
  CoverageMode mode;
  double delta;
  double mu;
  PolicyTree query_x0;  // optimal for p0
  PolicyTree query_x1;  // returned by the exact algorithm for p1
  double f_p1_query_x0;
  double f_p1_query_x1;
  double f_p0_query_x1;
  double f_p0_query_x0;
  double l1;
  double opt_p0;
  bool query_x1_optimal_for_p1;

  // True when f_p0(query_x1) < alpha * opt_p0 - c * l1.
  bool violates(double c, double alpha) const;
};

// Requires 0 < delta < 1/4 - mu/2; mode kAverage requires mu == 0.
Counterexample counterexample_instance(double delta, double mu,
                                       CoverageMode mode);

struct SweepConfig {
  std::size_t instances = 100;
  std::vector<double> radii = {0.05, 0.1, 0.3, 0.5};
  std::uint64_t seed = 1;
  std::size_t min_examples = 2;
  std::size_t max_examples = 4;
  std::size_t max_hypotheses = 8;
  std::size_t num_labels = 2;
  std::size_t max_budget = 2;
  std::size_t max_components = 4;
};

// Greedy versus exact optimum with the true prior (p1 = p0): max Gibbs error
// on expected version space reduction, least confidence on worst-case.
std::vector<BoundReport> sweep_approximation(const SweepConfig& config);

// The five perturbed-prior checks below for one (p0, radius) pair. p1 is
// perturb(p0, radius, seed); the cost check redraws p1 until its support
// covers supp(p0) and is skipped if that never happens.
std::vector<BoundReport> robustness_checks(const Instance& inst,
                                           const Prior& p0, std::size_t budget,
                                           double radius, std::uint64_t seed,
                                           const OptOptions& opt_options = {});

// Perturbed-prior bounds for max Gibbs error, batch max Gibbs error,
// least confidence, worst-case generalized Gibbs error (0-1 loss) and
// generalized binary search, for every (instance, radius) pair.
std::vector<BoundReport> sweep_robustness(const SweepConfig& config);

// Mixture bounds for generalized binary search with 1..max_components
// random components.
std::vector<BoundReport> sweep_mixture(const SweepConfig& config);

// CSV: bound,parameters,lhs,rhs,slack,holds
void write_report_header(std::ostream& out);
void write_report_row(std::ostream& out, const BoundReport& report);

}  // namespace alrobust

#endif  // ALROBUST_ROBUSTNESS_HPP_
