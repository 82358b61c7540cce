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

#include "alrobust/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "alrobust/errors.hpp"
#include "alrobust/synthetic.hpp"

namespace alrobust {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                          std::uint64_t b = 0) {
  return splitmix64(splitmix64(splitmix64(base) ^ a) ^ (b + 0x51ed27ULL));
}

BoundReport utility_report(std::string name, double lhs, double rhs) {
  BoundReport r;
  r.bound = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = lhs - rhs;
  r.holds = r.slack >= -kBoundTolerance;
  return r;
}

BoundReport cost_report(std::string name, double lhs, double rhs) {
  BoundReport r;
  r.bound = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.holds = r.slack >= -kBoundTolerance;
  return r;
}

void check_same_instance(const Instance& inst, const Prior& p0,
                         const Prior& p1) {
  if (p0.size() != inst.num_hypotheses() ||
      p1.size() != inst.num_hypotheses()) {
    throw InputError("prior dimension does not match the instance");
  }
}

LipschitzConstants require_lipschitz(const Utility& u) {
  auto lc = lipschitz_constant(u);
  if (!lc.lipschitz || !lc.bound) {
    throw ContractError("utility '" + u.name() +
                        "' is not Lipschitz in the prior; robustness bounds "
                        "do not apply (see counterexample_instance)");
  }
  return lc;
}

// Sweep instance shape drawn from the config.
struct SweepInstance {
  InstanceWithPrior data;
  std::size_t budget;
  std::uint64_t seed;
  std::uint64_t sweep_seed;
};

SweepInstance draw_instance(const SweepConfig& config, std::size_t index,
                            std::uint64_t stream) {
  const std::uint64_t seed = derive_seed(config.seed, stream, index);
  std::mt19937_64 rng(seed);
  const std::size_t nx = std::uniform_int_distribution<std::size_t>(
      config.min_examples, config.max_examples)(rng);
  const double labelings = std::pow(static_cast<double>(config.num_labels),
                                    static_cast<double>(nx));
  const std::size_t max_h = static_cast<std::size_t>(
      std::min(static_cast<double>(config.max_hypotheses), labelings));
  const std::size_t nh =
      std::uniform_int_distribution<std::size_t>(2, std::max<std::size_t>(2, max_h))(rng);
  const std::size_t budget = std::uniform_int_distribution<std::size_t>(
      1, std::min(config.max_budget, nx))(rng);
  return {random_instance(nx, nh, config.num_labels, rng()), budget, seed,
          config.seed};
}

void tag(BoundReport& r, const SweepInstance& si, std::size_t index,
         double radius) {
  r.parameters.emplace_back("sweep_seed", static_cast<double>(si.sweep_seed));
  r.parameters.emplace_back("instance", static_cast<double>(index));
  r.parameters.emplace_back("examples",
                            static_cast<double>(si.data.instance.num_examples()));
  r.parameters.emplace_back(
      "hypotheses", static_cast<double>(si.data.instance.num_hypotheses()));
  r.parameters.emplace_back("radius", radius);
}

OptOptions sweep_opt_options(const SweepConfig& config) {
  OptOptions o;
  o.caps.max_examples = std::max<std::size_t>(o.caps.max_examples,
                                              config.max_examples);
  o.caps.max_hypotheses = std::max<std::size_t>(o.caps.max_hypotheses,
                                                config.max_hypotheses);
  o.caps.max_budget = std::max<std::size_t>(o.caps.max_budget,
                                            config.max_budget);
  return o;
}

PolicyTree single_query_policy(const Instance& inst, ExampleIndex x) {
  PolicyTree t(inst.num_labels());
  t.add_node(x);
  return t;
}

}  // namespace

double greedy_alpha() { return 1.0 - 1.0 / std::numbers::e; }

double batch_alpha() {
  return 1.0 - std::exp(-(std::numbers::e - 1.0) / std::numbers::e);
}

double gbs_alpha(const Prior& p) { return std::log(1.0 / p.min_positive()) + 1.0; }

double BoundReport::parameter(const std::string& name) const {
  for (const auto& [k, v] : parameters) {
    if (k == name) return v;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

PolicyAlgorithm greedy_algorithm(Criterion criterion, const Instance& inst,
                                 std::size_t budget) {
  return [criterion = std::move(criterion), &inst, budget](const Prior& p) {
    return build_policy(criterion, p, inst, budget);
  };
}

PolicyAlgorithm batch_algorithm(const Instance& inst, std::size_t budget,
                                std::size_t batch_size) {
  return [&inst, budget, batch_size](const Prior& p) {
    return build_batch_policy(p, inst, budget, batch_size);
  };
}

PolicyAlgorithm gbs_algorithm(const Instance& inst) {
  return [&inst](const Prior& p) { return build_gbs_min_cost(p, inst); };
}

MinCostAlgorithm gbs_min_cost_algorithm(const Instance& inst) {
  return {"gbs", gbs_algorithm(inst), gbs_alpha, true};
}

BoundReport check_avg_bound(const Instance& inst, const Prior& p0,
                            const Prior& p1, const Utility& u,
                            const PolicyAlgorithm& algorithm, double alpha,
                            std::size_t budget,
                            const OptOptions& opt_options) {
  const auto lc = require_lipschitz(u);
  check_same_instance(inst, p0, p1);
  const PolicyTree policy = algorithm(p1);
  const double lhs = f_avg(p0, u, inst, policy);
  const double opt = opt_avg(p0, u, inst, budget, opt_options).value;
  const double l1 = l1_distance(p0, p1);
  const double c = (alpha + 1.0) * (*lc.lipschitz + *lc.bound);
  BoundReport r = utility_report("avg", lhs, alpha * opt - c * l1);
  r.parameters = {{"alpha", alpha}, {"L", *lc.lipschitz}, {"M", *lc.bound},
                  {"l1", l1},       {"opt", opt},         {"budget", static_cast<double>(budget)}};
  return r;
}

BoundReport check_worst_bound(const Instance& inst, const Prior& p0,
                              const Prior& p1, const Utility& u,
                              const PolicyAlgorithm& algorithm, double alpha,
                              std::size_t budget,
                              const OptOptions& opt_options) {
  const auto lc = require_lipschitz(u);
  check_same_instance(inst, p0, p1);
  const PolicyTree policy = algorithm(p1);
  const double lhs = f_worst(p0, u, inst, policy);
  const double opt = opt_worst(p0, u, inst, budget, opt_options).value;
  const double l1 = l1_distance(p0, p1);
  const double c = (alpha + 1.0) * *lc.lipschitz;
  BoundReport r = utility_report("worst", lhs, alpha * opt - c * l1);
  r.parameters = {{"alpha", alpha}, {"L", *lc.lipschitz}, {"l1", l1},
                  {"opt", opt},     {"budget", static_cast<double>(budget)}};
  return r;
}

BoundReport check_mincost_bound(const Instance& inst, const Prior& p0,
                                const Prior& p1,
                                const PolicyAlgorithm& algorithm,
                                double alpha_of_p1,
                                std::optional<double> cost_cap,
                                const OptOptions& opt_options) {
  check_same_instance(inst, p0, p1);
  for (std::size_t h = 0; h < p0.size(); ++h) {
    if (p0[h] > 0.0 && p1[h] == 0.0) {
      throw InputError(
          "perturbed prior gives zero mass to '" + inst.hypothesis(h).id +
          "', which the true prior supports; the expected-cost bound needs "
          "supp(p1) to contain supp(p0), otherwise the cost of using the "
          "perturbed prior is unbounded relative to the truth");
    }
  }
  const double cap =
      cost_cap.value_or(static_cast<double>(inst.num_examples()));
  const PolicyTree policy = algorithm(p1);
  const double lhs = c_avg(p0, inst, policy);
  const double opt = opt_min_cost(p0, inst, opt_options).value;
  const double l1 = l1_distance(p0, p1);
  BoundReport r = cost_report(
      "mincost", lhs, alpha_of_p1 * opt + (alpha_of_p1 + 1.0) * cap * l1);
  r.parameters = {{"alpha", alpha_of_p1},
                  {"K", cap},
                  {"l1", l1},
                  {"opt", opt},
                  {"min_p1", p1.min_positive()}};
  return r;
}

Prior uniform_mixture(const std::vector<Prior>& components) {
  if (components.empty()) throw InputError("mixture has no components");
  const std::size_t n = components.front().size();
  const double k = static_cast<double>(components.size());
  std::vector<double> flat(n, 0.0);
  for (const auto& c : components) {
    if (c.size() != n) throw InputError("mixture components differ in size");
    for (std::size_t h = 0; h < n; ++h) flat[h] += c[h];
  }
  for (double& v : flat) v /= k;
  return Prior(std::move(flat));
}

std::vector<BoundReport> MixtureBoundReports::all() const {
  std::vector<BoundReport> out{versus_mixture_optimum, versus_true_optimum};
  if (versus_mixture_optimum_gbs) out.push_back(*versus_mixture_optimum_gbs);
  if (versus_true_optimum_gbs) out.push_back(*versus_true_optimum_gbs);
  return out;
}

MixtureBoundReports check_mixture_bounds(const Instance& inst,
                                         const std::vector<Prior>& components,
                                         std::size_t true_index,
                                         const MinCostAlgorithm& algorithm,
                                         const OptOptions& opt_options) {
  if (true_index >= components.size()) {
    throw InputError("true component index out of range");
  }
  const Prior& p0 = components[true_index];
  check_same_instance(inst, p0, p0);
  const Prior p1 = uniform_mixture(components);
  const double k = static_cast<double>(components.size());
  const PolicyTree policy = algorithm.build(p1);
  const double lhs = c_avg(p0, inst, policy);
  const double alpha = algorithm.alpha(p1);
  const double opt_mix = opt_min_cost(p1, inst, opt_options).value;
  const double opt_true = opt_min_cost(p0, inst, opt_options).value;
  const double min_p0 = p0.min_entry();
  // (k - 1) / min p0 + 1, infinite when p0 leaves some hypothesis at zero.
  const double spread =
      components.size() == 1 ? 1.0 : (min_p0 > 0.0 ? (k - 1.0) / min_p0 + 1.0 : kInf);
  auto times = [](double factor, double value) {
    return std::isinf(factor) ? kInf : factor * value;
  };
  auto params = [&](double a) {
    return std::vector<std::pair<std::string, double>>{
        {"alpha", a},        {"k", k},
        {"min_p0", min_p0},  {"opt_mixture", opt_mix},
        {"opt_true", opt_true}, {"true_index", static_cast<double>(true_index)}};
  };
  MixtureBoundReports out{
      cost_report("mixture_vs_mixture_opt", lhs, times(k * alpha, opt_mix)),
      cost_report("mixture_vs_true_opt", lhs, times(alpha * spread, opt_true)),
      std::nullopt, std::nullopt};
  out.versus_mixture_optimum.parameters = params(alpha);
  out.versus_true_optimum.parameters = params(alpha);
  if (algorithm.generalized_binary_search) {
    const double alpha_gbs = min_p0 > 0.0 ? std::log(k / min_p0) + 1.0 : kInf;
    out.versus_mixture_optimum_gbs = cost_report(
        "mixture_vs_mixture_opt_gbs", lhs, times(k * alpha_gbs, opt_mix));
    out.versus_true_optimum_gbs =
        cost_report("mixture_vs_true_opt_gbs", lhs,
                    times(alpha_gbs * spread, opt_true));
    out.versus_mixture_optimum_gbs->parameters = params(alpha_gbs);
    out.versus_true_optimum_gbs->parameters = params(alpha_gbs);
  }
  return out;
}

bool Counterexample::violates(double c, double alpha) const {
  return f_p0_query_x1 < alpha * opt_p0 - c * l1;
}

Counterexample counterexample_instance(double delta, double mu,
                                       CoverageMode mode) {
  if (!(mu >= 0.0)) throw InputError("mu must be >= 0");
  if (mode == CoverageMode::kAverage && mu != 0.0) {
    throw InputError("the average-case construction requires mu = 0");
  }
  if (!(delta > 0.0 && delta < 0.25 - mu / 2.0)) {
    throw InputError("delta must satisfy 0 < delta < 1/4 - mu/2");
  }
  Instance inst = Instance::all_labelings({"x0", "x1"}, {"0", "1"});
  Prior p0({0.5 - mu, 0.5 - mu, mu, mu});
  Prior p1({0.5 - mu - delta, 0.5 - mu - delta, mu + delta, mu + delta});
  const Utility u = Utility::pruning_count(mu);
  PolicyTree q0 = single_query_policy(inst, 0);
  PolicyTree q1 = single_query_policy(inst, 1);
  auto eval = [&](const Prior& p, const PolicyTree& t) {
    return mode == CoverageMode::kAverage ? f_avg(p, u, inst, t)
                                          : f_worst(p, u, inst, t);
  };
  auto opt = [&](const Prior& p) {
    return mode == CoverageMode::kAverage ? opt_avg(p, u, inst, 1).value
                                          : opt_worst(p, u, inst, 1).value;
  };
  Counterexample ce{inst, p0, p1, mode, delta, mu, q0, q1,
                    0.0, 0.0, 0.0, 0.0, 0.0, 0.0, false};
  ce.f_p1_query_x0 = eval(p1, q0);
  ce.f_p1_query_x1 = eval(p1, q1);
  ce.f_p0_query_x1 = eval(p0, q1);
  ce.f_p0_query_x0 = eval(p0, q0);
  ce.l1 = l1_distance(p0, p1);
  ce.opt_p0 = opt(p0);
  ce.query_x1_optimal_for_p1 = ce.f_p1_query_x1 >= opt(p1) - kBoundTolerance;
  return ce;
}

std::vector<BoundReport> sweep_approximation(const SweepConfig& config) {
  std::vector<BoundReport> out;
  const OptOptions opt = sweep_opt_options(config);
  const Utility vsr = Utility::version_space_reduction();
  for (std::size_t i = 0; i < config.instances; ++i) {
    const SweepInstance si = draw_instance(config, i, 1);
    const auto& inst = si.data.instance;
    const auto& p0 = si.data.prior;
    auto a = check_avg_bound(inst, p0, p0, vsr,
                             greedy_algorithm(Criterion::max_gibbs(), inst, si.budget),
                             greedy_alpha(), si.budget, opt);
    a.bound = "approx_avg_max_gibbs";
    tag(a, si, i, 0.0);
    out.push_back(std::move(a));
    auto w = check_worst_bound(
        inst, p0, p0, vsr,
        greedy_algorithm(Criterion::least_confidence(), inst, si.budget),
        greedy_alpha(), si.budget, opt);
    w.bound = "approx_worst_least_confidence";
    tag(w, si, i, 0.0);
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<BoundReport> robustness_checks(const Instance& inst,
                                           const Prior& p0, std::size_t budget,
                                           double radius, std::uint64_t seed,
                                           const OptOptions& opt) {
  const Utility vsr = Utility::version_space_reduction();
  const Utility generalized =
      Utility::generalized(LossMatrix::zero_one(inst.num_hypotheses()));
  OptOptions batch_opt = opt;
  batch_opt.batch_size = budget;
  std::vector<BoundReport> out;
  auto push = [&](BoundReport rep, std::string name) {
    rep.bound = std::move(name);
    out.push_back(std::move(rep));
  };
  const Prior p1 = perturb(p0, radius, seed);
  push(check_avg_bound(inst, p0, p1, vsr,
                       greedy_algorithm(Criterion::max_gibbs(), inst, budget),
                       greedy_alpha(), budget, opt),
       "avg_max_gibbs");
  push(check_avg_bound(inst, p0, p1, vsr, batch_algorithm(inst, budget, budget),
                       batch_alpha(), budget, batch_opt),
       "avg_batch_max_gibbs");
  push(check_worst_bound(
           inst, p0, p1, vsr,
           greedy_algorithm(Criterion::least_confidence(), inst, budget),
           greedy_alpha(), budget, opt),
       "worst_least_confidence");
  push(check_worst_bound(
           inst, p0, p1, generalized,
           greedy_algorithm(Criterion::worst_gen_gibbs(generalized.loss()),
                            inst, budget),
           greedy_alpha(), budget, opt),
       "worst_gen_gibbs");
  // The cost bound needs supp(p1) to cover supp(p0); clipping inside
  // perturb can drop hypotheses, so redraw until it does.
  auto covers = [&](const Prior& q) {
    for (std::size_t h = 0; h < p0.size(); ++h) {
      if (p0[h] > 0.0 && q[h] == 0.0) return false;
    }
    return true;
  };
  Prior q1 = p1;
  int redraws = 0;
  while (!covers(q1) && redraws < 1000) {
    ++redraws;
    q1 = perturb(p0, radius, derive_seed(seed, 0x5eed, redraws));
  }
  if (covers(q1)) {
    auto m = check_mincost_bound(inst, p0, q1, gbs_algorithm(inst),
                                 gbs_alpha(q1), std::nullopt, opt);
    m.parameters.emplace_back("redraws", redraws);
    push(std::move(m), "mincost_gbs");
  }
  return out;
}

std::vector<BoundReport> sweep_robustness(const SweepConfig& config) {
  std::vector<BoundReport> out;
  const OptOptions opt = sweep_opt_options(config);
  for (std::size_t i = 0; i < config.instances; ++i) {
    const SweepInstance si = draw_instance(config, i, 2);
    for (std::size_t r = 0; r < config.radii.size(); ++r) {
      const double radius = config.radii[r];
      auto reports =
          robustness_checks(si.data.instance, si.data.prior, si.budget, radius,
                            derive_seed(si.seed, 100 + r), opt);
      for (auto& rep : reports) {
        tag(rep, si, i, radius);
        out.push_back(std::move(rep));
      }
    }
  }
  return out;
}

std::vector<BoundReport> sweep_mixture(const SweepConfig& config) {
  std::vector<BoundReport> out;
  const OptOptions opt = sweep_opt_options(config);
  for (std::size_t i = 0; i < config.instances; ++i) {
    const SweepInstance si = draw_instance(config, i, 3);
    const auto& inst = si.data.instance;
    std::mt19937_64 rng(derive_seed(si.seed, 7));
    const std::size_t k = std::uniform_int_distribution<std::size_t>(
        1, std::max<std::size_t>(1, config.max_components))(rng);
    std::vector<Prior> components{si.data.prior};
    while (components.size() < k) {
      components.push_back(random_prior(inst.num_hypotheses(), rng));
    }
    const std::size_t true_index =
        std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
    std::swap(components[0], components[true_index]);
    const auto reports = check_mixture_bounds(
        inst, components, true_index, gbs_min_cost_algorithm(inst), opt);
    for (auto rep : reports.all()) {
      tag(rep, si, i, 0.0);
      out.push_back(std::move(rep));
    }
  }
  return out;
}

void write_report_header(std::ostream& out) {
  out << "bound,parameters,lhs,rhs,slack,holds\n";
}

void write_report_row(std::ostream& out, const BoundReport& report) {
  out << report.bound << ',';
  for (std::size_t i = 0; i < report.parameters.size(); ++i) {
    if (i) out << ';';
    out << report.parameters[i].first << '='
        << format_double(report.parameters[i].second);
  }
  out << ',' << format_double(report.lhs) << ',' << format_double(report.rhs)
      << ',' << format_double(report.slack) << ','
      << (report.holds ? "true" : "false") << '\n';
}

}  // namespace alrobust
