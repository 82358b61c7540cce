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

#include "alrobust/optimal.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "alrobust/errors.hpp"

namespace alrobust {
namespace {

using Mask = std::uint64_t;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct StateKey {
  Mask consistent;
  Mask available;
  bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const {
    return std::hash<Mask>{}(k.consistent * 0x9e3779b97f4a7c15ULL ^
                             (k.available + 0x632be59bd9b4e019ULL));
  }
};

void check_caps(const Instance& inst, const OptCaps& caps) {
  if (caps.max_examples > 64 || caps.max_hypotheses > 64) {
    throw InputError("oracle caps above 64 are not supported");
  }
  if (inst.num_examples() > caps.max_examples) {
    throw SizeError("oracle: " + std::to_string(inst.num_examples()) +
                    " examples exceeds the cap of " +
                    std::to_string(caps.max_examples));
  }
  if (inst.num_hypotheses() > caps.max_hypotheses) {
    throw SizeError("oracle: " + std::to_string(inst.num_hypotheses()) +
                    " hypotheses exceeds the cap of " +
                    std::to_string(caps.max_hypotheses));
  }
}

std::vector<Mask> label_masks(const Instance& inst) {
  std::vector<Mask> masks(inst.num_examples() * inst.num_labels(), 0);
  for (std::size_t h = 0; h < inst.num_hypotheses(); ++h) {
    for (std::size_t x = 0; x < inst.num_examples(); ++x) {
      masks[x * inst.num_labels() + inst.label_of(h, x)] |= Mask{1} << h;
    }
  }
  return masks;
}

std::vector<ExampleIndex> members(Mask m) {
  std::vector<ExampleIndex> out;
  while (m != 0) {
    out.push_back(static_cast<ExampleIndex>(std::countr_zero(m)));
    m &= m - 1;
  }
  return out;
}

enum class Objective { kAverage, kWorst };

// Exhaustive search over adaptive (or batch) query policies of a fixed
// budget for the expected or worst-case utility.
class CoverageSearch {
 public:
  CoverageSearch(const Prior& p, const Utility& u, const Instance& inst,
                 std::size_t budget, const OptOptions& options,
                 Objective objective)
      : p_(p),
        u_(u),
        inst_(inst),
        budget_(budget),
        options_(options),
        objective_(objective),
        masks_(label_masks(inst)),
        all_examples_(inst.num_examples() == 64
                          ? ~Mask{0}
                          : (Mask{1} << inst.num_examples()) - 1) {}

  OptResult run() {
    const Mask all_h = inst_.num_hypotheses() == 64
                           ? ~Mask{0}
                           : (Mask{1} << inst_.num_hypotheses()) - 1;
    OptResult result;
    result.value = value(all_h, all_examples_);
    result.nodes_explored = explored_;
    result.policy = PolicyTree(inst_.num_labels());
    build(result.policy, all_h, all_examples_);
    return result;
  }

 private:
  double empty_value() const {
    return objective_ == Objective::kAverage ? 0.0 : kInf;
  }

  std::size_t remaining(Mask available) const {
    const std::size_t queried =
        inst_.num_examples() - static_cast<std::size_t>(std::popcount(available));
    return budget_ - queried;
  }

  double leaf_value(Mask consistent, Mask available) const {
    const auto queried = members(all_examples_ & ~available);
    double acc = objective_ == Objective::kAverage ? 0.0 : kInf;
    for (HypothesisIndex h : members(consistent)) {
      if (objective_ == Objective::kAverage) {
        if (p_[h] == 0.0) continue;
        acc += p_[h] * eval_utility(u_, p_, inst_, queried, h);
      } else {
        acc = std::min(acc, eval_utility(u_, p_, inst_, queried, h));
      }
    }
    return acc;
  }

  double value(Mask consistent, Mask available) {
    if (consistent == 0) return empty_value();
    if (remaining(available) == 0 || available == 0) {
      return leaf_value(consistent, available);
    }
    const StateKey key{consistent, available};
    if (options_.memoize) {
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    ++explored_;
    const auto candidates = members(available);
    const std::size_t block =
        std::min({std::max<std::size_t>(options_.batch_size, 1),
                  remaining(available), candidates.size()});
    double best = -kInf;
    std::vector<ExampleIndex> best_block;
    std::vector<ExampleIndex> current;
    // Blocks enumerated in lexicographic order of ascending example lists.
    std::function<void(std::size_t)> enumerate = [&](std::size_t start) {
      if (current.size() == block) {
        Mask rest = available;
        for (ExampleIndex x : current) rest &= ~(Mask{1} << x);
        const double v = block_value(consistent, current, 0, rest);
        if (best_block.empty() || v > best + kTieTolerance) {
          best = v;
          best_block = current;
        }
        return;
      }
      for (std::size_t i = start; i < candidates.size(); ++i) {
        current.push_back(candidates[i]);
        enumerate(i + 1);
        current.pop_back();
      }
    };
    enumerate(0);
    choice_[key] = best_block;
    if (options_.memoize) memo_[key] = best;
    return best;
  }

  double block_value(Mask consistent, const std::vector<ExampleIndex>& block,
                     std::size_t i, Mask rest) {
    if (i == block.size()) return value(consistent, rest);
    const ExampleIndex x = block[i];
    double acc = objective_ == Objective::kAverage ? 0.0 : kInf;
    for (LabelIndex y = 0; y < inst_.num_labels(); ++y) {
      const Mask branch = consistent & masks_[x * inst_.num_labels() + y];
      if (branch == 0) continue;
      const double v = block_value(branch, block, i + 1, rest);
      if (objective_ == Objective::kAverage) {
        acc += v;
      } else {
        acc = std::min(acc, v);
      }
    }
    return acc;
  }

  std::int32_t build(PolicyTree& tree, Mask consistent, Mask available) {
    if (consistent == 0 || available == 0 || remaining(available) == 0) {
      return PolicyTree::kLeaf;
    }
    const auto& block = choice_.at(StateKey{consistent, available});
    Mask rest = available;
    for (ExampleIndex x : block) rest &= ~(Mask{1} << x);
    return build_chain(tree, consistent, block, 0, rest);
  }

  std::int32_t build_chain(PolicyTree& tree, Mask consistent,
                           const std::vector<ExampleIndex>& block,
                           std::size_t i, Mask rest) {
    const ExampleIndex x = block[i];
    const std::int32_t node = tree.add_node(x);
    for (LabelIndex y = 0; y < inst_.num_labels(); ++y) {
      const Mask branch = consistent & masks_[x * inst_.num_labels() + y];
      if (branch == 0) continue;
      const std::int32_t child =
          i + 1 < block.size() ? build_chain(tree, branch, block, i + 1, rest)
                               : build(tree, branch, rest);
      tree.set_child(node, y, child);
    }
    return node;
  }

  const Prior& p_;
  const Utility& u_;
  const Instance& inst_;
  std::size_t budget_;
  OptOptions options_;
  Objective objective_;
  std::vector<Mask> masks_;
  Mask all_examples_;
  std::unordered_map<StateKey, double, StateKeyHash> memo_;
  std::unordered_map<StateKey, std::vector<ExampleIndex>, StateKeyHash>
      choice_;
  std::size_t explored_ = 0;
};

// Dynamic program over positive-probability version spaces for the
// minimum expected number of queries to identification.
class MinCostSearch {
 public:
  MinCostSearch(const Prior& p, const Instance& inst, const OptOptions& options)
      : p_(p), inst_(inst), options_(options), masks_(label_masks(inst)) {}

  OptResult run() {
    Mask support = 0;
    for (std::size_t h = 0; h < inst_.num_hypotheses(); ++h) {
      if (p_[h] > 0.0) support |= Mask{1} << h;
    }
    const Mask all_x = inst_.num_examples() == 64
                           ? ~Mask{0}
                           : (Mask{1} << inst_.num_examples()) - 1;
    OptResult result;
    result.value = weighted_cost(support, all_x);
    result.nodes_explored = explored_;
    result.policy = PolicyTree(inst_.num_labels());
    build(result.policy, support, all_x);
    return result;
  }

 private:
  double mass(Mask m) const {
    double s = 0.0;
    for (HypothesisIndex h : members(m)) s += p_[h];
    return s;
  }

  // Sum over h in `consistent` of p[h] times the remaining path length.
  double weighted_cost(Mask consistent, Mask available) {
    if (std::popcount(consistent) <= 1) return 0.0;
    const StateKey key{consistent, available};
    if (options_.memoize) {
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    ++explored_;
    double best = kInf;
    std::int64_t best_x = -1;
    for (ExampleIndex x : members(available)) {
      int nonempty = 0;
      for (LabelIndex y = 0; y < inst_.num_labels(); ++y) {
        nonempty += (consistent & masks_[x * inst_.num_labels() + y]) != 0;
      }
      if (nonempty < 2) continue;  // does not split the version space
      const Mask rest = available & ~(Mask{1} << x);
      double v = mass(consistent);
      for (LabelIndex y = 0; y < inst_.num_labels(); ++y) {
        const Mask branch = consistent & masks_[x * inst_.num_labels() + y];
        if (branch != 0) v += weighted_cost(branch, rest);
      }
      if (best_x < 0 || v < best - kTieTolerance) {
        best = v;
        best_x = static_cast<std::int64_t>(x);
      }
    }
    if (best_x < 0) {
      const auto hs = members(consistent);
      throw ContractError("hypotheses '" + inst_.hypothesis(hs[0]).id +
                          "' and '" + inst_.hypothesis(hs[1]).id +
                          "' cannot be separated");
    }
    choice_[key] = static_cast<ExampleIndex>(best_x);
    if (options_.memoize) memo_[key] = best;
    return best;
  }

  std::int32_t build(PolicyTree& tree, Mask consistent, Mask available) {
    if (std::popcount(consistent) <= 1) return PolicyTree::kLeaf;
    const ExampleIndex x = choice_.at(StateKey{consistent, available});
    const Mask rest = available & ~(Mask{1} << x);
    const std::int32_t node = tree.add_node(x);
    for (LabelIndex y = 0; y < inst_.num_labels(); ++y) {
      const Mask branch = consistent & masks_[x * inst_.num_labels() + y];
      tree.set_child(node, y, build(tree, branch, rest));
    }
    return node;
  }

  const Prior& p_;
  const Instance& inst_;
  OptOptions options_;
  std::vector<Mask> masks_;
  std::unordered_map<StateKey, double, StateKeyHash> memo_;
  std::unordered_map<StateKey, ExampleIndex, StateKeyHash> choice_;
  std::size_t explored_ = 0;
};

void check_inputs(const Prior& p, const Instance& inst) {
  if (p.size() != inst.num_hypotheses()) {
    throw InputError("prior dimension does not match the instance");
  }
}

void check_budget(std::size_t budget, const Instance& inst,
                  const OptCaps& caps) {
  if (budget < 1 || budget > inst.num_examples()) {
    throw InputError("budget must lie in [1, " +
                     std::to_string(inst.num_examples()) + "]");
  }
  if (budget > caps.max_budget) {
    throw SizeError("oracle: budget " + std::to_string(budget) +
                    " exceeds the cap of " + std::to_string(caps.max_budget));
  }
}

}  // namespace

double f_avg(const Prior& p, const Utility& u, const Instance& inst,
             const PolicyTree& policy) {
  check_inputs(p, inst);
  double total = 0.0;
  for (std::size_t h = 0; h < inst.num_hypotheses(); ++h) {
    if (p[h] == 0.0) continue;
    const PolicyRun run = run_policy(policy, inst, h);
    total += p[h] * eval_utility(u, p, inst, run.queried, h);
  }
  return total;
}

double f_worst(const Prior& p, const Utility& u, const Instance& inst,
               const PolicyTree& policy) {
  check_inputs(p, inst);
  double worst = kInf;
  for (std::size_t h = 0; h < inst.num_hypotheses(); ++h) {
    const PolicyRun run = run_policy(policy, inst, h);
    worst = std::min(worst, eval_utility(u, p, inst, run.queried, h));
  }
  return worst;
}

double c_avg(const Prior& p, const Instance& inst, const PolicyTree& policy) {
  check_inputs(p, inst);
  double total = 0.0;
  for (std::size_t h = 0; h < inst.num_hypotheses(); ++h) {
    if (p[h] == 0.0) continue;
    const PolicyRun run = run_policy(policy, inst, h);
    for (std::size_t g = 0; g < inst.num_hypotheses(); ++g) {
      if (g != h && p[g] > 0.0 && inst.agree_on(g, h, run.queried)) {
        throw ContractError("policy does not separate '" +
                            inst.hypothesis(h).id + "' from '" +
                            inst.hypothesis(g).id + "'");
      }
    }
    total += p[h] * static_cast<double>(run.cost);
  }
  return total;
}

OptResult opt_avg(const Prior& p, const Utility& u, const Instance& inst,
                  std::size_t budget, const OptOptions& options) {
  check_inputs(p, inst);
  check_caps(inst, options.caps);
  check_budget(budget, inst, options.caps);
  return CoverageSearch(p, u, inst, budget, options, Objective::kAverage)
      .run();
}

OptResult opt_worst(const Prior& p, const Utility& u, const Instance& inst,
                    std::size_t budget, const OptOptions& options) {
  check_inputs(p, inst);
  check_caps(inst, options.caps);
  check_budget(budget, inst, options.caps);
  return CoverageSearch(p, u, inst, budget, options, Objective::kWorst).run();
}

OptResult opt_min_cost(const Prior& p, const Instance& inst,
                       const OptOptions& options) {
  check_inputs(p, inst);
  check_caps(inst, options.caps);
  return MinCostSearch(p, inst, options).run();
}

void write_opt_result(std::ostream& out, const OptResult& result,
                      const Instance& inst) {
  out << "value=" << format_double(result.value) << '\n';
  write_policy(out, result.policy, inst);
}

}  // namespace alrobust
