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

#include "alrobust/policies.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "alrobust/errors.hpp"
#include "alrobust/kernels.hpp"

namespace alrobust {
namespace {

std::vector<double> label_marginals(const Prior& p, const Instance& inst,
                                    ExampleIndex x) {
  std::vector<double> probs(inst.num_labels());
  for (LabelIndex y = 0; y < inst.num_labels(); ++y) {
    probs[y] = kernels::dot(p.probs(), inst.indicator(x, y));
  }
  return probs;
}

std::vector<ExampleIndex> sorted_copy(std::span<const ExampleIndex> xs) {
  std::vector<ExampleIndex> out(xs.begin(), xs.end());
  std::sort(out.begin(), out.end());
  return out;
}

// Worst-case one-step increase of the generalized version space reduction
// over labels with positive probability. The increase for label y is
// proportional to t_p({x}, y) = p^T L p - (p restricted to y)^T L (...).
double worst_generalized_gain(const Prior& p, const Instance& inst,
                              const LossMatrix& loss, ExampleIndex x) {
  const double total = kernels::quadratic_form(loss.values(), p.probs());
  double worst = std::numeric_limits<double>::infinity();
  std::vector<double> restricted(p.size());
  for (LabelIndex y = 0; y < inst.num_labels(); ++y) {
    auto ind = inst.indicator(x, y);
    if (!(kernels::dot(p.probs(), ind) > 0.0)) continue;
    for (std::size_t h = 0; h < restricted.size(); ++h) {
      restricted[h] = p[h] * ind[h];
    }
    worst = std::min(worst,
                     total - kernels::quadratic_form(loss.values(), restricted));
  }
  return worst;
}

Prior uniform_over(const std::vector<char>& members) {
  std::vector<double> w(members.size());
  for (std::size_t h = 0; h < w.size(); ++h) w[h] = members[h] ? 1.0 : 0.0;
  return Prior::from_weights(std::move(w));
}

std::size_t positive_count(const Prior& p) { return p.support_size(); }

// Chooses the next block of queries (one example for adaptive criteria).
using Chooser = std::function<std::vector<ExampleIndex>(
    const Prior&, std::span<const ExampleIndex>, std::size_t)>;

class TreeBuilder {
 public:
  TreeBuilder(const Instance& inst, BuildOptions options, Chooser chooser)
      : inst_(inst),
        options_(options),
        chooser_(std::move(chooser)),
        tree_(inst.num_labels()) {}

  PolicyTree build(const Prior& p, std::size_t budget) {
    std::vector<char> consistent(inst_.num_hypotheses(), 1);
    std::vector<ExampleIndex> available(inst_.num_examples());
    for (std::size_t x = 0; x < available.size(); ++x) available[x] = x;
    expand(p, consistent, available, budget, {});
    return std::move(tree_);
  }

 private:
  std::int32_t expand(const Prior& prior, const std::vector<char>& consistent,
                      const std::vector<ExampleIndex>& available,
                      std::size_t remaining,
                      std::vector<ExampleIndex> pending) {
    if (remaining == 0 || available.empty()) return PolicyTree::kLeaf;
    if (options_.stop_when_identified && positive_count(prior) <= 1) {
      return PolicyTree::kLeaf;
    }
    if (pending.empty()) pending = chooser_(prior, available, remaining);
    const ExampleIndex x = pending.front();
    pending.erase(pending.begin());

    const std::int32_t node = tree_.add_node(x);
    std::vector<ExampleIndex> rest;
    rest.reserve(available.size() - 1);
    for (ExampleIndex a : available) {
      if (a != x) rest.push_back(a);
    }
    for (LabelIndex y = 0; y < inst_.num_labels(); ++y) {
      auto ind = inst_.indicator(x, y);
      std::vector<char> branch(consistent);
      bool any = false;
      for (std::size_t h = 0; h < branch.size(); ++h) {
        branch[h] = branch[h] && ind[h] > 0.0;
        any = any || branch[h];
      }
      if (!any) continue;  // no labeling reaches this branch
      const double mass = kernels::dot(prior.probs(), ind);
      std::int32_t child = PolicyTree::kLeaf;
      if (mass > 0.0) {
        child = expand(condition(prior, inst_, x, y), branch, rest,
                       remaining - 1, pending);
      } else if (!options_.stop_when_identified) {
        child = expand(uniform_over(branch), branch, rest, remaining - 1,
                       pending);
      }
      tree_.set_child(node, y, child);
    }
    return node;
  }

  const Instance& inst_;
  BuildOptions options_;
  Chooser chooser_;
  PolicyTree tree_;
};

void check_budget(std::size_t budget, const Instance& inst) {
  if (budget < 1 || budget > inst.num_examples()) {
    throw InputError("budget must lie in [1, " +
                     std::to_string(inst.num_examples()) + "]");
  }
}

void check_prior(const Prior& p, const Instance& inst) {
  if (p.size() != inst.num_hypotheses()) {
    throw InputError("prior dimension does not match the instance");
  }
}

}  // namespace

// ---------------------------------------------------------------- Criterion

Criterion Criterion::worst_gen_gibbs(LossMatrix loss) {
  return Criterion(CriterionKind::kWorstGenGibbs,
                   std::make_shared<const LossMatrix>(std::move(loss)));
}

Criterion Criterion::parse(std::string_view name) {
  if (name == "max_gibbs") return max_gibbs();
  if (name == "least_confidence") return least_confidence();
  if (name == "max_entropy") return max_entropy();
  if (name == "gbs") return gbs();
  if (name == "worst_gen_gibbs") {
    throw InputError("worst_gen_gibbs needs a loss matrix");
  }
  throw InputError("unknown criterion '" + std::string(name) + "'");
}

const LossMatrix& Criterion::loss() const {
  if (!loss_) throw ContractError("criterion has no loss matrix");
  return *loss_;
}

std::string Criterion::name() const {
  switch (kind_) {
    case CriterionKind::kMaxGibbs:
      return "max_gibbs";
    case CriterionKind::kLeastConfidence:
      return "least_confidence";
    case CriterionKind::kMaxEntropy:
      return "max_entropy";
    case CriterionKind::kGbs:
      return "gbs";
    case CriterionKind::kWorstGenGibbs:
      return "worst_gen_gibbs";
  }
  return "unknown";
}

double marginal_score(CriterionKind kind, std::span<const double> probs) {
  switch (kind) {
    case CriterionKind::kMaxGibbs: {
      double sq = 0.0;
      for (double q : probs) sq += q * q;
      return 1.0 - sq;
    }
    case CriterionKind::kLeastConfidence:
      return -*std::max_element(probs.begin(), probs.end());
    case CriterionKind::kMaxEntropy: {
      double e = 0.0;
      for (double q : probs) {
        if (q > 0.0) e -= q * std::log(q);
      }
      return e;
    }
    case CriterionKind::kGbs:
      // Most even split of the version space.
      if (probs.size() == 2) return -std::fabs(probs[1] - probs[0]);
      return -*std::max_element(probs.begin(), probs.end());
    case CriterionKind::kWorstGenGibbs:
      break;
  }
  throw ContractError("criterion is not a function of label marginals");
}

std::size_t argmax_lowest(std::span<const double> scores) {
  if (scores.empty()) throw InputError("argmax of an empty score list");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best] + kTieTolerance) best = i;
  }
  return best;
}

ExampleIndex select(const Criterion& criterion, const Prior& p_d,
                    const Instance& inst,
                    std::span<const ExampleIndex> available) {
  if (available.empty()) throw InputError("no examples available to select");
  check_prior(p_d, inst);
  const auto candidates = sorted_copy(available);
  std::vector<double> scores(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    inst.check_example(candidates[i]);
    if (criterion.uses_marginals_only()) {
      scores[i] = marginal_score(criterion.kind(),
                                 label_marginals(p_d, inst, candidates[i]));
    } else {
      scores[i] = worst_generalized_gain(p_d, inst, criterion.loss(),
                                         candidates[i]);
    }
  }
  return candidates[argmax_lowest(scores)];
}

double joint_gibbs_error(const Prior& p, const Instance& inst,
                         std::span<const ExampleIndex> batch) {
  check_prior(p, inst);
  std::map<std::vector<LabelIndex>, double> groups;
  std::vector<LabelIndex> key(batch.size());
  for (std::size_t h = 0; h < inst.num_hypotheses(); ++h) {
    if (p[h] == 0.0) continue;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      key[i] = inst.label_of(h, batch[i]);
    }
    groups[key] += p[h];
  }
  double sq = 0.0;
  for (const auto& [labels, mass] : groups) sq += mass * mass;
  return 1.0 - sq;
}

std::vector<ExampleIndex> select_batch_max_gibbs(
    const Prior& p_d, const Instance& inst,
    std::span<const ExampleIndex> available, std::size_t batch_size) {
  if (batch_size < 1 || batch_size > available.size()) {
    throw InputError("batch size must lie in [1, " +
                     std::to_string(available.size()) + "]");
  }
  std::vector<ExampleIndex> pool = sorted_copy(available);
  std::vector<ExampleIndex> batch;
  while (batch.size() < batch_size) {
    std::vector<double> scores(pool.size());
    std::vector<ExampleIndex> trial(batch);
    trial.push_back(0);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      trial.back() = pool[i];
      scores[i] = joint_gibbs_error(p_d, inst, trial);
    }
    const std::size_t best = argmax_lowest(scores);
    batch.push_back(pool[best]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return batch;
}

// --------------------------------------------------------------- PolicyTree

std::int32_t PolicyTree::add_node(ExampleIndex x) {
  nodes_.push_back(Node{x, std::vector<std::int32_t>(num_labels_, kLeaf)});
  return static_cast<std::int32_t>(nodes_.size() - 1);
}

void PolicyTree::set_child(std::int32_t parent, LabelIndex y,
                           std::int32_t child) {
  nodes_.at(static_cast<std::size_t>(parent)).children.at(y) = child;
}

std::size_t PolicyTree::depth() const {
  if (nodes_.empty()) return 0;
  std::size_t best = 0;
  std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 1}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    for (std::int32_t c : nodes_[i].children) {
      if (c != kLeaf) stack.emplace_back(c, d + 1);
    }
  }
  return best;
}

bool operator==(const PolicyTree& a, const PolicyTree& b) {
  if (a.num_labels_ != b.num_labels_ || a.nodes_.size() != b.nodes_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
    if (a.nodes_[i].example != b.nodes_[i].example ||
        a.nodes_[i].children != b.nodes_[i].children) {
      return false;
    }
  }
  return true;
}

void validate_policy(const PolicyTree& tree, const Instance& inst,
                     std::size_t budget) {
  if (tree.num_labels() != inst.num_labels()) {
    throw ContractError("policy label count differs from the instance");
  }
  if (tree.empty()) return;
  std::vector<char> on_path(inst.num_examples(), 0);
  std::function<void(std::int32_t, std::size_t)> visit =
      [&](std::int32_t i, std::size_t depth) {
        const auto& node = tree.node(i);
        if (node.example >= inst.num_examples()) {
          throw ContractError("policy node queries an unknown example");
        }
        if (depth > budget) throw ContractError("policy exceeds the budget");
        if (node.children.size() != inst.num_labels()) {
          throw ContractError("policy node has the wrong number of children");
        }
        if (on_path[node.example]) {
          throw ContractError("policy re-queries example '" +
                              inst.example_name(node.example) + "'");
        }
        on_path[node.example] = 1;
        for (std::int32_t c : node.children) {
          if (c != PolicyTree::kLeaf) visit(c, depth + 1);
        }
        on_path[node.example] = 0;
      };
  visit(tree.root(), 1);
}

// ----------------------------------------------------------------- Building

PolicyTree build_policy(const Criterion& criterion, const Prior& p,
                        const Instance& inst, std::size_t budget,
                        BuildOptions options) {
  check_budget(budget, inst);
  check_prior(p, inst);
  TreeBuilder builder(
      inst, options,
      [&](const Prior& prior, std::span<const ExampleIndex> available,
          std::size_t) {
        return std::vector<ExampleIndex>{
            select(criterion, prior, inst, available)};
      });
  return builder.build(p, budget);
}

PolicyTree build_batch_policy(const Prior& p, const Instance& inst,
                              std::size_t budget, std::size_t batch_size) {
  check_budget(budget, inst);
  check_prior(p, inst);
  if (batch_size < 1) throw InputError("batch size must be >= 1");
  TreeBuilder builder(
      inst, BuildOptions{},
      [&](const Prior& prior, std::span<const ExampleIndex> available,
          std::size_t remaining) {
        const std::size_t b =
            std::min({batch_size, remaining, available.size()});
        return select_batch_max_gibbs(prior, inst, available, b);
      });
  return builder.build(p, budget);
}

PolicyTree build_gbs_min_cost(const Prior& p, const Instance& inst) {
  return build_policy(Criterion::gbs(), p, inst, inst.num_examples(),
                      BuildOptions{.stop_when_identified = true});
}

// ---------------------------------------------------------------- Execution

PolicyRun run_policy(const PolicyTree& tree, const Instance& inst,
                     HypothesisIndex h) {
  inst.check_hypothesis(h);
  PolicyRun run;
  std::int32_t node = tree.root();
  while (node != PolicyTree::kLeaf) {
    const auto& n = tree.node(node);
    const LabelIndex y = inst.label_of(h, n.example);
    run.queried.push_back(n.example);
    run.labels.push_back(y);
    ++run.cost;
    node = n.children[y];
  }
  return run;
}

Transcript run_transcript(const PolicyTree& tree, const Prior& p,
                          const Instance& inst, HypothesisIndex h) {
  check_prior(p, inst);
  const PolicyRun run = run_policy(tree, inst, h);
  Transcript t{{}, p};
  for (std::size_t i = 0; i < run.queried.size(); ++i) {
    t.observations.push_back({run.queried[i], run.labels[i]});
  }
  // The truth may have zero prior mass; then the posterior stays the prior
  // restricted as far as mass allows.
  for (const auto& o : t.observations) {
    if (label_prob(t.posterior, inst, o.example, o.label) > 0.0) {
      t.posterior = condition(t.posterior, inst, o.example, o.label);
    }
  }
  return t;
}

PolicyRun greedy_path(const Criterion& criterion, const Prior& p,
                      const Instance& inst, std::size_t budget,
                      HypothesisIndex h, BuildOptions options) {
  check_budget(budget, inst);
  check_prior(p, inst);
  inst.check_hypothesis(h);
  PolicyRun run;
  Prior prior = p;
  std::vector<char> consistent(inst.num_hypotheses(), 1);
  std::vector<ExampleIndex> available(inst.num_examples());
  for (std::size_t x = 0; x < available.size(); ++x) available[x] = x;
  while (run.cost < budget && !available.empty()) {
    if (options.stop_when_identified && positive_count(prior) <= 1) break;
    const ExampleIndex x = select(criterion, prior, inst, available);
    const LabelIndex y = inst.label_of(h, x);
    run.queried.push_back(x);
    run.labels.push_back(y);
    ++run.cost;
    available.erase(std::find(available.begin(), available.end(), x));
    auto ind = inst.indicator(x, y);
    for (std::size_t g = 0; g < consistent.size(); ++g) {
      consistent[g] = consistent[g] && ind[g] > 0.0;
    }
    if (kernels::dot(prior.probs(), ind) > 0.0) {
      prior = condition(prior, inst, x, y);
    } else if (options.stop_when_identified) {
      break;
    } else {
      prior = uniform_over(consistent);
    }
  }
  return run;
}

// ------------------------------------------------------------ Serialization

void write_policy(std::ostream& out, const PolicyTree& tree,
                  const Instance& inst) {
  if (tree.empty()) return;
  std::function<void(std::int32_t, std::size_t, std::string_view)> visit =
      [&](std::int32_t i, std::size_t depth, std::string_view edge) {
        const auto& node = tree.node(i);
        out << std::string(2 * depth, ' ') << depth << ','
            << inst.example_name(node.example) << ',' << edge << '\n';
        for (LabelIndex y = 0; y < node.children.size(); ++y) {
          if (node.children[y] != PolicyTree::kLeaf) {
            visit(node.children[y], depth + 1, inst.label_name(y));
          }
        }
      };
  visit(tree.root(), 0, "");
}

PolicyTree read_policy(std::istream& in, const Instance& inst) {
  PolicyTree tree(inst.num_labels());
  std::vector<std::int32_t> stack;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto start = line.find_first_not_of(' ');
    if (start == std::string::npos || line[start] == '#') continue;
    std::vector<std::string> fields;
    std::istringstream ss(line.substr(start));
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    auto fail = [&](const std::string& msg) {
      return InputError("policy line " + std::to_string(line_no) + ": " + msg);
    };
    if (fields.size() != 3) throw fail("expected depth,example,edge");
    std::size_t depth = 0;
    auto res = std::from_chars(fields[0].data(),
                               fields[0].data() + fields[0].size(), depth);
    if (res.ec != std::errc() ||
        res.ptr != fields[0].data() + fields[0].size()) {
      throw fail("bad depth");
    }
    const ExampleIndex x = inst.find_example(fields[1]);
    if (depth == 0) {
      if (!tree.empty()) throw fail("second root");
      stack.assign(1, tree.add_node(x));
      continue;
    }
    if (depth > stack.size()) throw fail("depth skips a level");
    const LabelIndex y = inst.find_label(fields[2]);
    stack.resize(depth);
    const std::int32_t node = tree.add_node(x);
    if (tree.node(stack.back()).children[y] != PolicyTree::kLeaf) {
      throw fail("edge label used twice");
    }
    tree.set_child(stack.back(), y, node);
    stack.push_back(node);
  }
  try {
    validate_policy(tree, inst, inst.num_examples());
  } catch (const ContractError& e) {
    throw InputError(std::string("policy text: ") + e.what());
  }
  return tree;
}

}  // namespace alrobust
