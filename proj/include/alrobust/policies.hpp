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

// Greedy selection criteria, policy trees, and policy execution.

#ifndef ALROBUST_POLICIES_HPP_
#define ALROBUST_POLICIES_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "alrobust/core.hpp"
#include "alrobust/utilities.hpp"

namespace alrobust {

// Scores within this distance are ties; ties go to the lowest pool index.
inline constexpr double kTieTolerance = 1e-12;

enum class CriterionKind {
  kMaxGibbs,
  kLeastConfidence,
  kMaxEntropy,
  kGbs,
  kWorstGenGibbs,
};

class Criterion {
 public:
  static Criterion max_gibbs() { return Criterion(CriterionKind::kMaxGibbs); }
  static Criterion least_confidence() {
    return Criterion(CriterionKind::kLeastConfidence);
  }
  static Criterion max_entropy() {
    return Criterion(CriterionKind::kMaxEntropy);
  }
  static Criterion gbs() { return Criterion(CriterionKind::kGbs); }
  static Criterion worst_gen_gibbs(LossMatrix loss);

  // Accepts max_gibbs, least_confidence, max_entropy, gbs. worst_gen_gibbs
  // needs a loss matrix and must be built with worst_gen_gibbs().
  static Criterion parse(std::string_view name);

  CriterionKind kind() const { return kind_; }
  const LossMatrix& loss() const;
  std::string name() const;

  // True for criteria computable from the label marginal p[.; x] alone.
  bool uses_marginals_only() const {
    return kind_ != CriterionKind::kWorstGenGibbs;
  }

 private:
  explicit Criterion(CriterionKind kind,
                     std::shared_ptr<const LossMatrix> loss = nullptr)
      : kind_(kind), loss_(std::move(loss)) {}

  CriterionKind kind_;
  std::shared_ptr<const LossMatrix> loss_;
};

// Score (higher is better) of an example whose label distribution is
// `label_probs`. Only valid when criterion.uses_marginals_only().
double marginal_score(CriterionKind kind, std::span<const double> label_probs);

// Index into `scores` of the maximum; earliest wins within kTieTolerance.
std::size_t argmax_lowest(std::span<const double> scores);

// Greedy choice of the next example from `available` under posterior p_d.
ExampleIndex select(const Criterion& criterion, const Prior& p_d,
                    const Instance& inst,
                    std::span<const ExampleIndex> available);

// 1 - sum_y p[y; B]^2 over joint label sequences y of the batch B.
double joint_gibbs_error(const Prior& p, const Instance& inst,
                         std::span<const ExampleIndex> batch);

// Greedily grows a batch maximizing joint_gibbs_error.
std::vector<ExampleIndex> select_batch_max_gibbs(
    const Prior& p_d, const Instance& inst,
    std::span<const ExampleIndex> available, std::size_t batch_size);

// Adaptive query tree. Internal nodes hold an example and one child slot
// per label; a slot of kLeaf terminates the path.
class PolicyTree {
 public:
  static constexpr std::int32_t kLeaf = -1;

  struct Node {
    ExampleIndex example;
    std::vector<std::int32_t> children;
  };

  explicit PolicyTree(std::size_t num_labels) : num_labels_(num_labels) {}

  bool empty() const { return nodes_.empty(); }
  // kLeaf for the empty tree.
  std::int32_t root() const { return nodes_.empty() ? kLeaf : 0; }
  const Node& node(std::int32_t i) const { return nodes_[i]; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t num_labels() const { return num_labels_; }
  // Longest root-to-leaf query count.
  std::size_t depth() const;

  // Construction. The first node added is the root.
  std::int32_t add_node(ExampleIndex x);
  void set_child(std::int32_t parent, LabelIndex y, std::int32_t child);

  friend bool operator==(const PolicyTree& a, const PolicyTree& b);

 private:
  std::size_t num_labels_;
  std::vector<Node> nodes_;
};

// Throws ContractError when a path repeats an example, a node has the wrong
// number of children, or the depth exceeds `budget`.
void validate_policy(const PolicyTree& tree, const Instance& inst,
                     std::size_t budget);

struct BuildOptions {
  // Minimum-cost mode: stop once at most one positive-probability
  // hypothesis remains consistent.
  bool stop_when_identified = false;
};

PolicyTree build_policy(const Criterion& criterion, const Prior& p,
                        const Instance& inst, std::size_t budget,
                        BuildOptions options = {});

// Batch maximum Gibbs error policy: blocks of `batch_size` queries chosen
// before any of their labels are seen.
PolicyTree build_batch_policy(const Prior& p, const Instance& inst,
                              std::size_t budget, std::size_t batch_size);

// Generalized binary search run until identification (budget |X|).
PolicyTree build_gbs_min_cost(const Prior& p, const Instance& inst);

struct PolicyRun {
  std::vector<ExampleIndex> queried;
  std::vector<LabelIndex> labels;
  std::size_t cost = 0;
  friend bool operator==(const PolicyRun&, const PolicyRun&) = default;
};

PolicyRun run_policy(const PolicyTree& tree, const Instance& inst,
                     HypothesisIndex h);

// Observations along h's path and the posterior they induce under p.
struct Transcript {
  LabeledSet observations;
  Prior posterior;
};

Transcript run_transcript(const PolicyTree& tree, const Prior& p,
                          const Instance& inst, HypothesisIndex h);

// Follows h's path of the greedy policy without materializing the tree.
// Equal to run_policy(build_policy(...), inst, h).
PolicyRun greedy_path(const Criterion& criterion, const Prior& p,
                      const Instance& inst, std::size_t budget,
                      HypothesisIndex h, BuildOptions options = {});

// Indented text, one node per line: `depth,example,edge-label-from-parent`.
void write_policy(std::ostream& out, const PolicyTree& tree,
                  const Instance& inst);
PolicyTree read_policy(std::istream& in, const Instance& inst);

}  // namespace alrobust

#endif  // ALROBUST_POLICIES_HPP_
