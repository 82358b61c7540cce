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

#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <sstream>

#include "alrobust/errors.hpp"
#include "alrobust/policies.hpp"
#include "alrobust/synthetic.hpp"
#include "oracles.hpp"

namespace alrobust {
namespace {

const std::vector<ExampleIndex> kBoth{0, 1};

std::vector<Criterion> marginal_criteria() {
  return {Criterion::max_gibbs(), Criterion::least_confidence(),
          Criterion::max_entropy(), Criterion::gbs()};
}

TEST(Select, Examples) {
  const auto inst = oracle::four_labelings();
  const Prior p({0.4, 0.3, 0.2, 0.1});
  EXPECT_EQ(select(Criterion::max_gibbs(), p, inst, kBoth), 0u);
  EXPECT_EQ(select(Criterion::least_confidence(), p, inst, kBoth), 0u);
  for (const auto& c : marginal_criteria()) {
    EXPECT_EQ(select(c, Prior::uniform(4), inst, kBoth), 0u) << c.name();
  }
  const std::vector<ExampleIndex> reversed{1, 0};
  EXPECT_EQ(select(Criterion::gbs(), Prior::uniform(4), inst, reversed), 0u);
  EXPECT_THROW(select(Criterion::max_gibbs(), p, inst, {}), InputError);
}

TEST(Select, MarginalScores) {
  const std::vector<double> probs{0.6, 0.4};
  EXPECT_NEAR(marginal_score(CriterionKind::kMaxGibbs, probs), 0.48, 1e-15);
  EXPECT_NEAR(marginal_score(CriterionKind::kLeastConfidence, probs), -0.6,
              1e-15);
  EXPECT_NEAR(marginal_score(CriterionKind::kGbs, probs), -0.2, 1e-15);
  EXPECT_NEAR(marginal_score(CriterionKind::kMaxEntropy, probs),
              -(0.6 * std::log(0.6) + 0.4 * std::log(0.4)), 1e-15);
  const std::vector<double> three{0.5, 0.3, 0.2};
  EXPECT_NEAR(marginal_score(CriterionKind::kGbs, three), -0.5, 1e-15);
}

TEST(Select, ArgmaxLowestTieBreak) {
  const std::vector<double> s{0.1, 0.5, 0.5 + 1e-13, 0.2};
  EXPECT_EQ(argmax_lowest(s), 1u);
  const std::vector<double> t{0.1, 0.5, 0.5 + 1e-9};
  EXPECT_EQ(argmax_lowest(t), 2u);
}

TEST(Select, CriterionParsing) {
  EXPECT_EQ(Criterion::parse("gbs").kind(), CriterionKind::kGbs);
  EXPECT_EQ(Criterion::parse("max_entropy").name(), "max_entropy");
  EXPECT_THROW(Criterion::parse("worst_gen_gibbs"), InputError);
  EXPECT_THROW(Criterion::parse("nope"), InputError);
}

TEST(Select, WorstGeneralizedGibbsMatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto data = random_instance(3, 6, 2, seed);
    const auto& inst = data.instance;
    const auto loss = LossMatrix::normalized_hamming(inst);
    std::vector<double> gains;
    for (ExampleIndex x = 0; x < 3; ++x) {
      double worst = oracle::kInf;
      for (HypothesisIndex h = 0; h < 6; ++h) {
        worst = std::min(worst, oracle::generalized(data.prior, inst, loss,
                                                    {x}, h));
      }
      gains.push_back(worst);
    }
    const std::vector<ExampleIndex> all{0, 1, 2};
    EXPECT_EQ(select(Criterion::worst_gen_gibbs(loss), data.prior, inst, all),
              argmax_lowest(gains));
  }
}

TEST(Select, MaxGibbsAgreesWithGbsOnBinaryUniform) {
  int compared = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    const auto data = random_instance(4, 2 + seed % 10, 2, seed);
    const auto& inst = data.instance;
    const Prior p = Prior::uniform(inst.num_hypotheses());
    std::vector<double> scores;
    for (ExampleIndex x = 0; x < 4; ++x) {
      const std::vector<double> probs{label_prob(p, inst, x, 0),
                                      label_prob(p, inst, x, 1)};
      scores.push_back(marginal_score(CriterionKind::kMaxGibbs, probs));
    }
    auto sorted = scores;
    std::sort(sorted.rbegin(), sorted.rend());
    if (sorted[0] - sorted[1] <= kTieTolerance) continue;
    ++compared;
    const std::vector<ExampleIndex> all{0, 1, 2, 3};
    EXPECT_EQ(select(Criterion::max_gibbs(), p, inst, all),
              select(Criterion::gbs(), p, inst, all));
  }
  EXPECT_GT(compared, 40);
}

TEST(BatchSelect, Examples) {
  const auto inst = Instance::all_labelings({"x0", "x1", "x2"}, {"0", "1"});
  const Prior u = Prior::uniform(8);
  const std::vector<ExampleIndex> all{0, 1, 2};
  const auto batch = select_batch_max_gibbs(u, inst, all, 2);
  EXPECT_EQ(batch, (std::vector<ExampleIndex>{0, 1}));
  EXPECT_NEAR(joint_gibbs_error(u, inst, batch), 0.75, 1e-15);
  for (auto pair : {std::vector<ExampleIndex>{0, 2}, std::vector<ExampleIndex>{1, 2}}) {
    EXPECT_LE(joint_gibbs_error(u, inst, pair), 0.75 + 1e-15);
  }
  EXPECT_EQ(select_batch_max_gibbs(u, inst, all, 3).size(), 3u);
  EXPECT_THROW(select_batch_max_gibbs(u, inst, all, 4), InputError);
  EXPECT_THROW(select_batch_max_gibbs(u, inst, all, 0), InputError);
}

TEST(BatchSelect, SizeOneIsMaxGibbs) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto data = random_instance(4, 7, 2, seed);
    const std::vector<ExampleIndex> all{0, 1, 2, 3};
    EXPECT_EQ(select_batch_max_gibbs(data.prior, data.instance, all, 1).front(),
              select(Criterion::max_gibbs(), data.prior, data.instance, all));
  }
}

TEST(BuildPolicy, BudgetOneIsSingleNode) {
  const auto inst = oracle::four_labelings();
  const Prior p({0.1, 0.2, 0.3, 0.4});
  const auto t = build_policy(Criterion::max_gibbs(), p, inst, 1);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t.node(0).example, select(Criterion::max_gibbs(), p, inst, kBoth));
}

TEST(BuildPolicy, FullDepthOnFourLabelings) {
  const auto inst = oracle::four_labelings();
  const auto t = build_policy(Criterion::max_gibbs(), Prior::uniform(4), inst, 2);
  EXPECT_EQ(t.depth(), 2u);
  EXPECT_EQ(t.node(0).example, 0u);
  for (LabelIndex y = 0; y < 2; ++y) {
    EXPECT_EQ(t.node(t.node(0).children[y]).example, 1u);
  }
}

TEST(BuildPolicy, GoldenText) {
  const auto inst = oracle::four_labelings();
  const auto t = build_policy(Criterion::max_gibbs(), Prior::uniform(4), inst, 2);
  std::ostringstream out;
  write_policy(out, t, inst);
  EXPECT_EQ(out.str(), "0,x0,\n  1,x1,0\n  1,x1,1\n");
  std::istringstream in(out.str());
  EXPECT_EQ(read_policy(in, inst), t);
}

TEST(BuildPolicy, BudgetValidation) {
  const auto inst = oracle::four_labelings();
  EXPECT_THROW(build_policy(Criterion::gbs(), Prior::uniform(4), inst, 0),
               InputError);
  EXPECT_THROW(build_policy(Criterion::gbs(), Prior::uniform(4), inst, 3),
               InputError);
}

TEST(BuildPolicy, GbsStopsOnceIdentified) {
  const auto inst = oracle::chain3();
  const auto t = build_gbs_min_cost(Prior::uniform(3), inst);
  EXPECT_EQ(run_policy(t, inst, 0).cost, 1u);
  EXPECT_EQ(run_policy(t, inst, 1).cost, 2u);
  EXPECT_EQ(run_policy(t, inst, 2).cost, 2u);
}

TEST(BuildPolicy, GbsMinCostOnFourLabelingsCostsTwo) {
  const auto inst = oracle::four_labelings();
  const auto t = build_gbs_min_cost(Prior::uniform(4), inst);
  for (HypothesisIndex h = 0; h < 4; ++h) {
    EXPECT_EQ(run_policy(t, inst, h).cost, 2u);
  }
}

TEST(BuildPolicy, ValidAndDeterministicOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto data = random_instance(4, 9, 3, seed);
    for (const auto& c : marginal_criteria()) {
      const auto a = build_policy(c, data.prior, data.instance, 3);
      const auto b = build_policy(c, data.prior, data.instance, 3);
      EXPECT_EQ(a, b);
      EXPECT_NO_THROW(validate_policy(a, data.instance, 3));
      EXPECT_EQ(a.depth(), 3u);
    }
  }
}

// Recomputes the criterion at every positive-probability node.
void expect_consistent(const PolicyTree& t, const Criterion& c, const Prior& p,
                       const Instance& inst) {
  std::function<void(std::int32_t, const Prior&, std::vector<ExampleIndex>)>
      visit = [&](std::int32_t i, const Prior& post,
                  std::vector<ExampleIndex> avail) {
        const auto& node = t.node(i);
        ASSERT_EQ(node.example, select(c, post, inst, avail));
        avail.erase(std::find(avail.begin(), avail.end(), node.example));
        for (LabelIndex y = 0; y < inst.num_labels(); ++y) {
          if (node.children[y] == PolicyTree::kLeaf) continue;
          if (label_prob(post, inst, node.example, y) > 0.0) {
            visit(node.children[y], condition(post, inst, node.example, y),
                  avail);
          }
        }
      };
  std::vector<ExampleIndex> all(inst.num_examples());
  for (ExampleIndex x = 0; x < all.size(); ++x) all[x] = x;
  visit(t.root(), p, all);
}

TEST(BuildPolicy, NodesReproduceTheCriterion) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto data = random_instance(4, 10, 2, seed);
    for (const auto& c : marginal_criteria()) {
      expect_consistent(build_policy(c, data.prior, data.instance, 3), c,
                        data.prior, data.instance);
    }
  }
}

TEST(BuildPolicy, ZeroMassBranchesUseUniformRestriction) {
  const auto inst = Instance::all_labelings({"x0", "x1", "x2"}, {"0", "1"});
  // Only h with x0 = 0 have mass; the x0 = 1 branch is zero-mass.
  std::vector<double> w(8, 0.0);
  w[0] = 0.7;
  w[2] = 0.1;
  w[4] = 0.1;
  w[6] = 0.1;
  const Prior p(w);
  const auto t = build_policy(Criterion::least_confidence(), p, inst, 2);
  std::vector<ExampleIndex> avail{0, 1, 2};
  const ExampleIndex root = t.node(0).example;
  avail.erase(std::find(avail.begin(), avail.end(), root));
  for (LabelIndex y = 0; y < 2; ++y) {
    std::vector<double> consistent(8, 0.0);
    for (HypothesisIndex h = 0; h < 8; ++h) {
      consistent[h] = inst.label_of(h, root) == y ? 1.0 : 0.0;
    }
    const double mass = label_prob(p, inst, root, y);
    const Prior expected = mass > 0.0 ? condition(p, inst, root, y)
                                      : Prior::from_weights(consistent);
    EXPECT_EQ(t.node(t.node(0).children[y]).example,
              select(Criterion::least_confidence(), expected, inst, avail));
  }
}

TEST(RunPolicy, Examples) {
  const auto inst = oracle::four_labelings();
  PolicyTree t(2);
  t.add_node(0);
  const auto run = run_policy(t, inst, 1);
  EXPECT_EQ(run.queried, (std::vector<ExampleIndex>{0}));
  EXPECT_EQ(run.labels, (std::vector<LabelIndex>{1}));
  EXPECT_EQ(run.cost, 1u);
  EXPECT_EQ(run_policy(PolicyTree(2), inst, 1).cost, 0u);
}

TEST(RunPolicy, TranscriptPosterior) {
  const auto inst = oracle::four_labelings();
  const Prior p({0.4, 0.3, 0.2, 0.1});
  const auto t = build_policy(Criterion::max_gibbs(), p, inst, 1);
  const auto tr = run_transcript(t, p, inst, 2);
  EXPECT_EQ(tr.observations, (LabeledSet{{0, 0}}));
  EXPECT_EQ(tr.posterior, posterior(p, inst, tr.observations));
}

TEST(GreedyPath, MatchesMaterializedTree) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto data = random_instance(4, 8, 2, seed);
    std::vector<double> w(data.prior.probs().begin(), data.prior.probs().end());
    w[seed % 8] = 0.0;
    const Prior p = Prior::from_weights(w);
    for (const auto& c : marginal_criteria()) {
      const auto t = build_policy(c, p, data.instance, 3);
      for (HypothesisIndex h = 0; h < 8; ++h) {
        EXPECT_EQ(greedy_path(c, p, data.instance, 3, h),
                  run_policy(t, data.instance, h));
      }
    }
    BuildOptions identify{true};
    const auto g = build_gbs_min_cost(p, data.instance);
    for (HypothesisIndex h = 0; h < 8; ++h) {
      EXPECT_EQ(greedy_path(Criterion::gbs(), p, data.instance, 4, h, identify),
                run_policy(g, data.instance, h));
    }
  }
}

TEST(BatchPolicy, BlocksShareExamplesAcrossBranches) {
  const auto inst = Instance::all_labelings({"x0", "x1", "x2", "x3"}, {"0", "1"});
  std::mt19937_64 rng(4);
  const Prior p = random_prior(16, rng);
  const auto t = build_batch_policy(p, inst, 4, 2);
  EXPECT_NO_THROW(validate_policy(t, inst, 4));
  const auto& root = t.node(0);
  const ExampleIndex second = t.node(root.children[0]).example;
  EXPECT_EQ(t.node(root.children[1]).example, second);
  const std::vector<ExampleIndex> all{0, 1, 2, 3};
  const auto first_block = select_batch_max_gibbs(p, inst, all, 2);
  EXPECT_EQ(root.example, first_block[0]);
  EXPECT_EQ(second, first_block[1]);
}

TEST(PolicyText, RejectsMalformedInput) {
  const auto inst = oracle::four_labelings();
  std::istringstream bad("0,x9,\n");
  EXPECT_THROW(read_policy(bad, inst), InputError);
  std::istringstream repeat("0,x0,\n  1,x0,0\n");
  EXPECT_THROW(read_policy(repeat, inst), InputError);
}

}  // namespace
}  // namespace alrobust
