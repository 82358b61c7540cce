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

#include <cmath>
#include <random>
#include <sstream>

#include "alrobust/core.hpp"
#include "alrobust/errors.hpp"
#include "alrobust/synthetic.hpp"
#include "oracles.hpp"

namespace alrobust {
namespace {

constexpr double kTol = 1e-12;

std::vector<double> vec(const Prior& p) {
  return {p.probs().begin(), p.probs().end()};
}

TEST(Instance, AllLabelingsOrderFirstExampleFastest) {
  const auto inst = Instance::all_labelings({"x0", "x1"}, {"0", "1"});
  EXPECT_EQ(inst, oracle::four_labelings());
  EXPECT_EQ(inst.hypothesis(3).id, "h4");
}

TEST(Instance, RejectsMalformedInput) {
  EXPECT_THROW(Instance({}, {"0", "1"}, {{"h", {}}}), InputError);
  EXPECT_THROW(Instance({"x"}, {"0"}, {{"h", {0}}}), InputError);
  EXPECT_THROW(Instance({"x"}, {"0", "1"}, {}), InputError);
  EXPECT_THROW(Instance({"x"}, {"0", "1"}, {{"h", {0, 1}}}), InputError);
  EXPECT_THROW(Instance({"x"}, {"0", "1"}, {{"h", {2}}}), InputError);
  EXPECT_THROW(Instance({"x"}, {"0", "1"}, {{"a", {0}}, {"b", {0}}}),
               InputError);
  EXPECT_THROW(Instance({"x", "x"}, {"0", "1"}, {{"a", {0, 0}}}), InputError);
}

TEST(Instance, IndicatorAndLookups) {
  const auto inst = oracle::four_labelings();
  const auto ind = inst.indicator(0, 1);
  EXPECT_EQ(std::vector<double>(ind.begin(), ind.end()),
            (std::vector<double>{0, 1, 0, 1}));
  EXPECT_EQ(inst.find_example("x1"), 1u);
  EXPECT_EQ(inst.find_hypothesis("h3"), 2u);
  EXPECT_THROW(inst.find_label("2"), InputError);
}

TEST(Prior, Validation) {
  EXPECT_THROW(Prior({0.5, 0.6}), InputError);
  EXPECT_THROW(Prior({-0.1, 1.1}), InputError);
  EXPECT_THROW(Prior::from_weights({0.0, 0.0}), InputError);
  const auto p = Prior::from_weights({1.0, 3.0});
  EXPECT_DOUBLE_EQ(p[1], 0.75);
  EXPECT_EQ(Prior::point_mass(3, 1).support_size(), 1u);
  EXPECT_DOUBLE_EQ(Prior({0.0, 0.25, 0.75}).min_positive(), 0.25);
  EXPECT_DOUBLE_EQ(Prior({0.0, 0.25, 0.75}).min_entry(), 0.0);
}

TEST(LabelSeqProb, Examples) {
  const auto inst = oracle::four_labelings();
  const std::vector<ExampleIndex> x0{0};
  const std::vector<LabelIndex> y0{0};
  EXPECT_NEAR(label_seq_prob(Prior::uniform(4), inst, x0, y0), 0.5, kTol);
  EXPECT_EQ(label_seq_prob(Prior({0.4, 0.3, 0.2, 0.1}), inst, {}, {}), 1.0);
  const std::vector<ExampleIndex> both{0, 1};
  const std::vector<LabelIndex> y01{0, 1};
  const Prior p({0.4, 0.3, 0.2, 0.1});
  EXPECT_NEAR(label_seq_prob(p, inst, both, y01), 0.2, kTol);
  EXPECT_NEAR(label_seq_prob(p, inst, both, y01),
              oracle::seq_prob(p, inst, both, y01), kTol);
}

TEST(LabelSeqProb, Errors) {
  const auto inst = oracle::four_labelings();
  const Prior p = Prior::uniform(4);
  const std::vector<ExampleIndex> s{0};
  const std::vector<LabelIndex> none;
  EXPECT_THROW(label_seq_prob(p, inst, s, none), InputError);
  const std::vector<ExampleIndex> bad{5};
  const std::vector<LabelIndex> y{0};
  EXPECT_THROW(label_seq_prob(p, inst, bad, y), InputError);
}

TEST(LabelSeqProb, SumsToOneOverSequences) {
  const auto data = random_instance(3, 6, 3, 11);
  const std::vector<ExampleIndex> s{2, 0};
  double total = 0.0;
  for (LabelIndex a = 0; a < 3; ++a) {
    for (LabelIndex b = 0; b < 3; ++b) {
      const std::vector<LabelIndex> y{a, b};
      total += label_seq_prob(data.prior, data.instance, s, y);
    }
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Posterior, Examples) {
  const auto inst = oracle::four_labelings();
  EXPECT_EQ(vec(posterior(Prior::uniform(4), inst, {{0, 0}})),
            (std::vector<double>{0.5, 0, 0.5, 0}));
  const Prior p({0.4, 0.3, 0.2, 0.1});
  EXPECT_EQ(posterior(p, inst, {}), p);
  const auto q = posterior(p, inst, {{1, 0}});
  EXPECT_NEAR(q[0], 0.4 / 0.7, kTol);
  EXPECT_NEAR(q[1], 0.3 / 0.7, kTol);
  EXPECT_EQ(q[2], 0.0);
  EXPECT_EQ(q[3], 0.0);
}

TEST(Posterior, EmptyVersionSpace) {
  const auto inst = oracle::four_labelings();
  const Prior p({0.5, 0.5, 0.0, 0.0});
  EXPECT_THROW(posterior(p, inst, {{1, 1}}), EmptyVersionSpaceError);
  EXPECT_THROW(posterior(p, inst, {{0, 0}, {0, 1}}), InputError);
}

TEST(Posterior, ChainRuleAndOrderIndependence) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto data = random_instance(3, 7, 2, seed);
    const auto& inst = data.instance;
    const auto& p = data.prior;
    const LabeledSet d1{{0, inst.label_of(0, 0)}};
    const LabeledSet d2{{2, inst.label_of(0, 2)}, {1, inst.label_of(0, 1)}};
    LabeledSet all = d1;
    all.insert(all.end(), d2.begin(), d2.end());
    const Prior joint = posterior(p, inst, all);
    const Prior staged = posterior(posterior(p, inst, d1), inst, d2);
    for (std::size_t h = 0; h < p.size(); ++h) {
      EXPECT_NEAR(joint[h], staged[h], 1e-12);
    }
    const std::vector<ExampleIndex> s1{0};
    const std::vector<LabelIndex> y1{inst.label_of(0, 0)};
    const std::vector<ExampleIndex> s2{2, 1};
    const std::vector<LabelIndex> y2{inst.label_of(0, 2), inst.label_of(0, 1)};
    const std::vector<ExampleIndex> s12{0, 2, 1};
    const std::vector<LabelIndex> y12{y1[0], y2[0], y2[1]};
    EXPECT_NEAR(label_seq_prob(p, inst, s12, y12),
                label_seq_prob(p, inst, s1, y1) *
                    label_seq_prob(posterior(p, inst, d1), inst, s2, y2),
                1e-12);
  }
}

TEST(L1Distance, Examples) {
  const Prior p0({0.5, 0.5, 0.0, 0.0});
  const Prior p1({0.4, 0.4, 0.1, 0.1});
  EXPECT_EQ(l1_distance(p0, p0), 0.0);
  EXPECT_NEAR(l1_distance(p0, p1), 0.4, kTol);
  EXPECT_EQ(l1_distance(Prior({1.0, 0.0}), Prior({0.0, 1.0})), 2.0);
  EXPECT_THROW(l1_distance(p0, Prior({1.0})), InputError);
}

TEST(L1Distance, TriangleInequality) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const Prior a = random_prior(6, rng);
    const Prior b = random_prior(6, rng);
    const Prior c = random_prior(6, rng);
    EXPECT_LE(l1_distance(a, c), l1_distance(a, b) + l1_distance(b, c) + 1e-15);
    EXPECT_NEAR(l1_distance(a, b), l1_distance(b, a), 1e-15);
  }
}

Predictor constant_predictor(std::vector<double> p1_per_example) {
  Predictor pred;
  for (double v : p1_per_example) {
    pred.probs.push_back(1.0 - v);
    pred.probs.push_back(v);
  }
  return pred;
}

TEST(InducePrior, Examples) {
  const auto inst = oracle::four_labelings();
  const ModelEnsemble fair(2, 2, {{1.0, constant_predictor({0.5, 0.5})}});
  const auto u = induce_prior(fair, inst);
  for (std::size_t h = 0; h < 4; ++h) EXPECT_NEAR(u[h], 0.25, kTol);

  const ModelEnsemble det(2, 2, {{0.7, constant_predictor({0.0, 0.0})},
                                 {0.3, constant_predictor({1.0, 0.0})}});
  const auto d = induce_prior(det, inst);
  EXPECT_NEAR(d[0], 0.7, kTol);
  EXPECT_NEAR(d[1], 0.3, kTol);
  EXPECT_EQ(d[2], 0.0);
  EXPECT_EQ(d[3], 0.0);

  const ModelEnsemble one(2, 2, {{1.0, constant_predictor({0.9, 0.2})}});
  const auto q = induce_prior(one, inst);
  const std::vector<double> expected{0.1 * 0.8, 0.9 * 0.8, 0.1 * 0.2, 0.9 * 0.2};
  for (std::size_t h = 0; h < 4; ++h) EXPECT_NEAR(q[h], expected[h], kTol);
}

TEST(InducePrior, MarginalsMatchEnsemble) {
  const auto inst = Instance::all_labelings({"a", "b", "c"}, {"0", "1"});
  const ModelEnsemble ens(3, 2, {{0.25, constant_predictor({0.1, 0.6, 0.3})},
                                 {0.75, constant_predictor({0.8, 0.5, 0.05})}});
  const auto p = induce_prior(ens, inst);
  for (ExampleIndex x = 0; x < 3; ++x) {
    for (LabelIndex y = 0; y < 2; ++y) {
      const double expected = 0.25 * ens.predict(0, x, y) + 0.75 * ens.predict(1, x, y);
      EXPECT_NEAR(label_prob(p, inst, x, y), expected, 1e-12);
    }
  }
}

TEST(ModelEnsemble, Validation) {
  EXPECT_THROW(ModelEnsemble(2, 2, {{0.5, constant_predictor({0.5, 0.5})}}),
               InputError);
  Predictor bad;
  bad.probs = {0.5, 0.6, 0.5, 0.5};
  EXPECT_THROW(ModelEnsemble(2, 2, {{1.0, bad}}), InputError);
}

TEST(Perturb, Examples) {
  const Prior p({0.4, 0.3, 0.2, 0.1});
  EXPECT_EQ(perturb(p, 0.0, 3), p);
  EXPECT_EQ(perturb(p, 0.3, 42), perturb(p, 0.3, 42));
  EXPECT_THROW(perturb(p, -0.1, 1), InputError);
  EXPECT_THROW(perturb(p, 2.5, 1), InputError);
}

TEST(Perturb, StaysWithinRadius) {
  std::mt19937_64 rng(99);
  const Prior p = random_prior(8, rng);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const Prior q = perturb(p, 0.3, seed);
    EXPECT_LE(l1_distance(p, q), 0.3);
    double total = 0.0;
    for (std::size_t h = 0; h < q.size(); ++h) {
      EXPECT_GE(q[h], 0.0);
      total += q[h];
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(InstanceFile, RoundTrip) {
  const auto data = random_instance(3, 5, 3, 8);
  std::stringstream ss;
  write_instance(ss, data.instance, data.prior);
  const auto back = read_instance(ss);
  EXPECT_EQ(back.instance, data.instance);
  for (std::size_t h = 0; h < data.prior.size(); ++h) {
    EXPECT_EQ(back.prior[h], data.prior[h]);
  }
}

TEST(InstanceFile, Golden) {
  std::stringstream ss;
  write_instance(ss, oracle::four_labelings(), Prior({0.4, 0.3, 0.2, 0.1}));
  EXPECT_EQ(ss.str(),
            "examples,x0,x1\n"
            "labels,0,1\n"
            "h,h1,0.4,0,0\n"
            "h,h2,0.3,1,0\n"
            "h,h3,0.2,0,1\n"
            "h,h4,0.1,1,1\n");
}

std::string load_error(const std::string& text) {
  std::istringstream in(text);
  try {
    read_instance(in);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

TEST(InstanceFile, ErrorsCarryLineNumbers) {
  EXPECT_EQ(load_error("labels,0,1\n").rfind("line 1:", 0), 0u);
  EXPECT_EQ(load_error("examples,x0\nlabels,0,1\nh,h1,0.5,0\nh,h2,x,1\n")
                .rfind("line 4:", 0),
            0u);
  EXPECT_EQ(load_error("examples,x0\nlabels,0,1\nh,h1,0.5,0,1\n").rfind("line 3:", 0),
            0u);
  EXPECT_EQ(load_error("examples,x0\nlabels,0,1\nh,h1,0.5,2\n").rfind("line 3:", 0),
            0u);
  EXPECT_NE(load_error("examples,x0\nlabels,0,1\nh,h1,0.5,0\nh,h2,0.4,1\n")
                .find("sum"),
            std::string::npos);
}

TEST(InstanceFile, TolerantSumIsRenormalized) {
  std::istringstream in(
      "# comment\nexamples,x0\nlabels,0,1\nh,h1,0.5000001,0\nh,h2,0.5,1\n");
  const auto data = read_instance(in);
  EXPECT_NEAR(data.prior[0] + data.prior[1], 1.0, 1e-15);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(RandomInstance, DistinctAndDeterministic) {
  const auto a = random_instance(3, 8, 2, 4);
  const auto b = random_instance(3, 8, 2, 4);
  EXPECT_EQ(a.instance, b.instance);
  EXPECT_EQ(a.prior, b.prior);
  EXPECT_THROW(random_instance(2, 5, 2, 1), InputError);
}

}  // namespace
}  // namespace alrobust
