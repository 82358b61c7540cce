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

// Independent brute-force reference computations used by the tests. None of
// this calls the library's evaluators or search code.

#ifndef ALROBUST_TESTS_ORACLES_HPP_
#define ALROBUST_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "alrobust/core.hpp"
#include "alrobust/policies.hpp"
#include "alrobust/utilities.hpp"

namespace oracle {

using alrobust::ExampleIndex;
using alrobust::HypothesisIndex;
using alrobust::Instance;
using alrobust::LabelIndex;
using alrobust::Prior;
using alrobust::Utility;
using alrobust::UtilityKind;

constexpr double kInf = std::numeric_limits<double>::infinity();

// h1=(0,0) h2=(1,0) h3=(0,1) h4=(1,1) over x0, x1.
inline Instance four_labelings() {
  return Instance({"x0", "x1"}, {"0", "1"},
                  {{"h1", {0, 0}}, {"h2", {1, 0}}, {"h3", {0, 1}}, {"h4", {1, 1}}});
}

// Three hypotheses where x0 isolates h1 and x1 separates h2 from h3.
inline Instance chain3() {
  return Instance({"x0", "x1"}, {"0", "1"},
                  {{"h1", {0, 0}}, {"h2", {1, 0}}, {"h3", {1, 1}}});
}

inline bool agree(const Instance& inst, HypothesisIndex a, HypothesisIndex b,
                  const std::vector<ExampleIndex>& s) {
  for (auto x : s) {
    if (inst.hypothesis(a).labels[x] != inst.hypothesis(b).labels[x]) {
      return false;
    }
  }
  return true;
}

inline double seq_prob(const Prior& p, const Instance& inst,
                       const std::vector<ExampleIndex>& s,
                       const std::vector<LabelIndex>& y) {
  double total = 0.0;
  for (HypothesisIndex h = 0; h < inst.num_hypotheses(); ++h) {
    bool match = true;
    for (std::size_t i = 0; i < s.size(); ++i) {
      match = match && inst.hypothesis(h).labels[s[i]] == y[i];
    }
    if (match) total += p[h];
  }
  return total;
}

inline double vsr(const Prior& p, const Instance& inst,
                  const std::vector<ExampleIndex>& s, HypothesisIndex h) {
  double same = 0.0;
  for (HypothesisIndex g = 0; g < inst.num_hypotheses(); ++g) {
    if (agree(inst, g, h, s)) same += p[g];
  }
  return 1.0 - same;
}

// Sum over ordered pairs not both consistent with h on s.
inline double generalized(const Prior& p, const Instance& inst,
                          const alrobust::LossMatrix& loss,
                          const std::vector<ExampleIndex>& s,
                          HypothesisIndex h) {
  double total = 0.0;
  const std::size_t n = inst.num_hypotheses();
  for (HypothesisIndex a = 0; a < n; ++a) {
    for (HypothesisIndex b = 0; b < n; ++b) {
      if (agree(inst, a, h, s) && agree(inst, b, h, s)) continue;
      total += loss(a, b) * p[a] * p[b];
    }
  }
  return total;
}

inline double pruning(const Prior& p, const Instance& inst, double mu,
                      const std::vector<ExampleIndex>& s, HypothesisIndex h) {
  double count = 0.0;
  for (HypothesisIndex g = 0; g < inst.num_hypotheses(); ++g) {
    if (p[g] > mu && !agree(inst, g, h, s)) count += 1.0;
  }
  return count;
}

inline double utility(const Utility& u, const Prior& p, const Instance& inst,
                      const std::vector<ExampleIndex>& s, HypothesisIndex h) {
  switch (u.kind()) {
    case UtilityKind::kVersionSpaceReduction:
      return vsr(p, inst, s, h);
    case UtilityKind::kGeneralized:
      return generalized(p, inst, u.loss(), s, h);
    case UtilityKind::kPruningCount:
      return pruning(p, inst, u.mu(), s, h);
  }
  return 0.0;
}

// Examples queried when h is the truth.
inline std::vector<ExampleIndex> path(const alrobust::PolicyTree& t,
                                      const Instance& inst, HypothesisIndex h) {
  std::vector<ExampleIndex> out;
  std::int32_t node = t.root();
  while (node != alrobust::PolicyTree::kLeaf) {
    const auto& n = t.node(node);
    out.push_back(n.example);
    node = n.children[inst.hypothesis(h).labels[n.example]];
  }
  return out;
}

inline double f_avg(const Prior& p, const Utility& u, const Instance& inst,
                    const alrobust::PolicyTree& t) {
  double total = 0.0;
  for (HypothesisIndex h = 0; h < inst.num_hypotheses(); ++h) {
    if (p[h] > 0.0) total += p[h] * utility(u, p, inst, path(t, inst, h), h);
  }
  return total;
}

inline double f_worst(const Prior& p, const Utility& u, const Instance& inst,
                      const alrobust::PolicyTree& t) {
  double worst = kInf;
  for (HypothesisIndex h = 0; h < inst.num_hypotheses(); ++h) {
    worst = std::min(worst, utility(u, p, inst, path(t, inst, h), h));
  }
  return worst;
}

// Exhaustive search over adaptive policies of depth exactly min(budget, |X|).
// Histories are explicit; nothing is cached.
inline double opt(const Prior& p, const Utility& u, const Instance& inst,
                  std::size_t budget, bool worst,
                  std::vector<ExampleIndex> s = {},
                  std::vector<HypothesisIndex> consistent = {},
                  bool started = false) {
  if (!started) {
    for (HypothesisIndex h = 0; h < inst.num_hypotheses(); ++h) {
      consistent.push_back(h);
    }
  }
  if (consistent.empty()) return worst ? kInf : 0.0;
  if (s.size() == budget || s.size() == inst.num_examples()) {
    double v = worst ? kInf : 0.0;
    for (auto h : consistent) {
      const double f = utility(u, p, inst, s, h);
      v = worst ? std::min(v, f) : v + p[h] * f;
    }
    return v;
  }
  double best = -kInf;
  for (ExampleIndex x = 0; x < inst.num_examples(); ++x) {
    if (std::find(s.begin(), s.end(), x) != s.end()) continue;
    auto s2 = s;
    s2.push_back(x);
    double v = worst ? kInf : 0.0;
    for (LabelIndex y = 0; y < inst.num_labels(); ++y) {
      std::vector<HypothesisIndex> c2;
      for (auto h : consistent) {
        if (inst.hypothesis(h).labels[x] == y) c2.push_back(h);
      }
      const double child = opt(p, u, inst, budget, worst, s2, c2, true);
      v = worst ? std::min(v, child) : v + child;
    }
    best = std::max(best, v);
  }
  return best;
}

// Minimum expected number of queries to isolate the truth among the
// positive-probability hypotheses, conditional on `alive`.
inline double min_cost(const Prior& p, const Instance& inst,
                       std::vector<HypothesisIndex> alive = {},
                       bool started = false) {
  if (!started) {
    for (HypothesisIndex h = 0; h < inst.num_hypotheses(); ++h) {
      if (p[h] > 0.0) alive.push_back(h);
    }
  }
  if (alive.size() <= 1) return 0.0;
  double mass = 0.0;
  for (auto h : alive) mass += p[h];
  double best = kInf;
  for (ExampleIndex x = 0; x < inst.num_examples(); ++x) {
    double v = 1.0;
    bool splits = false;
    for (LabelIndex y = 0; y < inst.num_labels(); ++y) {
      std::vector<HypothesisIndex> part;
      double pm = 0.0;
      for (auto h : alive) {
        if (inst.hypothesis(h).labels[x] == y) {
          part.push_back(h);
          pm += p[h];
        }
      }
      if (part.empty()) continue;
      if (part.size() < alive.size()) splits = true;
      if (part.size() == alive.size()) break;
      v += pm / mass * min_cost(p, inst, part, true);
    }
    if (splits) best = std::min(best, v);
  }
  return best;
}

inline double c_avg(const Prior& p, const Instance& inst,
                    const alrobust::PolicyTree& t) {
  double total = 0.0;
  for (HypothesisIndex h = 0; h < inst.num_hypotheses(); ++h) {
    total += p[h] * static_cast<double>(path(t, inst, h).size());
  }
  return total;
}

}  // namespace oracle

#endif  // ALROBUST_TESTS_ORACLES_HPP_
