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

// Brute-force oracles: exact optimal policies on small instances, and the
// policy objectives they optimize.

#ifndef ALROBUST_OPTIMAL_HPP_
#define ALROBUST_OPTIMAL_HPP_

#include <cstddef>
#include <iosfwd>

#include "alrobust/core.hpp"
#include "alrobust/policies.hpp"
#include "alrobust/utilities.hpp"

namespace alrobust {

// Expected utility E_{h~p}[f_p(x^pi_h, h)].
double f_avg(const Prior& p, const Utility& u, const Instance& inst,
             const PolicyTree& policy);

// Worst-case utility min_{h in H} f_p(x^pi_h, h), over all of H including
// zero-probability hypotheses.
double f_worst(const Prior& p, const Utility& u, const Instance& inst,
               const PolicyTree& policy);

// Expected path length E_{h~p}[c(pi, h)]. Throws ContractError when some
// positive-probability hypothesis is not identified at its leaf.
double c_avg(const Prior& p, const Instance& inst, const PolicyTree& policy);

struct OptCaps {
  std::size_t max_examples = 6;
  std::size_t max_hypotheses = 16;
  std::size_t max_budget = 4;
};

struct OptOptions {
  OptCaps caps;
  bool memoize = true;
  // > 1 restricts the search to batch policies: blocks of this many queries
  // fixed before their labels are observed.
  std::size_t batch_size = 1;
};

struct OptResult {
  double value = 0.0;
  PolicyTree policy{0};
  std::size_t nodes_explored = 0;
};

// max over policies of f_avg. Ties go to the lowest example index.
OptResult opt_avg(const Prior& p, const Utility& u, const Instance& inst,
                  std::size_t budget, const OptOptions& options = {});

// max over policies of f_worst.
OptResult opt_worst(const Prior& p, const Utility& u, const Instance& inst,
                    std::size_t budget, const OptOptions& options = {});

// min over identifying policies of c_avg. A node stops once at most one
// positive-probability hypothesis remains consistent.
OptResult opt_min_cost(const Prior& p, const Instance& inst,
                       const OptOptions& options = {});

// `value=<v>` followed by the policy text.
void write_opt_result(std::ostream& out, const OptResult& result,
                      const Instance& inst);

}  // namespace alrobust

#endif  // ALROBUST_OPTIMAL_HPP_
