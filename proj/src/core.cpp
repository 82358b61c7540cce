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

#include "alrobust/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "alrobust/errors.hpp"
#include "alrobust/kernels.hpp"

namespace alrobust {
namespace {

void check_distinct(const std::vector<std::string>& names,
                    std::string_view what) {
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (n.empty()) throw InputError(std::string(what) + " name is empty");
    if (!seen.insert(n).second) {
      throw InputError("duplicate " + std::string(what) + " '" + n + "'");
    }
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  for (auto& f : out) {
    while (!f.empty() && (f.back() == '\r' || f.back() == ' ')) f.pop_back();
    std::size_t start = 0;
    while (start < f.size() && f[start] == ' ') ++start;
    f.erase(0, start);
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------- Instance

Instance::Instance(std::vector<std::string> examples,
                   std::vector<std::string> labels,
                   std::vector<Hypothesis> hypotheses)
    : examples_(std::move(examples)),
      labels_(std::move(labels)),
      hypotheses_(std::move(hypotheses)) {
  if (examples_.empty()) throw InputError("instance needs at least 1 example");
  if (labels_.size() < 2) throw InputError("instance needs at least 2 labels");
  if (hypotheses_.empty()) throw InputError("instance has no hypotheses");
  check_distinct(examples_, "example");
  check_distinct(labels_, "label");
  std::set<std::string> ids;
  std::set<std::vector<LabelIndex>> labelings;
  for (const auto& h : hypotheses_) {
    if (h.labels.size() != examples_.size()) {
      throw InputError("hypothesis '" + h.id + "' labels " +
                       std::to_string(h.labels.size()) + " examples, pool has " +
                       std::to_string(examples_.size()));
    }
    for (LabelIndex y : h.labels) {
      if (y >= labels_.size()) {
        throw InputError("hypothesis '" + h.id + "' uses an unknown label");
      }
    }
    if (!ids.insert(h.id).second) {
      throw InputError("duplicate hypothesis id '" + h.id + "'");
    }
    if (!labelings.insert(h.labels).second) {
      throw InputError("hypothesis '" + h.id + "' duplicates another labeling");
    }
  }
  const std::size_t nh = hypotheses_.size();
  indicators_.assign(examples_.size() * labels_.size() * nh, 0.0);
  for (std::size_t h = 0; h < nh; ++h) {
    for (std::size_t x = 0; x < examples_.size(); ++x) {
      const std::size_t y = hypotheses_[h].labels[x];
      indicators_[(x * labels_.size() + y) * nh + h] = 1.0;
    }
  }
}

Instance Instance::all_labelings(std::vector<std::string> examples,
                                 std::vector<std::string> labels) {
  const std::size_t nx = examples.size();
  const std::size_t ny = labels.size();
  if (nx == 0 || ny < 2) {
    throw InputError("need at least 1 example and 2 labels");
  }
  double total = std::pow(static_cast<double>(ny), static_cast<double>(nx));
  if (total > static_cast<double>(1u << 22)) {
    throw SizeError("Y^X has too many labelings to enumerate");
  }
  const auto count = static_cast<std::size_t>(total);
  std::vector<Hypothesis> hyps;
  hyps.reserve(count);
  for (std::size_t code = 0; code < count; ++code) {
    Hypothesis h{"h" + std::to_string(code + 1), std::vector<LabelIndex>(nx)};
    std::size_t c = code;
    for (std::size_t x = 0; x < nx; ++x) {
      h.labels[x] = c % ny;
      c /= ny;
    }
    hyps.push_back(std::move(h));
  }
  return Instance(std::move(examples), std::move(labels), std::move(hyps));
}

std::span<const double> Instance::indicator(ExampleIndex x,
                                            LabelIndex y) const {
  const std::size_t nh = hypotheses_.size();
  return std::span<const double>(indicators_)
      .subspan((x * labels_.size() + y) * nh, nh);
}

bool Instance::agree_on(HypothesisIndex h1, HypothesisIndex h2,
                        std::span<const ExampleIndex> examples) const {
  for (ExampleIndex x : examples) {
    if (hypotheses_[h1].labels[x] != hypotheses_[h2].labels[x]) return false;
  }
  return true;
}

ExampleIndex Instance::find_example(std::string_view name) const {
  auto it = std::find(examples_.begin(), examples_.end(), name);
  if (it == examples_.end()) {
    throw InputError("unknown example '" + std::string(name) + "'");
  }
  return static_cast<ExampleIndex>(it - examples_.begin());
}

LabelIndex Instance::find_label(std::string_view name) const {
  auto it = std::find(labels_.begin(), labels_.end(), name);
  if (it == labels_.end()) {
    throw InputError("unknown label '" + std::string(name) + "'");
  }
  return static_cast<LabelIndex>(it - labels_.begin());
}

HypothesisIndex Instance::find_hypothesis(std::string_view id) const {
  for (std::size_t h = 0; h < hypotheses_.size(); ++h) {
    if (hypotheses_[h].id == id) return h;
  }
  throw InputError("unknown hypothesis '" + std::string(id) + "'");
}

void Instance::check_example(ExampleIndex x) const {
  if (x >= examples_.size()) {
    throw InputError("example index " + std::to_string(x) + " out of range");
  }
}

void Instance::check_label(LabelIndex y) const {
  if (y >= labels_.size()) {
    throw InputError("label index " + std::to_string(y) + " out of range");
  }
}

void Instance::check_hypothesis(HypothesisIndex h) const {
  if (h >= hypotheses_.size()) {
    throw InputError("hypothesis index " + std::to_string(h) +
                     " out of range");
  }
}

// ------------------------------------------------------------------- Prior

Prior::Prior(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InputError("prior is empty");
  for (double v : probs_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InputError("prior has a negative or non-finite entry");
    }
  }
  const double total = kernels::scalar::sum(probs_);
  if (std::fabs(total - 1.0) > kNormTolerance) {
    throw InputError("prior sums to " + format_double(total) + ", not 1");
  }
}

Prior Prior::from_weights(std::vector<double> weights) {
  if (weights.empty()) throw InputError("prior is empty");
  for (double v : weights) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InputError("weights must be finite and nonnegative");
    }
  }
  const double total = kernels::scalar::sum(weights);
  if (!(total > 0.0)) throw InputError("weights sum to zero");
  for (double& v : weights) v /= total;
  return Prior(std::move(weights));
}

Prior Prior::uniform(std::size_t n) {
  if (n == 0) throw InputError("prior is empty");
  return Prior(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Prior Prior::point_mass(std::size_t n, HypothesisIndex h) {
  if (h >= n) throw InputError("point mass index out of range");
  std::vector<double> v(n, 0.0);
  v[h] = 1.0;
  return Prior(std::move(v));
}

std::size_t Prior::support_size() const {
  return static_cast<std::size_t>(
      std::count_if(probs_.begin(), probs_.end(), [](double v) { return v > 0; }));
}

double Prior::min_positive() const {
  double m = 1.0;
  for (double v : probs_) {
    if (v > 0.0) m = std::min(m, v);
  }
  return m;
}

double Prior::min_entry() const {
  return *std::min_element(probs_.begin(), probs_.end());
}

// ------------------------------------------------------------ Operations

void validate_labeled_set(const Instance& inst, const LabeledSet& d) {
  std::vector<bool> seen(inst.num_examples(), false);
  for (const auto& o : d) {
    inst.check_example(o.example);
    inst.check_label(o.label);
    if (seen[o.example]) {
      throw InputError("example '" + inst.example_name(o.example) +
                       "' observed twice");
    }
    seen[o.example] = true;
  }
}

double label_prob(const Prior& p, const Instance& inst, ExampleIndex x,
                  LabelIndex y) {
  inst.check_example(x);
  inst.check_label(y);
  return kernels::dot(p.probs(), inst.indicator(x, y));
}

double label_seq_prob(const Prior& p, const Instance& inst,
                      std::span<const ExampleIndex> examples,
                      std::span<const LabelIndex> labels) {
  if (examples.size() != labels.size()) {
    throw InputError("example and label sequences differ in length");
  }
  if (p.size() != inst.num_hypotheses()) {
    throw InputError("prior dimension does not match the instance");
  }
  for (std::size_t i = 0; i < examples.size(); ++i) {
    inst.check_example(examples[i]);
    inst.check_label(labels[i]);
  }
  if (examples.empty()) return 1.0;
  if (examples.size() == 1) {
    return kernels::dot(p.probs(), inst.indicator(examples[0], labels[0]));
  }
  std::vector<double> mask(inst.indicator(examples[0], labels[0]).begin(),
                           inst.indicator(examples[0], labels[0]).end());
  for (std::size_t i = 1; i < examples.size(); ++i) {
    auto ind = inst.indicator(examples[i], labels[i]);
    for (std::size_t h = 0; h < mask.size(); ++h) mask[h] *= ind[h];
  }
  return kernels::dot(p.probs(), mask);
}

Prior condition(const Prior& p, const Instance& inst, ExampleIndex x,
                LabelIndex y) {
  inst.check_example(x);
  inst.check_label(y);
  if (p.size() != inst.num_hypotheses()) {
    throw InputError("prior dimension does not match the instance");
  }
  auto ind = inst.indicator(x, y);
  const double mass = kernels::dot(p.probs(), ind);
  if (!(mass > 0.0)) throw EmptyVersionSpaceError();
  std::vector<double> out(p.size());
  for (std::size_t h = 0; h < out.size(); ++h) out[h] = p[h] * ind[h] / mass;
  return Prior(std::move(out));
}

Prior posterior(const Prior& p, const Instance& inst, const LabeledSet& d) {
  validate_labeled_set(inst, d);
  Prior cur = p;
  for (const auto& o : d) cur = condition(cur, inst, o.example, o.label);
  return cur;
}

double l1_distance(const Prior& p, const Prior& q) {
  if (p.size() != q.size()) throw InputError("prior dimensions differ");
  return kernels::l1_distance(p.probs(), q.probs());
}

ModelEnsemble::ModelEnsemble(std::size_t num_examples, std::size_t num_labels,
                             std::vector<Member> members)
    : num_examples_(num_examples),
      num_labels_(num_labels),
      members_(std::move(members)) {
  if (members_.empty()) throw InputError("ensemble has no members");
  double total = 0.0;
  for (const auto& m : members_) {
    if (!(m.weight >= 0.0)) throw InputError("negative ensemble weight");
    total += m.weight;
    if (m.predictor.probs.size() != num_examples_ * num_labels_) {
      throw InputError("predictor table has the wrong size");
    }
    for (std::size_t x = 0; x < num_examples_; ++x) {
      double s = 0.0;
      for (std::size_t y = 0; y < num_labels_; ++y) {
        const double v = m.predictor.probs[x * num_labels_ + y];
        if (!(v >= 0.0 && v <= 1.0)) {
          throw InputError("predictor probability outside [0,1]");
        }
        s += v;
      }
      if (std::fabs(s - 1.0) > kNormTolerance) {
        throw InputError("predictor label distribution does not sum to 1");
      }
    }
  }
  if (std::fabs(total - 1.0) > kNormTolerance) {
    throw InputError("ensemble weights do not sum to 1");
  }
}

Prior induce_prior(const ModelEnsemble& ens, const Instance& inst) {
  if (ens.num_examples() != inst.num_examples() ||
      ens.num_labels() != inst.num_labels()) {
    throw InputError("ensemble shape does not match the instance");
  }
  std::vector<double> probs(inst.num_hypotheses(), 0.0);
  for (std::size_t h = 0; h < inst.num_hypotheses(); ++h) {
    double total = 0.0;
    for (std::size_t m = 0; m < ens.members().size(); ++m) {
      double lik = ens.members()[m].weight;
      for (std::size_t x = 0; x < inst.num_examples() && lik > 0.0; ++x) {
        lik *= ens.predict(m, x, inst.label_of(h, x));
      }
      total += lik;
    }
    probs[h] = total;
  }
  // Renormalizing conditions on H when H is a strict subset of Y^X.
  return Prior::from_weights(std::move(probs));
}

Prior perturb(const Prior& p, double radius, std::uint64_t seed) {
  if (!(radius >= 0.0 && radius <= 2.0)) {
    throw InputError("perturbation radius must lie in [0, 2]");
  }
  const std::size_t n = p.size();
  if (radius == 0.0 || n == 1) return p;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> dir(n);
  std::vector<double> q(n);
  for (int attempt = 0; attempt < 100; ++attempt) {
    for (double& d : dir) d = normal(rng);
    const double mean = std::accumulate(dir.begin(), dir.end(), 0.0) /
                        static_cast<double>(n);
    double norm = 0.0;
    for (double& d : dir) {
      d -= mean;
      norm += std::fabs(d);
    }
    const double r = radius * unit(rng);
    if (!(norm > 0.0)) continue;
    double total = 0.0;
    for (std::size_t h = 0; h < n; ++h) {
      q[h] = std::max(0.0, p[h] + dir[h] * (r / norm));
      total += q[h];
    }
    if (!(total > 0.0)) continue;
    for (double& v : q) v /= total;
    if (kernels::scalar::l1_distance(p.probs(), q) <= radius) {
      return Prior(q);
    }
  }
  throw InputError("perturb: no valid sample within radius after 100 tries");
}

Prior random_prior(std::size_t n, std::mt19937_64& rng) {
  if (n == 0) throw InputError("prior is empty");
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(n);
  for (double& v : w) v = expo(rng);
  return Prior::from_weights(std::move(w));
}

// ------------------------------------------------------------------ Files

InstanceWithPrior read_instance(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> examples;
  std::vector<std::string> labels;
  std::vector<Hypothesis> hyps;
  std::vector<double> probs;
  bool have_examples = false;
  bool have_labels = false;
  auto fail = [&](const std::string& msg) -> InputError {
    return InputError("line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_csv_line(line);
    if (!have_examples) {
      if (fields.empty() || fields[0] != "examples") {
        throw fail("expected 'examples,...' header");
      }
      examples.assign(fields.begin() + 1, fields.end());
      have_examples = true;
      continue;
    }
    if (!have_labels) {
      if (fields.empty() || fields[0] != "labels") {
        throw fail("expected 'labels,...' header");
      }
      labels.assign(fields.begin() + 1, fields.end());
      have_labels = true;
      continue;
    }
    if (fields.empty() || fields[0] != "h") {
      throw fail("expected a hypothesis row 'h,<id>,<prob>,<labels...>'");
    }
    if (fields.size() != examples.size() + 3) {
      throw fail("hypothesis row has " + std::to_string(fields.size()) +
                 " fields, expected " + std::to_string(examples.size() + 3));
    }
    double prob = 0.0;
    const auto& ps = fields[2];
    auto res = std::from_chars(ps.data(), ps.data() + ps.size(), prob);
    if (res.ec != std::errc() || res.ptr != ps.data() + ps.size() ||
        !(prob >= 0.0) || !std::isfinite(prob)) {
      throw fail("bad probability '" + ps + "'");
    }
    Hypothesis h{fields[1], {}};
    for (std::size_t i = 3; i < fields.size(); ++i) {
      auto it = std::find(labels.begin(), labels.end(), fields[i]);
      if (it == labels.end()) throw fail("unknown label '" + fields[i] + "'");
      h.labels.push_back(static_cast<LabelIndex>(it - labels.begin()));
    }
    hyps.push_back(std::move(h));
    probs.push_back(prob);
  }
  if (!have_examples || !have_labels) {
    throw InputError("line " + std::to_string(line_no) +
                     ": missing examples/labels header");
  }
  if (hyps.empty()) {
    throw InputError("line " + std::to_string(line_no) +
                     ": no hypothesis rows");
  }
  const double total = kernels::scalar::sum(probs);
  if (std::fabs(total - 1.0) > 1e-6) {
    throw InputError("line " + std::to_string(line_no) +
                     ": probabilities sum to " + format_double(total));
  }
  try {
    Instance inst(std::move(examples), std::move(labels), std::move(hyps));
    // Keep stored values exact when they already pass the strict check.
    Prior prior = std::fabs(total - 1.0) <= kNormTolerance
                      ? Prior(std::move(probs))
                      : Prior::from_weights(std::move(probs));
    return {std::move(inst), std::move(prior)};
  } catch (const InputError& e) {
    throw InputError("line " + std::to_string(line_no) + ": " + e.what());
  }
}

InstanceWithPrior load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open instance file '" + path + "'");
  try {
    return read_instance(in);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_instance(std::ostream& out, const Instance& inst, const Prior& p) {
  if (p.size() != inst.num_hypotheses()) {
    throw InputError("prior dimension does not match the instance");
  }
  out << "examples";
  for (const auto& x : inst.examples()) out << ',' << x;
  out << "\nlabels";
  for (const auto& y : inst.labels()) out << ',' << y;
  out << '\n';
  for (std::size_t h = 0; h < inst.num_hypotheses(); ++h) {
    const auto& hyp = inst.hypothesis(h);
    out << "h," << hyp.id << ',' << format_double(p[h]);
    for (LabelIndex y : hyp.labels) out << ',' << inst.label_name(y);
    out << '\n';
  }
}

}  // namespace alrobust
