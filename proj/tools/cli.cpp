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

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "alrobust/core.hpp"
#include "alrobust/errors.hpp"
#include "alrobust/mixture.hpp"
#include "alrobust/optimal.hpp"
#include "alrobust/policies.hpp"
#include "alrobust/robustness.hpp"
#include "alrobust/synthetic.hpp"
#include "alrobust/utilities.hpp"

namespace alrobust::cli {
namespace {

namespace fs = std::filesystem;

// Bound failures are reported through the exit code, not as an error.
struct Outcome {
  std::string text;
  int status = kExitOk;
};

struct Settings {
  std::string config;
  std::string output;
  std::uint64_t seed = 1;

  // Instance source.
  std::string instance_path;
  std::size_t examples = 0;
  std::size_t hypotheses = 0;
  std::size_t labels = 2;
  bool uniform_prior = false;

  // run / optimal
  std::string criterion = "max_gibbs";
  std::string utility = "version_space_reduction";
  std::string loss_file;
  double mu = 0.01;
  std::size_t budget = 1;
  bool budget_given = false;
  bool identify = false;
  std::string objective = "avg";
  bool no_memo = false;

  // verify
  bool counterexample = false;
  std::string mode = "avg";
  double delta = 0.1;
  std::optional<double> ce_mu;
  double constant = 1.0;
  double alpha = 1.0;
  std::string suite = "all";
  std::size_t instances = 100;
  std::vector<double> radii = {0.05, 0.1, 0.3, 0.5};
  std::size_t trials = 10;
  std::size_t max_examples = 4;
  std::size_t max_hypotheses = 8;
  std::size_t max_budget = 2;
  std::size_t max_components = 4;

  // mixture-demo
  std::size_t components = 4;
  std::vector<std::string> component_files;
  std::size_t seeds = 100;
  bool with_passive = false;
  bool map_marginals = false;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool user_set(const std::vector<std::string>& args, const std::string& key) {
  const std::string flag = "--" + key;
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Splices `key=value` lines of the --config file into the argument list as
// `--key=value`, skipping keys that also appear as flags.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  std::vector<std::string> injected;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty()) {
      throw InputError(path + ": line " + std::to_string(line_no) +
                       ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key == "config") {
      throw InputError(path + ": line " + std::to_string(line_no) +
                       ": config files cannot include other config files");
    }
    if (user_set(args, key)) continue;
    injected.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
  }
  std::vector<std::string> merged{args.front()};
  merged.insert(merged.end(), injected.begin(), injected.end());
  merged.insert(merged.end(), args.begin() + 1, args.end());
  return merged;
}

void add_common(CLI::App* app, Settings& s) {
  app->add_option("--config", s.config, "Flat key=value file; flags win");
  app->add_option("--output,-o", s.output,
                  std::string("Output file (default: $") + kOutputDirEnv +
                      "/<command> or stdout)");
  app->add_option("--seed", s.seed, "Random seed");
}

void add_instance_source(CLI::App* app, Settings& s) {
  app->add_option("--instance", s.instance_path, "Instance file");
  app->add_option("--examples", s.examples,
                  "Synthetic instance: pool size (used without --instance)");
  app->add_option("--hypotheses", s.hypotheses, "Synthetic instance: |H|");
  app->add_option("--labels", s.labels, "Synthetic instance: |Y|");
  app->add_flag("--uniform-prior", s.uniform_prior,
                "Replace the prior with the uniform one");
}

InstanceWithPrior load_source(const Settings& s) {
  InstanceWithPrior data = [&] {
    if (!s.instance_path.empty()) return load_instance_file(s.instance_path);
    if (s.examples == 0 || s.hypotheses == 0) {
      throw InputError(
          "an instance is required: --instance FILE or --examples N "
          "--hypotheses N");
    }
    return random_instance(s.examples, s.hypotheses, s.labels, s.seed);
  }();
  if (s.uniform_prior) {
    data.prior = Prior::uniform(data.instance.num_hypotheses());
  }
  return data;
}

LossMatrix load_loss(const Settings& s, const Instance& inst) {
  if (s.loss_file.empty()) return LossMatrix::zero_one(inst.num_hypotheses());
  return load_loss_matrix_file(s.loss_file, inst.num_hypotheses());
}

Utility make_utility(const Settings& s, const Instance& inst) {
  if (s.utility == "version_space_reduction" || s.utility == "vsr") {
    return Utility::version_space_reduction();
  }
  if (s.utility == "generalized") return Utility::generalized(load_loss(s, inst));
  if (s.utility == "pruning_count") return Utility::pruning_count(s.mu);
  throw InputError("unknown utility '" + s.utility + "'");
}

Criterion make_criterion(const Settings& s, const Instance& inst) {
  if (s.criterion == "worst_gen_gibbs") {
    return Criterion::worst_gen_gibbs(load_loss(s, inst));
  }
  return Criterion::parse(s.criterion);
}

std::string header(const std::string& command) {
  return std::string("# ") + kCsvVersion + " " + command + "\n";
}

std::string join_names(const std::vector<std::size_t>& idx,
                       const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) out += ';';
    out += names[idx[i]];
  }
  return out;
}

Outcome cmd_run(const Settings& s) {
  const auto data = load_source(s);
  const auto& inst = data.instance;
  const Utility u = make_utility(s, inst);
  const Criterion c = make_criterion(s, inst);
  BuildOptions options;
  options.stop_when_identified = s.identify;
  std::ostringstream out;
  out << header("run") << "hypothesis,queried,labels,utility,cost\n";
  for (HypothesisIndex h = 0; h < inst.num_hypotheses(); ++h) {
    const PolicyRun run = greedy_path(c, data.prior, inst, s.budget, h, options);
    out << inst.hypothesis(h).id << ','
        << join_names(run.queried, inst.examples()) << ','
        << join_names(run.labels, inst.labels()) << ','
        << format_double(eval_utility(u, data.prior, inst, run.queried, h))
        << ',' << run.cost << '\n';
  }
  return {out.str()};
}

Outcome cmd_optimal(const Settings& s) {
  const auto data = load_source(s);
  const auto& inst = data.instance;
  OptOptions options;
  options.memoize = !s.no_memo;
  OptResult result;
  if (s.objective == "avg") {
    result = opt_avg(data.prior, make_utility(s, inst), inst, s.budget, options);
  } else if (s.objective == "worst") {
    result =
        opt_worst(data.prior, make_utility(s, inst), inst, s.budget, options);
  } else if (s.objective == "mincost") {
    result = opt_min_cost(data.prior, inst, options);
  } else {
    throw InputError("unknown objective '" + s.objective +
                     "' (expected avg, worst or mincost)");
  }
  std::ostringstream out;
  out << header("optimal");
  write_opt_result(out, result, inst);
  return {out.str()};
}

Outcome cmd_counterexample(const Settings& s) {
  CoverageMode mode;
  if (s.mode == "avg") {
    mode = CoverageMode::kAverage;
  } else if (s.mode == "worst") {
    mode = CoverageMode::kWorst;
  } else {
    throw InputError("unknown mode '" + s.mode + "' (expected avg or worst)");
  }
  const double mu =
      s.ce_mu.value_or(mode == CoverageMode::kAverage ? 0.0 : 0.01);
  const Counterexample ce = counterexample_instance(s.delta, mu, mode);
  std::ostringstream out;
  out << header("counterexample") << "quantity,value\n"
      << "mode," << s.mode << '\n'
      << "delta," << format_double(ce.delta) << '\n'
      << "mu," << format_double(ce.mu) << '\n'
      << "f_p1_pi0," << format_double(ce.f_p1_query_x0) << '\n'
      << "f_p1_pi1," << format_double(ce.f_p1_query_x1) << '\n'
      << "f_p0_pi1," << format_double(ce.f_p0_query_x1) << '\n'
      << "f_p0_pi0," << format_double(ce.f_p0_query_x0) << '\n'
      << "l1," << format_double(ce.l1) << '\n'
      << "opt_p0," << format_double(ce.opt_p0) << '\n'
      << "pi1_optimal_for_p1," << (ce.query_x1_optimal_for_p1 ? "true" : "false")
      << '\n'
      << "constant," << format_double(s.constant) << '\n'
      << "alpha," << format_double(s.alpha) << '\n'
      << "violation," << (ce.violates(s.constant, s.alpha) ? "true" : "false")
      << '\n';
  return {out.str()};
}

Outcome cmd_verify(const Settings& s) {
  if (s.counterexample) return cmd_counterexample(s);
  for (double r : s.radii) {
    if (!(r >= 0.0 && r <= 2.0)) {
      throw InputError("radii must lie in [0, 2]");
    }
  }
  std::vector<BoundReport> reports;
  if (!s.instance_path.empty() || s.examples > 0) {
    const auto data = load_source(s);
    const auto& inst = data.instance;
    const std::size_t budget =
        s.budget_given ? s.budget
                       : std::min<std::size_t>(2, inst.num_examples());
    for (std::size_t r = 0; r < s.radii.size(); ++r) {
      for (std::size_t t = 0; t < s.trials; ++t) {
        const std::uint64_t seed = s.seed + 1000003ULL * r + t;
        for (auto& rep :
             robustness_checks(inst, data.prior, budget, s.radii[r], seed)) {
          rep.parameters.emplace_back("radius", s.radii[r]);
          rep.parameters.emplace_back("trial", static_cast<double>(t));
          reports.push_back(std::move(rep));
        }
      }
    }
  } else {
    SweepConfig config;
    config.instances = s.instances;
    config.radii = s.radii;
    config.seed = s.seed;
    config.max_examples = s.max_examples;
    config.max_hypotheses = s.max_hypotheses;
    config.max_budget = s.max_budget;
    config.max_components = s.max_components;
    if (config.instances == 0) throw InputError("--instances must be >= 1");
    if (config.max_examples < config.min_examples) {
      throw InputError("--max-examples must be >= 2");
    }
    if (config.max_budget == 0) throw InputError("--max-budget must be >= 1");
    if (config.max_components == 0) {
      throw InputError("--max-components must be >= 1");
    }
    auto append = [&](std::vector<BoundReport> more) {
      for (auto& r : more) reports.push_back(std::move(r));
    };
    if (s.suite != "all" && s.suite != "approx" && s.suite != "robustness" &&
        s.suite != "mixture") {
      throw InputError("unknown suite '" + s.suite +
                       "' (expected all, approx, robustness or mixture)");
    }
    if (s.suite == "all" || s.suite == "approx") {
      append(sweep_approximation(config));
    }
    if (s.suite == "all" || s.suite == "robustness") {
      append(sweep_robustness(config));
    }
    if (s.suite == "all" || s.suite == "mixture") append(sweep_mixture(config));
  }
  std::ostringstream out;
  out << header("verify");
  write_report_header(out);
  bool all_hold = true;
  for (const auto& r : reports) {
    write_report_row(out, r);
    all_hold = all_hold && r.holds;
  }
  return {out.str(), all_hold ? kExitOk : kExitBoundFailed};
}

Outcome cmd_mixture(const Settings& s) {
  MixtureState initial;
  if (!s.component_files.empty()) {
    std::vector<Prior> priors;
    std::optional<Instance> inst;
    for (const auto& path : s.component_files) {
      auto data = load_instance_file(path);
      if (inst && !(*inst == data.instance)) {
        throw InputError(path + ": component instances must be identical");
      }
      if (!inst) inst = data.instance;
      priors.push_back(std::move(data.prior));
    }
    initial = mixture_from_priors(*inst, std::move(priors));
  } else {
    LogisticTask task = default_logistic_task();
    if (s.components < 1 || s.components > task.strengths.size()) {
      throw InputError("--components must be between 1 and " +
                       std::to_string(task.strengths.size()));
    }
    task.strengths.resize(s.components);
    initial = mixture_from_ensembles(task.component_ensembles());
  }
  if (s.budget > initial.num_examples()) {
    throw InputError("--budget exceeds the pool size");
  }
  if (s.seeds == 0) throw InputError("--seeds must be >= 1");
  Criterion criterion = Criterion::parse(s.criterion);
  MixtureOptions options;
  options.exact_marginals = !s.map_marginals;

  std::ostringstream out;
  out << header("mixture-demo") << "mode,seed,step,example,label";
  const std::size_t k = initial.components.size();
  for (std::size_t i = 0; i < k; ++i) out << ",w" << i + 1;
  out << ",accuracy\n";
  std::vector<std::pair<std::string, QueryMode>> modes{
      {"active", QueryMode::kActive}};
  if (s.with_passive) modes.emplace_back("passive", QueryMode::kPassive);
  for (const auto& [name, mode] : modes) {
    double final_sum = 0.0;
    for (std::size_t t = 0; t < s.seeds; ++t) {
      const Trial trial =
          run_trial(initial, s.seed + t, s.budget, criterion, mode, options);
      for (const auto& step : trial.steps) {
        out << name << ',' << trial.seed << ',' << step.step << ',';
        if (step.step > 0) out << step.example << ',' << step.label;
        else out << ',';
        for (double w : step.weights) out << ',' << format_double(w);
        out << ',' << format_double(step.accuracy) << '\n';
      }
      final_sum += trial.steps.back().accuracy;
    }
    out << "mean_" << name << ",," << s.budget << ",,";
    for (std::size_t i = 0; i < k; ++i) out << ',';
    out << ',' << format_double(final_sum / static_cast<double>(s.seeds))
        << '\n';
  }
  return {out.str()};
}

Outcome cmd_gen_instance(const Settings& s) {
  if (s.examples == 0 || s.hypotheses == 0) {
    throw InputError("--examples and --hypotheses are required");
  }
  auto data = random_instance(s.examples, s.hypotheses, s.labels, s.seed);
  if (s.uniform_prior) data.prior = Prior::uniform(s.hypotheses);
  std::ostringstream out;
  write_instance(out, data.instance, data.prior);
  return {out.str()};
}

// Writes through a temporary file so a failure never leaves a partial one.
void write_atomically(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InputError("cannot write '" + path.string() + "'");
    f << text;
    f.flush();
    if (!f) {
      f.close();
      fs::remove(tmp);
      throw InputError("cannot write '" + path.string() + "'");
    }
  }
  fs::rename(tmp, path);
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out,
            std::ostream& err) {
  Settings s;
  CLI::App app{"Bayesian pool-based active learning under prior misspecification"};
  app.name("alrobust");
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Greedy policy path for every hypothesis");
  add_common(run, s);
  add_instance_source(run, s);
  run->add_option("--criterion", s.criterion,
                  "max_gibbs, least_confidence, max_entropy, gbs, worst_gen_gibbs");
  run->add_option("--utility", s.utility,
                  "version_space_reduction, generalized, pruning_count");
  run->add_option("--loss-file", s.loss_file, "Loss matrix for generalized");
  run->add_option("--mu", s.mu, "Pruning-count threshold");
  run->add_option("--budget", s.budget, "Query budget");
  run->add_flag("--identify", s.identify,
                "Stop once one positive-probability hypothesis remains");

  auto* optimal = app.add_subcommand("optimal", "Exact optimal policy by search");
  add_common(optimal, s);
  add_instance_source(optimal, s);
  optimal->add_option("--objective", s.objective, "avg, worst or mincost");
  optimal->add_option("--utility", s.utility,
                      "version_space_reduction, generalized, pruning_count");
  optimal->add_option("--loss-file", s.loss_file, "Loss matrix for generalized");
  optimal->add_option("--mu", s.mu, "Pruning-count threshold");
  optimal->add_option("--budget", s.budget, "Query budget");
  optimal->add_flag("--no-memo", s.no_memo, "Disable memoization");

  auto add_counterexample = [&s](CLI::App* app) {
    app->add_option("--mode", s.mode, "avg or worst");
    app->add_option("--delta", s.delta, "Perturbation size");
    app->add_option("--mu", s.ce_mu,
                    "Pruning threshold (0 for avg, default 0.01 for worst)");
    app->add_option("--constant", s.constant, "Constant C of the tested bound");
    app->add_option("--alpha", s.alpha, "Approximation factor of the tested bound");
  };

  auto* verify = app.add_subcommand("verify", "Check robustness bounds");
  add_common(verify, s);
  add_instance_source(verify, s);
  verify->add_flag("--counterexample", s.counterexample,
                   "Evaluate the non-Lipschitz counterexample instead");
  add_counterexample(verify);
  verify->add_option("--suite", s.suite, "all, approx, robustness or mixture");
  verify->add_option("--instances", s.instances, "Random instances per suite");
  verify->add_option("--radii", s.radii, "Perturbation radii")->delimiter(',');
  verify->add_option("--trials", s.trials,
                     "Perturbations per radius with --instance");
  verify->add_option("--budget", s.budget, "Query budget with --instance");
  verify->add_option("--max-examples", s.max_examples, "Sweep pool size cap");
  verify->add_option("--max-hypotheses", s.max_hypotheses, "Sweep |H| cap");
  verify->add_option("--max-budget", s.max_budget, "Sweep budget cap");
  verify->add_option("--max-components", s.max_components,
                     "Sweep mixture size cap");

  auto* counter = app.add_subcommand(
      "counterexample", "Same as verify --counterexample");
  add_common(counter, s);
  add_counterexample(counter);

  auto* mixture = app.add_subcommand("mixture-demo",
                                     "Mixture-prior active learning trials");
  add_common(mixture, s);
  mixture->add_option("--components", s.components,
                      "Number of logistic-grid components (1-4)");
  mixture->add_option("--component-file", s.component_files,
                      "Instance file per component (repeatable)");
  mixture->add_option("--criterion", s.criterion,
                      "max_gibbs, least_confidence, max_entropy or gbs");
  mixture->add_option("--budget", s.budget, "Queries per trial");
  mixture->add_option("--seeds", s.seeds, "Number of trials");
  mixture->add_flag("--with-passive", s.with_passive,
                    "Also run uniform-random querying");
  mixture->add_flag("--map-marginals", s.map_marginals,
                    "Use each component's MAP hypothesis for selection");

  auto* gen = app.add_subcommand("gen-instance", "Write a random instance file");
  add_common(gen, s);
  gen->add_option("--examples", s.examples, "Pool size")->required();
  gen->add_option("--hypotheses", s.hypotheses, "|H|")->required();
  gen->add_option("--labels", s.labels, "|Y|");
  gen->add_flag("--uniform-prior", s.uniform_prior, "Uniform prior");

  try {
    std::vector<std::string> args = merge_config(raw_args);
    if (!args.empty() && args.front() == "mixture-demo") s.budget = 8;
    s.budget_given = user_set(args, "budget");
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  std::string command;
  Outcome outcome;
  try {
    if (run->parsed()) {
      command = "run";
      outcome = cmd_run(s);
    } else if (optimal->parsed()) {
      command = "optimal";
      outcome = cmd_optimal(s);
    } else if (verify->parsed()) {
      command = s.counterexample ? "counterexample" : "verify";
      outcome = cmd_verify(s);
    } else if (counter->parsed()) {
      command = "counterexample";
      outcome = cmd_counterexample(s);
    } else if (mixture->parsed()) {
      command = "mixture-demo";
      outcome = cmd_mixture(s);
    } else if (gen->parsed()) {
      command = "gen-instance";
      outcome = cmd_gen_instance(s);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    fs::path target = s.output;
    if (target.empty()) {
      const char* dir = std::getenv(kOutputDirEnv);
      if (dir != nullptr && *dir != '\0') {
        const std::string ext = command == "gen-instance" ? ".txt" : ".csv";
        target = fs::path(dir) / (command + ext);
      }
    }
    if (target.empty()) {
      out << outcome.text;
    } else {
      write_atomically(target, outcome.text);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  if (outcome.status == kExitBoundFailed) {
    err << "error: at least one bound does not hold\n";
  }
  return outcome.status;
}

}  // namespace alrobust::cli
