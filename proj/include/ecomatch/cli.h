// Copyright 2020 The Authors.
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

//
//  Command line front end: gen, solve, simulate, verify.
//
//  Exit codes: 0 success, 1 runtime or input error (or a failed verify),
//  2 bad command line.
//

#ifndef ECOMATCH_CLI_H_
#define ECOMATCH_CLI_H_

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ecomatch/colgen.h"
#include "ecomatch/ecosim.h"
#include "ecomatch/experiment.h"
#include "ecomatch/fixtures.h"
#include "ecomatch/instance_io.h"
#include "ecomatch/matching.h"
#include "ecomatch/synthetic.h"

namespace ecomatch {

inline std::string Fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

inline std::string JoinIds(const std::vector<int>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? "," : "") + std::to_string(ids[i]);
  return s;
}

// One-shot policy for `solve`.
inline MatchingPolicy SolveOnce(const Instance& instance, PolicyKind kind, double lambda,
                                double theta) {
  switch (kind) {
    case PolicyKind::kMyopic: return MyopicAssignment(instance);
    case PolicyKind::kGreedy: return GreedyProviders(instance);
    case PolicyKind::kExact: return ExactEnumeration(instance);
    case PolicyKind::kLpRs: return LpRs(instance, {.theta = theta, .lambda = lambda});
    case PolicyKind::kColGen: {
      ColGenOptions opt;
      opt.k = instance.horizon;
      opt.theta = theta;
      return ColumnGeneration(instance, opt).policy;
    }
    case PolicyKind::kStochastic: break;
  }
  throw InputError("solve: method must be myopic, greedy, lp-rs, colgen or exact");
}

struct GoldenCheck {
  std::string name;
  double value;
  double expect;
  bool pass() const { return std::abs(value - expect) <= 1e-6; }
};

// The six-user, three-provider line example with eps = 0.05.
inline std::vector<GoldenCheck> GoldenSuite() {
  const Instance inst = LineInstance();
  std::vector<GoldenCheck> out;
  const MatchingPolicy exact = ExactEnumeration(inst);
  out.push_back({"exact welfare", exact.welfare, 9.9});
  const MatchingPolicy lp = LpRs(inst);
  out.push_back({"lp-rs welfare", lp.welfare, 9.9});
  const Trajectory my = RunSimulation(inst, {.kind = PolicyKind::kMyopic}, 3, 0);
  out.push_back({"myopic equilibrium welfare", my.epochs.back().social_welfare, 8.1});
  out.push_back({"optimal max regret", MakeRegretReport(inst, exact).max_regret, 0.1});
  MatchingPolicy alt = EmptyPolicy(inst);
  const int assign[] = {0, 0, 2, 1, 1, 2};
  for (int u = 0; u < 6; ++u) alt.pi[alt.Index(u, assign[u], 0)] = 1.0;
  alt.viable_set = {0, 1, 2};
  ScorePolicy(inst, alt);
  out.push_back({"alternate policy welfare", alt.welfare, 9.05});
  out.push_back({"alternate policy max regret", MakeRegretReport(inst, alt).max_regret, 1.05});
  return out;
}

inline int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Matching and ecosystem simulation for recommenders with provider viability",
               "ecomatch"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Write a synthetic instance file");
  SyntheticParams gp;
  std::string gen_variant = "skewed", gen_out;
  double gen_gamma = 1.0;
  gen->add_option("--variant", gen_variant, "uniform or skewed")->capture_default_str();
  gen->add_option("--seed", gp.seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output file (stdout when omitted)");
  gen->add_option("--providers", gp.n_providers)->capture_default_str();
  gen->add_option("--users", gp.n_users)->capture_default_str();
  gen->add_option("--dim", gp.dim)->capture_default_str();
  gen->add_option("--nu", gp.nu, "Viability threshold")->capture_default_str();
  gen->add_option("--offset", gp.reward_offset, "Reward offset")->capture_default_str();
  gen->add_option("--slate", gp.slate_size, "Slate size")->capture_default_str();
  gen->add_option("--gamma", gen_gamma, "Slot discount")->capture_default_str();

  // solve
  auto* solve = app.add_subcommand("solve", "One-shot matching on an instance");
  std::string solve_file, solve_config, solve_method = "lp-rs";
  std::optional<double> solve_gamma;
  double solve_lambda = 0.0, solve_theta = 0.5;
  std::optional<int> solve_slate;
  solve->add_option("instance", solve_file, "Instance file");
  solve->add_option("--config", solve_config, "Take the instance from a config");
  solve->add_option("--method", solve_method, "myopic|greedy|lp-rs|colgen|exact")
      ->capture_default_str();
  solve->add_option("--gamma", solve_gamma, "Rewrite slot weights as gamma^t");
  solve->add_option("--lambda", solve_lambda, "Regret weight (lp-rs)")->capture_default_str();
  solve->add_option("--theta", solve_theta, "Rounding threshold")->capture_default_str();
  solve->add_option("--slate", solve_slate, "Slate size and horizon");
  solve->add_option("--seed", gp.seed, "Instance seed for synthetic configs");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run an experiment and write results");
  std::string sim_config, sim_out, sim_method;
  std::optional<std::uint64_t> sim_seed;
  std::optional<double> sim_gamma, sim_lambda;
  std::optional<int> sim_epochs, sim_slate;
  sim->add_option("--config", sim_config, "Experiment config (JSON)");
  sim->add_option("--seed", sim_seed, "Run a single seed");
  sim->add_option("--out", sim_out, "Output directory");
  sim->add_option("--method", sim_method, "Run a single policy");
  sim->add_option("--gamma", sim_gamma, "Run a single discount");
  sim->add_option("--lambda", sim_lambda, "Run a single regret weight");
  sim->add_option("--epochs", sim_epochs, "Epochs");
  sim->add_option("--slate", sim_slate, "Slate size");

  // verify
  auto* verify = app.add_subcommand("verify", "Check the built-in golden example");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (*gen) {
      gp.variant = ParseVariant(gen_variant);
      gp.gamma = gen_gamma;
      const Instance inst = GenSynthetic(gp);
      if (gen_out.empty()) {
        SaveInstance(inst, out);
      } else {
        SaveInstanceFile(inst, gen_out);
        out << "wrote " << gen_out << " (" << inst.num_providers() << " providers, "
            << inst.num_users() << " users)\n";
      }
      return 0;
    }
    if (*solve) {
      Instance inst;
      if (!solve_file.empty()) {
        inst = LoadEmbeddings(solve_file);
      } else if (!solve_config.empty()) {
        inst = CellInstance(LoadConfig(solve_config), gp.seed, std::nullopt);
      } else {
        throw InputError("solve: give an instance file or --config");
      }
      if (solve_slate) {
        inst.slate_size = inst.horizon = *solve_slate;
        if (!inst.is_sigmoid()) inst.utility = LinearUtility{Vector(inst.horizon, 1.0)};
      }
      if (solve_gamma) {
        if (inst.is_sigmoid()) throw InputError("solve: --gamma needs a linear utility");
        inst.utility = LinearUtility{DiscountWeights(*solve_gamma, inst.horizon)};
      }
      const PolicyKind kind = ParsePolicyKind(solve_method);
      const MatchingPolicy p = SolveOnce(inst, kind, solve_lambda, solve_theta);
      out << "method: " << PolicyName(kind) << "\n";
      out << "welfare: " << Fmt(p.welfare) << "\n";
      out << "viable: " << JoinIds(p.viable_set) << "\n";
      out << "max_regret: " << Fmt(MakeRegretReport(inst, p).max_regret) << "\n";
      if (!p.diagnostic.empty()) out << "note: " << p.diagnostic << "\n";
      return 0;
    }
    if (*sim) {
      ExperimentConfig cfg;
      if (!sim_config.empty()) {
        cfg = LoadConfig(sim_config);
      } else {
        cfg.synthetic = DeskParams(SyntheticVariant::kSkewed, 0);
      }
      if (sim_seed) cfg.seeds = {*sim_seed};
      if (!sim_out.empty()) cfg.output = sim_out;
      if (!sim_method.empty()) cfg.policies = {ParsePolicyKind(sim_method)};
      if (sim_gamma) cfg.gammas = {*sim_gamma};
      if (sim_lambda) cfg.lambdas = {*sim_lambda};
      if (sim_epochs) cfg.epochs = *sim_epochs;
      if (sim_slate) cfg.slate_size = *sim_slate;
      const ExperimentResult res = RunExperiment(cfg, &err);
      WriteSummaryTable(out, res.summary);
      for (const auto& f : res.files) out << "wrote " << f << "\n";
      return 0;
    }
    if (*verify) {
      bool ok = true;
      for (const GoldenCheck& c : GoldenSuite()) {
        out << (c.pass() ? "PASS " : "FAIL ") << c.name << " = " << Fmt(c.value)
            << " (expected " << Fmt(c.expect) << ")\n";
        ok = ok && c.pass();
      }
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

inline int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return RunCli(args, out, err);
}

}  // namespace ecomatch

#endif  // ECOMATCH_CLI_H_
