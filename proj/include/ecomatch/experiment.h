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
//  Experiment harness: config parsing, the (policy, seed, gamma, lambda)
//  cross product, and result files.
//
//  Config schema (JSON):
//
//      {
//        "instance": {"synthetic": {"variant": "skewed", "users": 400, ...}}
//                 or {"file": "../line6.csv", "threshold": 2},
//        "per_seed_instance": true,   // synthetic only; seed drives the data
//        "policies": ["myopic", "lp-rs"],
//        "epochs": 10,
//        "seeds": [0, 1, 2],
//        "gamma": [1.0],              // optional; rewrites alpha
//        "lambda": [0.0],
//        "slate_size": 1,             // optional override
//        "solver": {"theta": 0.5, "colgen_max_iter": 300, "colgen_tol": 1e-7,
//                   "bernoulli_abandonment": false},
//        "output": "results"
//      }
//
//  Synthetic keys: variant, providers, users, dim, spread, user_variance,
//  skew, query_noise, nu, reward_offset, seed.
//

#ifndef ECOMATCH_EXPERIMENT_H_
#define ECOMATCH_EXPERIMENT_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "ecomatch/ecosim.h"
#include "ecomatch/instance_io.h"
#include "ecomatch/model.h"
#include "ecomatch/svg.h"
#include "ecomatch/synthetic.h"
#include "json.hpp"

namespace ecomatch {

struct ExperimentConfig {
  std::optional<SyntheticParams> synthetic;
  std::string instance_file;
  std::optional<double> threshold;
  bool per_seed_instance = true;
  std::vector<PolicyKind> policies = {PolicyKind::kMyopic, PolicyKind::kLpRs};
  int epochs = 10;
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  Vector gammas;  // empty keeps the instance weights
  Vector lambdas = {0.0};
  std::optional<int> slate_size;
  PolicyConfig solver;
  std::string output = "results";
};

inline void ValidateConfig(const ExperimentConfig& c) {
  if (!c.synthetic && c.instance_file.empty())
    throw InputError("config: no instance source");
  if (c.synthetic && !c.instance_file.empty())
    throw InputError("config: give either a synthetic instance or a file");
  if (c.synthetic) ValidateSyntheticParams(*c.synthetic);
  if (c.policies.empty()) throw InputError("config: policy list is empty");
  if (c.seeds.empty()) throw InputError("config: seed list is empty");
  if (c.epochs < 1) throw InputError("config: epochs must be >= 1");
  for (double g : c.gammas)
    if (!(g > 0 && g <= 1)) throw InputError("config: gamma must lie in (0, 1]");
  if (c.lambdas.empty()) throw InputError("config: lambda grid is empty");
  for (double l : c.lambdas)
    if (!(l >= 0)) throw InputError("config: lambda must be >= 0");
  if (c.slate_size && *c.slate_size < 1) throw InputError("config: slate_size must be >= 1");
  if (!(c.solver.theta > 0 && c.solver.theta <= 1))
    throw InputError("config: theta must lie in (0, 1]");
  if (c.output.empty()) throw InputError("config: output directory is empty");
}

namespace internal {

template <typename T>
T Get(const nlohmann::json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError("config: " + where + "." + key + ": " + e.what());
  }
}

inline void CheckKeys(const nlohmann::json& j, std::initializer_list<const char*> keys,
                      const std::string& where) {
  if (!j.is_object()) throw InputError("config: " + where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::none_of(keys.begin(), keys.end(),
                     [&](const char* k) { return it.key() == k; }))
      throw InputError("config: unknown key " + where + "." + it.key());
}

inline SyntheticParams ParseSynthetic(const nlohmann::json& j) {
  CheckKeys(j, {"variant", "providers", "users", "dim", "spread", "user_variance", "skew",
                "query_noise", "nu", "reward_offset", "seed"},
            "synthetic");
  SyntheticParams p;
  const std::string w = "synthetic";
  if (j.contains("variant")) p.variant = ParseVariant(Get<std::string>(j, "variant", w));
  if (j.contains("providers")) p.n_providers = Get<int>(j, "providers", w);
  if (j.contains("users")) p.n_users = Get<int>(j, "users", w);
  if (j.contains("dim")) p.dim = Get<int>(j, "dim", w);
  if (j.contains("spread")) p.provider_spread = Get<double>(j, "spread", w);
  if (j.contains("user_variance")) p.user_variance = Get<double>(j, "user_variance", w);
  if (j.contains("skew")) p.skew = Get<double>(j, "skew", w);
  if (j.contains("query_noise")) p.query_noise = Get<double>(j, "query_noise", w);
  if (j.contains("nu")) p.nu = Get<double>(j, "nu", w);
  if (j.contains("reward_offset")) p.reward_offset = Get<double>(j, "reward_offset", w);
  if (j.contains("seed")) p.seed = Get<std::uint64_t>(j, "seed", w);
  return p;
}

}  // namespace internal

inline ExperimentConfig ParseConfig(const nlohmann::json& j) {
  using internal::Get;
  internal::CheckKeys(j, {"instance", "per_seed_instance", "policies", "epochs", "seeds",
                          "gamma", "lambda", "slate_size", "solver", "output"},
                      "config");
  ExperimentConfig c;
  const std::string w = "config";
  if (!j.contains("instance")) throw InputError("config: missing instance");
  const auto& inst = j.at("instance");
  internal::CheckKeys(inst, {"synthetic", "file", "threshold"}, "instance");
  if (inst.contains("synthetic")) c.synthetic = internal::ParseSynthetic(inst.at("synthetic"));
  if (inst.contains("file")) c.instance_file = Get<std::string>(inst, "file", "instance");
  if (inst.contains("threshold")) c.threshold = Get<double>(inst, "threshold", "instance");
  if (j.contains("per_seed_instance"))
    c.per_seed_instance = Get<bool>(j, "per_seed_instance", w);
  if (j.contains("policies")) {
    c.policies.clear();
    for (const auto& name : Get<std::vector<std::string>>(j, "policies", w))
      c.policies.push_back(ParsePolicyKind(name));
  }
  if (j.contains("epochs")) c.epochs = Get<int>(j, "epochs", w);
  if (j.contains("seeds")) c.seeds = Get<std::vector<std::uint64_t>>(j, "seeds", w);
  if (j.contains("gamma")) c.gammas = Get<Vector>(j, "gamma", w);
  if (j.contains("lambda")) c.lambdas = Get<Vector>(j, "lambda", w);
  if (j.contains("slate_size")) c.slate_size = Get<int>(j, "slate_size", w);
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    internal::CheckKeys(s, {"theta", "colgen_max_iter", "colgen_tol", "bernoulli_abandonment"},
                        "solver");
    if (s.contains("theta")) c.solver.theta = Get<double>(s, "theta", "solver");
    if (s.contains("colgen_max_iter"))
      c.solver.colgen_max_iter = Get<int>(s, "colgen_max_iter", "solver");
    if (s.contains("colgen_tol")) c.solver.colgen_tol = Get<double>(s, "colgen_tol", "solver");
    if (s.contains("bernoulli_abandonment"))
      c.solver.bernoulli_abandonment = Get<bool>(s, "bernoulli_abandonment", "solver");
  }
  if (j.contains("output")) c.output = Get<std::string>(j, "output", w);
  ValidateConfig(c);
  return c;
}

inline ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("config " + path + ": " + e.what());
  }
  ExperimentConfig c = ParseConfig(j);
  // Instance paths are relative to the config file.
  if (!c.instance_file.empty() && std::filesystem::path(c.instance_file).is_relative())
    c.instance_file =
        (std::filesystem::path(path).parent_path() / c.instance_file).lexically_normal().string();
  return c;
}

// Instance for one cell. Gamma rewrites linear weights as a discount.
inline Instance CellInstance(const ExperimentConfig& c, std::uint64_t seed,
                             std::optional<double> gamma) {
  Instance inst;
  if (c.synthetic) {
    SyntheticParams p = *c.synthetic;
    if (c.per_seed_instance) p.seed = seed;
    if (c.slate_size) p.slate_size = *c.slate_size;
    if (gamma) p.gamma = *gamma;
    inst = GenSynthetic(p);
  } else {
    inst = LoadEmbeddings(c.instance_file, c.threshold);
    if (c.slate_size) {
      inst.slate_size = inst.horizon = *c.slate_size;
      if (!inst.is_sigmoid() && !gamma)
        inst.utility = LinearUtility{Vector(inst.horizon, 1.0)};
    }
    if (gamma) {
      if (inst.is_sigmoid()) throw InputError("gamma grid needs a linear utility");
      inst.utility = LinearUtility{DiscountWeights(*gamma, inst.horizon)};
    }
  }
  ValidateInstance(inst);
  return inst;
}

//
//  Results
//

// Values are stored at the precision written to disk so that the summary
// can be recomputed from the CSVs alone.
inline double Round6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return std::strtod(buf, nullptr);
}

inline std::string Fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

struct CellKey {
  std::string policy;
  double gamma = 1.0;
  double lambda = 0.0;

  bool operator<(const CellKey& o) const {
    return std::tie(gamma, lambda, policy) < std::tie(o.gamma, o.lambda, o.policy);
  }
};

struct TrajectoryRow {
  CellKey key;
  std::uint64_t seed = 0;
  int epoch = 0;
  double social_welfare = 0, avg_user_utility = 0, max_regret = 0;
  int viable_count = 0, stranded_users = 0;
};

struct SummaryRow {
  CellKey key;
  int seeds = 0;
  double welfare_mean = 0, welfare_std = 0;        // avg user utility over epochs
  double final_welfare_mean = 0, final_welfare_std = 0;
  double max_regret_mean = 0, max_regret_std = 0;  // final epoch
  double ratio_mean = 0, ratio_std = 0;            // final max regret / final welfare
  double viable_mean = 0, viable_std = 0;          // final epoch
};

inline std::pair<double, double> MeanStd(const Vector& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  const double sd = xs.size() > 1 ? std::sqrt(var / (xs.size() - 1)) : 0.0;
  return {mean, sd};
}

// Mean and sample standard deviation over seeds, per cell.
inline std::vector<SummaryRow> Summarize(const std::vector<TrajectoryRow>& rows) {
  std::map<CellKey, std::map<std::uint64_t, std::vector<const TrajectoryRow*>>> cells;
  for (const auto& r : rows) cells[r.key][r.seed].push_back(&r);
  std::vector<SummaryRow> out;
  for (auto& [key, by_seed] : cells) {
    Vector welfare, final_welfare, regret, ratio, viable;
    for (auto& [seed, list] : by_seed) {
      std::sort(list.begin(), list.end(),
                [](const TrajectoryRow* a, const TrajectoryRow* b) { return a->epoch < b->epoch; });
      double w = 0.0;
      for (const auto* r : list) w += r->avg_user_utility;
      welfare.push_back(w / list.size());
      const TrajectoryRow& last = *list.back();
      final_welfare.push_back(last.avg_user_utility);
      regret.push_back(last.max_regret);
      ratio.push_back(last.avg_user_utility != 0 ? last.max_regret / last.avg_user_utility : 0.0);
      viable.push_back(last.viable_count);
    }
    SummaryRow s;
    s.key = key;
    s.seeds = static_cast<int>(by_seed.size());
    std::tie(s.welfare_mean, s.welfare_std) = MeanStd(welfare);
    std::tie(s.final_welfare_mean, s.final_welfare_std) = MeanStd(final_welfare);
    std::tie(s.max_regret_mean, s.max_regret_std) = MeanStd(regret);
    std::tie(s.ratio_mean, s.ratio_std) = MeanStd(ratio);
    std::tie(s.viable_mean, s.viable_std) = MeanStd(viable);
    out.push_back(s);
  }
  return out;
}

inline const char* kTrajectoryHeader =
    "epoch,policy,seed,social_welfare,avg_user_utility,viable_count,max_regret,"
    "stranded_users,gamma,lambda";
inline const char* kHistogramHeader = "policy,seed,user_id,total_utility,gamma,lambda";
inline const char* kSummaryHeader =
    "policy,gamma,lambda,seeds,avg_welfare_mean,avg_welfare_std,final_welfare_mean,"
    "final_welfare_std,max_regret_mean,max_regret_std,regret_welfare_ratio_mean,"
    "regret_welfare_ratio_std,viable_mean,viable_std";

inline void WriteTrajectoryRow(std::ostream& out, const TrajectoryRow& r) {
  out << r.epoch << ',' << r.key.policy << ',' << r.seed << ',' << Fixed6(r.social_welfare)
      << ',' << Fixed6(r.avg_user_utility) << ',' << r.viable_count << ','
      << Fixed6(r.max_regret) << ',' << r.stranded_users << ',' << Fixed6(r.key.gamma) << ','
      << Fixed6(r.key.lambda) << '\n';
}

inline void WriteSummary(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << '\n';
  for (const auto& s : rows) {
    out << s.key.policy << ',' << Fixed6(s.key.gamma) << ',' << Fixed6(s.key.lambda) << ','
        << s.seeds;
    for (double v : {s.welfare_mean, s.welfare_std, s.final_welfare_mean, s.final_welfare_std,
                     s.max_regret_mean, s.max_regret_std, s.ratio_mean, s.ratio_std,
                     s.viable_mean, s.viable_std})
      out << ',' << Fixed6(v);
    out << '\n';
  }
}

// Human-readable table with mean ± std cells.
inline void WriteSummaryTable(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "| policy | gamma | lambda | avg welfare | max regret | regret/welfare | viable |\n";
  out << "|---|---|---|---|---|---|---|\n";
  auto pm = [](double m, double s) { return Fixed6(m) + " ± " + Fixed6(s); };
  for (const auto& s : rows)
    out << "| " << s.key.policy << " | " << Fixed6(s.key.gamma) << " | "
        << Fixed6(s.key.lambda) << " | " << pm(s.welfare_mean, s.welfare_std) << " | "
        << pm(s.max_regret_mean, s.max_regret_std) << " | " << pm(s.ratio_mean, s.ratio_std)
        << " | " << pm(s.viable_mean, s.viable_std) << " |\n";
}

inline std::vector<TrajectoryRow> ReadTrajectoryCsv(std::istream& in) {
  std::vector<TrajectoryRow> rows;
  std::string line;
  if (!std::getline(in, line) || internal::Trim(line) != kTrajectoryHeader)
    throw InputError("trajectory csv: bad header");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (internal::Trim(line).empty()) continue;
    const auto f = internal::SplitCsv(internal::Trim(line));
    if (f.size() != 10)
      throw InputError("trajectory csv:" + std::to_string(lineno) + ": expected 10 fields");
    TrajectoryRow r;
    r.epoch = std::stoi(f[0]);
    r.key.policy = f[1];
    r.seed = std::stoull(f[2]);
    r.social_welfare = std::stod(f[3]);
    r.avg_user_utility = std::stod(f[4]);
    r.viable_count = std::stoi(f[5]);
    r.max_regret = std::stod(f[6]);
    r.stranded_users = std::stoi(f[7]);
    r.key.gamma = std::stod(f[8]);
    r.key.lambda = std::stod(f[9]);
    rows.push_back(r);
  }
  return rows;
}

struct ExperimentResult {
  std::vector<TrajectoryRow> trajectory;
  std::vector<SummaryRow> summary;
  std::vector<std::string> files;
};

// Throws before any simulation if `dir` cannot be created or written.
inline void CheckWritableDir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw InputError("output directory not writable: " + dir.string());
  const auto probe = dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw InputError("output directory not writable: " + dir.string());
  }
  std::filesystem::remove(probe, ec);
}

inline ExperimentResult RunExperiment(const ExperimentConfig& config,
                                      std::ostream* log = nullptr) {
  ValidateConfig(config);
  const std::filesystem::path dir(config.output);
  CheckWritableDir(dir);

  std::vector<std::optional<double>> gammas;
  for (double g : config.gammas) gammas.push_back(g);
  if (gammas.empty()) gammas.push_back(std::nullopt);

  ExperimentResult result;
  std::ostringstream traj, hist;
  traj << kTrajectoryHeader << '\n';
  hist << kHistogramHeader << '\n';
  for (const auto& gamma : gammas) {
    for (double lambda : config.lambdas) {
      for (std::uint64_t seed : config.seeds) {
        const Instance inst = CellInstance(config, seed, gamma);
        for (PolicyKind kind : config.policies) {
          PolicyConfig pc = config.solver;
          pc.kind = kind;
          pc.lambda = lambda;
          const Trajectory tr = RunSimulation(inst, pc, config.epochs, seed);
          CellKey key{PolicyName(kind), Round6(gamma.value_or(1.0)), Round6(lambda)};
          for (const EpochMetrics& m : tr.epochs) {
            TrajectoryRow r;
            r.key = key;
            r.seed = seed;
            r.epoch = m.epoch;
            r.social_welfare = Round6(m.social_welfare);
            r.avg_user_utility = Round6(m.avg_user_utility);
            r.viable_count = m.viable_count;
            r.max_regret = Round6(m.max_regret);
            r.stranded_users = m.stranded_users;
            WriteTrajectoryRow(traj, r);
            result.trajectory.push_back(r);
          }
          for (int u = 0; u < inst.num_users(); ++u)
            hist << key.policy << ',' << seed << ',' << u << ',' << Fixed6(tr.total_utility[u])
                 << ',' << Fixed6(key.gamma) << ',' << Fixed6(key.lambda) << '\n';
          if (log)
            *log << key.policy << " seed=" << seed << " gamma=" << Fixed6(key.gamma)
                 << " lambda=" << Fixed6(key.lambda)
                 << " final_welfare=" << Fixed6(tr.epochs.back().social_welfare)
                 << " viable=" << tr.epochs.back().viable_count << '\n';
        }
      }
    }
  }
  result.summary = Summarize(result.trajectory);

  auto emit = [&](const std::string& name, const std::string& body) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << body;
    if (!out) throw InputError("write failed: " + path.string());
    result.files.push_back(path.string());
  };
  emit("trajectory.csv", traj.str());
  emit("histogram.csv", hist.str());
  std::ostringstream sum, table;
  WriteSummary(sum, result.summary);
  WriteSummaryTable(table, result.summary);
  emit("summary.csv", sum.str());
  emit("summary.md", table.str());

  // Mean over seeds per cell and epoch.
  std::map<CellKey, std::map<int, std::pair<Vector, Vector>>> by_cell;
  for (const auto& r : result.trajectory) {
    auto& slot = by_cell[r.key][r.epoch];
    slot.first.push_back(r.avg_user_utility);
    slot.second.push_back(r.viable_count);
  }
  std::vector<Series> welfare, viable;
  for (const auto& [key, epochs] : by_cell) {
    std::string label = key.policy;
    if (config.gammas.size() > 1) label += " g=" + FormatShort(key.gamma);
    if (config.lambdas.size() > 1) label += " l=" + FormatShort(key.lambda);
    Series w{label, {}}, v{label, {}};
    for (const auto& [epoch, vals] : epochs) {
      w.points.push_back({double(epoch), MeanStd(vals.first).first});
      v.points.push_back({double(epoch), MeanStd(vals.second).first});
    }
    welfare.push_back(std::move(w));
    viable.push_back(std::move(v));
  }
  emit("welfare.svg", LineChartSvg("Average user utility", "epoch", "utility", welfare));
  emit("viable.svg", LineChartSvg("Viable providers", "epoch", "providers", viable));
  return result;
}

}  // namespace ecomatch

#endif  // ECOMATCH_EXPERIMENT_H_
