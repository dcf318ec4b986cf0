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
//  Epoch simulator.
//
//  Each epoch every active user issues its queries, each query is answered
//  by a slate of distinct viable providers, and each impression adds w units
//  of engagement to its provider. Slot t of the slate plays the role of the
//  within-epoch time step, so the instance horizon must equal the slate
//  size. At the end of the epoch providers short of their threshold leave
//  for good.
//

#ifndef ECOMATCH_ECOSIM_H_
#define ECOMATCH_ECOSIM_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ecomatch/colgen.h"
#include "ecomatch/matching.h"
#include "ecomatch/model.h"

namespace ecomatch {

using Rng = std::mt19937_64;

enum class PolicyKind { kMyopic, kStochastic, kLpRs, kGreedy, kColGen, kExact };

inline const char* PolicyName(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kMyopic: return "myopic";
    case PolicyKind::kStochastic: return "stochastic";
    case PolicyKind::kLpRs: return "lp-rs";
    case PolicyKind::kGreedy: return "greedy";
    case PolicyKind::kColGen: return "colgen";
    case PolicyKind::kExact: return "exact";
  }
  return "unknown";
}

inline PolicyKind ParsePolicyKind(const std::string& name) {
  for (PolicyKind k : {PolicyKind::kMyopic, PolicyKind::kStochastic, PolicyKind::kLpRs,
                       PolicyKind::kGreedy, PolicyKind::kColGen, PolicyKind::kExact})
    if (name == PolicyName(k)) return k;
  throw InputError("unknown policy '" + name + "'");
}

struct PolicyConfig {
  PolicyKind kind = PolicyKind::kMyopic;
  double theta = 0.5;
  double lambda = 0.0;
  int colgen_max_iter = 300;
  double colgen_tol = 1e-7;
  bool bernoulli_abandonment = false;
  double stochastic_epsilon = 1e-6;
};

struct EcosystemState {
  int epoch = 0;
  std::vector<char> viable;
  Vector engagement;
  Rng rng;

  std::vector<int> ViableList() const {
    std::vector<int> out;
    for (int c = 0; c < static_cast<int>(viable.size()); ++c)
      if (viable[c]) out.push_back(c);
    return out;
  }
};

struct EpochMetrics {
  int epoch = 0;
  double social_welfare = 0.0;
  double avg_user_utility = 0.0;
  int viable_count = 0;
  std::vector<int> viable_set;  // after abandonment
  Vector per_user_utility;
  double max_regret = 0.0;
  int stranded_users = 0;
};

struct RecomputeEvent {
  int epoch = 0;
  std::vector<int> viable;  // providers the new policy was computed on
};

//
//  Serving
//

// Mean plus isotropic Gaussian noise; the mean itself when variance is 0.
inline Vector SampleQuery(const UserProfile& user, Rng& rng) {
  if (user.variance <= 0) return user.mean;
  std::normal_distribution<double> noise(0.0, std::sqrt(user.variance));
  Vector q = user.mean;
  for (double& x : q) x += noise(rng);
  return q;
}

// Top-s viable providers by reward. Ties fall to the raw kernel score, which
// separates providers that a reward floor has flattened, then to the lower id.
inline std::vector<int> ServeMyopic(const Instance& instance,
                                    std::span<const int> viable,
                                    std::span<const double> query) {
  struct Key {
    double reward, raw;
    int id;
  };
  std::vector<Key> keys;
  for (int c : viable)
    keys.push_back({Reward(instance, query, c),
                    RawScore(instance.reward_kind, query, instance.providers[c].embedding),
                    c});
  const std::size_t s = std::min<std::size_t>(instance.slate_size, keys.size());
  std::partial_sort(keys.begin(), keys.begin() + s, keys.end(),
                    [](const Key& a, const Key& b) {
                      if (a.reward != b.reward) return a.reward > b.reward;
                      if (a.raw != b.raw) return a.raw > b.raw;
                      return a.id < b.id;
                    });
  std::vector<int> slate;
  for (std::size_t i = 0; i < s; ++i) slate.push_back(keys[i].id);
  return slate;
}

// Draws `count` distinct indices with probability proportional to `weight`,
// renormalizing after each draw. Zero total weight falls back to uniform.
inline std::vector<int> DrawWithoutReplacement(Vector weight, int count, Rng& rng) {
  std::vector<int> out;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<char> taken(weight.size(), 0);
  for (int k = 0; k < count; ++k) {
    double total = 0.0;
    int open = 0;
    for (std::size_t i = 0; i < weight.size(); ++i)
      if (!taken[i]) {
        total += weight[i];
        ++open;
      }
    if (open == 0) break;
    const bool uniform = !(total > 0);
    double x = unit(rng) * (uniform ? open : total);
    int pick = -1;
    for (std::size_t i = 0; i < weight.size(); ++i) {
      if (taken[i]) continue;
      pick = static_cast<int>(i);
      x -= uniform ? 1.0 : weight[i];
      if (x < 0) break;
    }
    // Guard against landing on a zero-weight tail through rounding.
    if (!uniform && weight[pick] <= 0)
      for (std::size_t i = weight.size(); i-- > 0;)
        if (!taken[i] && weight[i] > 0) {
          pick = static_cast<int>(i);
          break;
        }
    taken[pick] = 1;
    out.push_back(pick);
  }
  return out;
}

// Samples a slate with probability proportional to reward. Negative rewards
// are shifted so the worst viable provider keeps weight `epsilon`.
inline std::vector<int> ServeStochastic(const Instance& instance,
                                        std::span<const int> viable,
                                        std::span<const double> query, Rng& rng,
                                        double epsilon = 1e-6) {
  Vector w;
  double lo = kInfinity;
  for (int c : viable) {
    w.push_back(Reward(instance, query, c));
    lo = std::min(lo, w.back());
  }
  if (lo < 0)
    for (double& x : w) x += -lo + epsilon;
  const int s = std::min<int>(instance.slate_size, static_cast<int>(viable.size()));
  std::vector<int> slate;
  for (int i : DrawWithoutReplacement(std::move(w), s, rng)) slate.push_back(viable[i]);
  return slate;
}

// Slot t is drawn from pi[user][.][t] over viable providers not already in
// the slate. A slot with no live mass goes to the best remaining provider.
inline std::vector<int> ServeOptimized(const Instance& instance,
                                       const MatchingPolicy& policy,
                                       std::span<const int> viable, int user,
                                       std::span<const double> query, Rng& rng) {
  const int s = std::min<int>(instance.slate_size, static_cast<int>(viable.size()));
  std::vector<int> slate;
  std::vector<char> used(instance.num_providers(), 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < s; ++t) {
    double total = 0.0;
    for (int c : viable)
      if (!used[c] && t < policy.horizon) total += policy.Pi(user, c, t);
    int pick = -1;
    if (total > 1e-12) {
      double x = unit(rng) * total;
      for (int c : viable) {
        if (used[c]) continue;
        const double p = policy.Pi(user, c, t);
        if (p <= 0) continue;
        pick = c;
        x -= p;
        if (x < 0) break;
      }
    } else {
      double best = -kInfinity;
      for (int c : viable) {
        if (used[c]) continue;
        const double r = Reward(instance, query, c);
        if (r > best) {
          best = r;
          pick = c;
        }
      }
    }
    used[pick] = 1;
    slate.push_back(pick);
  }
  return slate;
}

// One epoch of myopic serving on canonical queries as a policy. Its viable
// set lists the providers that would meet their threshold.
inline MatchingPolicy MyopicAssignment(const Instance& instance) {
  MatchingPolicy p = EmptyPolicy(instance);
  std::vector<int> all(instance.num_providers());
  for (int c = 0; c < instance.num_providers(); ++c) all[c] = c;
  Vector engagement(instance.num_providers(), 0.0);
  for (int u = 0; u < instance.num_users(); ++u) {
    const auto slate = ServeMyopic(instance, all, instance.users[u].mean);
    for (int t = 0; t < static_cast<int>(slate.size()) && t < p.horizon; ++t) {
      p.pi[p.Index(u, slate[t], t)] = 1.0;
      engagement[slate[t]] += instance.QueryWeight(u) * instance.EngagementWeight(u, slate[t], t);
    }
  }
  for (int c = 0; c < instance.num_providers(); ++c)
    if (engagement[c] >= instance.providers[c].threshold - 1e-9) p.viable_set.push_back(c);
  ScorePolicy(instance, p);
  return p;
}

//
//  Simulator
//

class Simulator {
 public:
  Simulator(const Instance& instance, const PolicyConfig& config, std::uint64_t seed)
      : instance_(instance), config_(config), mu_(IdealUtilities(instance)) {
    ValidateInstance(instance);
    if (instance.horizon != instance.slate_size)
      throw InputError("simulation needs horizon equal to slate size");
    state_.viable.assign(instance.num_providers(), 1);
    state_.engagement.assign(instance.num_providers(), 0.0);
    state_.rng.seed(seed);
  }

  const EcosystemState& state() const { return state_; }
  const std::optional<MatchingPolicy>& policy() const { return policy_; }
  const std::vector<RecomputeEvent>& recomputes() const { return recomputes_; }

  EpochMetrics Step() {
    EnsurePolicy();
    ++state_.epoch;
    const int n_u = instance_.num_users();
    const std::vector<int> alive = state_.ViableList();
    std::fill(state_.engagement.begin(), state_.engagement.end(), 0.0);
    EpochMetrics m;
    m.epoch = state_.epoch;
    m.per_user_utility.assign(n_u, 0.0);
    m.max_regret = n_u > 0 ? -kInfinity : 0.0;
    for (int u = 0; u < n_u; ++u) {
      const UserProfile& user = instance_.users[u];
      bool active = true;
      if (user.activation < 1.0) {
        std::bernoulli_distribution act(user.activation);
        active = act(state_.rng);
      }
      if (!active) continue;
      double total = 0.0;
      for (int d = 0; d < user.demand; ++d) {
        const Vector q = SampleQuery(user, state_.rng);
        if (alive.empty()) {
          ++m.stranded_users;
          continue;
        }
        const std::vector<int> slate = Serve(u, alive, q);
        Vector rewards;
        for (int t = 0; t < static_cast<int>(slate.size()); ++t) {
          rewards.push_back(Reward(instance_, q, slate[t]));
          state_.engagement[slate[t]] +=
              instance_.EngagementWeight(u, slate[t], t);
        }
        total += SlateUtility(instance_, rewards);
      }
      m.per_user_utility[u] = total;
      m.max_regret = std::max(m.max_regret, mu_[u] * user.demand - total);
    }
    Abandon();
    for (double x : m.per_user_utility) m.social_welfare += x;
    m.avg_user_utility = n_u > 0 ? m.social_welfare / n_u : 0.0;
    m.viable_set = state_.ViableList();
    m.viable_count = static_cast<int>(m.viable_set.size());
    return m;
  }

 private:
  bool Optimized() const {
    return config_.kind != PolicyKind::kMyopic &&
           config_.kind != PolicyKind::kStochastic;
  }

  // Computes the policy at the start and again whenever one of its
  // providers has left.
  void EnsurePolicy() {
    if (!Optimized()) return;
    if (policy_) {
      bool intact = true;
      for (int c : policy_->viable_set) intact = intact && state_.viable[c];
      if (intact) return;
    }
    const std::vector<int> alive = state_.ViableList();
    recomputes_.push_back({state_.epoch, alive});
    if (alive.empty()) {
      policy_ = EmptyPolicy(instance_);
      return;
    }
    const Instance sub = RestrictProviders(instance_, alive);
    MatchingPolicy p;
    switch (config_.kind) {
      case PolicyKind::kLpRs:
        p = LpRs(sub, {.theta = config_.theta, .lambda = config_.lambda});
        break;
      case PolicyKind::kGreedy:
        p = GreedyProviders(sub);
        break;
      case PolicyKind::kExact:
        p = ExactEnumeration(sub);
        break;
      case PolicyKind::kColGen: {
        ColGenOptions opt;
        opt.k = sub.horizon;
        opt.theta = config_.theta;
        opt.tol = config_.colgen_tol;
        opt.max_iter = config_.colgen_max_iter;
        p = ColumnGeneration(sub, opt).policy;
        break;
      }
      default:
        break;
    }
    policy_ = LiftPolicy(instance_, p, alive);
    if (config_.kind == PolicyKind::kColGen) {
      // Lifting rescored the policy additively; star utilities are kept.
      policy_->welfare = p.welfare;
      policy_->per_user_utility = p.per_user_utility;
    }
  }

  std::vector<int> Serve(int u, const std::vector<int>& alive, const Vector& q) {
    switch (config_.kind) {
      case PolicyKind::kMyopic:
        return ServeMyopic(instance_, alive, q);
      case PolicyKind::kStochastic:
        return ServeStochastic(instance_, alive, q, state_.rng,
                               config_.stochastic_epsilon);
      default:
        return ServeOptimized(instance_, *policy_, alive, u, q, state_.rng);
    }
  }

  void Abandon() {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int c = 0; c < instance_.num_providers(); ++c) {
      if (!state_.viable[c]) continue;
      const double nu = instance_.providers[c].threshold;
      const double e = state_.engagement[c];
      if (e >= nu - 1e-9) continue;
      if (config_.bernoulli_abandonment) {
        // Survive with probability E / nu.
        if (unit(state_.rng) < e / nu) continue;
      }
      state_.viable[c] = 0;
    }
  }

  const Instance& instance_;
  PolicyConfig config_;
  Vector mu_;
  EcosystemState state_;
  std::optional<MatchingPolicy> policy_;
  std::vector<RecomputeEvent> recomputes_;
};

inline EpochMetrics StepEpoch(Simulator& sim) { return sim.Step(); }

struct Trajectory {
  std::string policy;
  std::uint64_t seed = 0;
  std::vector<EpochMetrics> epochs;
  Vector total_utility;  // per user, summed over epochs
  std::vector<RecomputeEvent> recomputes;
};

inline Trajectory RunSimulation(const Instance& instance, const PolicyConfig& config,
                                int epochs, std::uint64_t seed) {
  if (epochs < 1) throw InputError("simulation needs at least one epoch");
  Simulator sim(instance, config, seed);
  Trajectory tr;
  tr.policy = PolicyName(config.kind);
  tr.seed = seed;
  tr.total_utility.assign(instance.num_users(), 0.0);
  for (int k = 0; k < epochs; ++k) {
    tr.epochs.push_back(sim.Step());
    for (int u = 0; u < instance.num_users(); ++u)
      tr.total_utility[u] += tr.epochs.back().per_user_utility[u];
  }
  tr.recomputes = sim.recomputes();
  return tr;
}

}  // namespace ecomatch

#endif  // ECOMATCH_ECOSIM_H_
