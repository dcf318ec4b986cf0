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
//  Matching solvers for additive utilities.
//
//  The constrained-welfare problem cSW(C) is the stochastic matching LP in
//  which every provider of C must collect at least its threshold in expected
//  engagement. g(C) is its optimum. Greedy, LP rounding and subset
//  enumeration all search over C and call cSW.
//
//  Variables are pi[u][c][t], the probability that user u's canonical query
//  is answered by provider c in slot t. A provider appears at most once per
//  slate, so sum_t pi[u][c][t] <= 1 (<= y_c in the relaxed model).
//

#ifndef ECOMATCH_MATCHING_H_
#define ECOMATCH_MATCHING_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecomatch/lp.h"
#include "ecomatch/model.h"

namespace ecomatch {

struct MatchingPolicy {
  int num_users = 0;
  int num_providers = 0;
  int horizon = 1;
  Vector pi;  // [user][provider][slot]
  std::vector<int> viable_set;
  double welfare = 0.0;    // sum_u Qbar(u) * U(u)
  double objective = 0.0;  // LP objective, includes -lambda * MR when set
  Vector per_user_utility;
  double max_regret_bound = std::numeric_limits<double>::quiet_NaN();
  double relaxed_objective = std::numeric_limits<double>::quiet_NaN();
  std::string diagnostic;

  std::size_t Index(int u, int c, int t) const {
    return (static_cast<std::size_t>(u) * num_providers + c) * horizon + t;
  }
  double Pi(int u, int c, int t) const { return pi[Index(u, c, t)]; }
};

inline MatchingPolicy EmptyPolicy(const Instance& instance) {
  MatchingPolicy p;
  p.num_users = instance.num_users();
  p.num_providers = instance.num_providers();
  p.horizon = instance.horizon;
  p.pi.assign(static_cast<std::size_t>(p.num_users) * p.num_providers *
                  p.horizon,
              0.0);
  p.per_user_utility.assign(p.num_users, 0.0);
  return p;
}

// U(u) = sum_t alpha_t sum_c pi r for the canonical query; unweighted by Qbar.
inline void ScorePolicy(const Instance& instance, MatchingPolicy& policy) {
  const Vector alpha = SlotWeights(instance);
  policy.per_user_utility.assign(instance.num_users(), 0.0);
  policy.welfare = 0.0;
  for (int u = 0; u < instance.num_users(); ++u) {
    double acc = 0.0;
    for (int c = 0; c < instance.num_providers(); ++c) {
      double mass = 0.0;
      for (int t = 0; t < instance.horizon; ++t)
        mass += alpha[t] * policy.Pi(u, c, t);
      if (mass != 0.0) acc += mass * MeanReward(instance, u, c);
    }
    policy.per_user_utility[u] = acc;
    policy.welfare += instance.QueryWeight(u) * acc;
  }
}

// Invariant check. Returns an empty string when the policy is valid. Star
// policies may repeat a provider across slots; pass distinct_slots = false.
inline std::string CheckPolicy(const Instance& instance,
                               const MatchingPolicy& policy,
                               double tol = 1e-7, bool distinct_slots = true) {
  const int n_u = instance.num_users();
  const int n_c = instance.num_providers();
  if (policy.num_users != n_u || policy.num_providers != n_c ||
      policy.horizon != instance.horizon)
    return "shape mismatch";
  std::vector<char> in_v(n_c, 0);
  for (int c : policy.viable_set) in_v[c] = 1;
  if (policy.viable_set.empty()) {
    for (double x : policy.pi)
      if (std::abs(x) > tol) return "mass without a viable set";
    return "";
  }
  const int slots =
      distinct_slots ? std::min<int>(instance.horizon,
                                     static_cast<int>(policy.viable_set.size()))
                     : instance.horizon;
  Vector engagement(n_c, 0.0);
  for (int u = 0; u < n_u; ++u) {
    for (int t = 0; t < instance.horizon; ++t) {
      double col = 0.0;
      for (int c = 0; c < n_c; ++c) {
        const double x = policy.Pi(u, c, t);
        if (x < -tol) return "negative probability";
        if (!in_v[c] && x > tol)
          return "mass on provider " + std::to_string(c) + " outside viable set";
        col += x;
        engagement[c] += instance.EngagementWeight(u, c, t) *
                         instance.QueryWeight(u) * x;
      }
      const double want = t < slots ? 1.0 : 0.0;
      if (std::abs(col - want) > tol)
        return "slot mass of user " + std::to_string(u) + " slot " +
               std::to_string(t) + " is " + std::to_string(col);
    }
    for (int c = 0; c < n_c && distinct_slots; ++c) {
      double rep = 0.0;
      for (int t = 0; t < instance.horizon; ++t) rep += policy.Pi(u, c, t);
      if (rep > 1.0 + tol) return "provider repeated within a slate";
    }
  }
  for (int c : policy.viable_set)
    if (engagement[c] < instance.providers[c].threshold - tol)
      return "provider " + std::to_string(c) + " below threshold";
  return "";
}

// Maps a policy on RestrictProviders(instance, keep) back to `instance`.
inline MatchingPolicy LiftPolicy(const Instance& instance,
                                 const MatchingPolicy& sub,
                                 std::span<const int> keep) {
  MatchingPolicy out = EmptyPolicy(instance);
  for (int u = 0; u < sub.num_users; ++u)
    for (int i = 0; i < sub.num_providers; ++i)
      for (int t = 0; t < sub.horizon; ++t)
        out.pi[out.Index(u, keep[i], t)] = sub.Pi(u, i, t);
  for (int i : sub.viable_set) out.viable_set.push_back(keep[i]);
  std::sort(out.viable_set.begin(), out.viable_set.end());
  out.objective = sub.objective;
  out.max_regret_bound = sub.max_regret_bound;
  out.relaxed_objective = sub.relaxed_objective;
  out.diagnostic = sub.diagnostic;
  ScorePolicy(instance, out);
  return out;
}

//
//  LP models
//

// Linear program together with the variable layout needed to read it back.
struct MatchingModel {
  LinearProgram lp;
  std::vector<int> providers;  // column order; provider ids
  int slots = 0;               // min(horizon, |providers|)
  int num_users = 0;
  std::vector<int> pi_var;  // [user][i][slot]
  std::vector<int> y_var;   // per i; empty when y is fixed to 1
  std::vector<char> linked;  // [user][i] linking row present
  int mr_var = -1;
  double lambda = 0.0;

  int PiVar(int u, int i, int t) const {
    return pi_var[(static_cast<std::size_t>(u) * providers.size() + i) * slots +
                  t];
  }
  bool relaxed() const { return !y_var.empty(); }
};

// Upper bound on the engagement the whole population can supply to `set`.
inline double TotalSupply(const Instance& instance, std::span<const int> set) {
  const int slots =
      std::min<int>(instance.horizon, static_cast<int>(set.size()));
  double supply = 0.0;
  for (int u = 0; u < instance.num_users(); ++u) {
    for (int t = 0; t < slots; ++t) {
      double best = 0.0;
      for (int c : set) best = std::max(best, instance.EngagementWeight(u, c, t));
      supply += instance.QueryWeight(u) * best;
    }
  }
  return supply;
}

// Most engagement a single provider can collect if every user sends it one slot.
inline double AttainableEngagement(const Instance& instance, int c) {
  double e = 0.0;
  for (int u = 0; u < instance.num_users(); ++u) {
    double best = 0.0;
    for (int t = 0; t < instance.horizon; ++t)
      best = std::max(best, instance.EngagementWeight(u, c, t));
    e += instance.QueryWeight(u) * best;
  }
  return e;
}

inline bool SupplyShortfall(const Instance& instance, std::span<const int> set) {
  double need = 0.0;
  for (int c : set) need += instance.providers[c].threshold;
  return TotalSupply(instance, set) < need - 1e-9;
}

namespace internal {

inline void CheckSubset(const Instance& instance, std::span<const int> set) {
  std::vector<char> seen(instance.num_providers(), 0);
  for (int c : set) {
    if (c < 0 || c >= instance.num_providers())
      throw InputError("provider id " + std::to_string(c) + " out of range");
    if (seen[c]) throw InputError("provider id repeated in subset");
    seen[c] = 1;
  }
}

inline MatchingModel BuildModel(const Instance& instance,
                                std::span<const int> set, bool relaxed,
                                bool lazy_links) {
  ValidateInstance(instance);
  CheckSubset(instance, set);
  MatchingModel m;
  m.providers.assign(set.begin(), set.end());
  m.num_users = instance.num_users();
  const int k = static_cast<int>(set.size());
  m.slots = std::min(instance.horizon, k);
  const Vector alpha = SlotWeights(instance);
  LinearProgram& lp = m.lp;
  m.pi_var.resize(static_cast<std::size_t>(m.num_users) * k * m.slots);
  for (int u = 0; u < m.num_users; ++u) {
    const double q = instance.QueryWeight(u);
    for (int i = 0; i < k; ++i) {
      const double r = MeanReward(instance, u, set[i]);
      for (int t = 0; t < m.slots; ++t)
        m.pi_var[(static_cast<std::size_t>(u) * k + i) * m.slots + t] =
            lp.AddVariable(q * alpha[t] * r, 0.0, 1.0);
    }
  }
  if (relaxed)
    for (int i = 0; i < k; ++i) m.y_var.push_back(lp.AddVariable(0.0, 0.0, 1.0));

  for (int u = 0; u < m.num_users; ++u) {
    for (int t = 0; t < m.slots; ++t) {
      std::vector<Term> terms;
      for (int i = 0; i < k; ++i) terms.push_back({m.PiVar(u, i, t), 1.0});
      lp.AddRow(RowType::kEqual, 1.0, std::move(terms));
    }
  }
  m.linked.assign(static_cast<std::size_t>(m.num_users) * k, 0);
  for (int u = 0; u < m.num_users; ++u) {
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::size_t seed = static_cast<std::size_t>(k);
    if (lazy_links) {
      seed = std::min<std::size_t>(relaxed ? 3 : m.slots + 1, k);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return MeanReward(instance, u, set[a]) > MeanReward(instance, u, set[b]);
      });
    }
    for (std::size_t j = 0; j < seed; ++j) {
      const int i = order[j];
      if (!relaxed && m.slots == 1) continue;
      std::vector<Term> terms;
      for (int t = 0; t < m.slots; ++t) terms.push_back({m.PiVar(u, i, t), 1.0});
      if (relaxed) {
        terms.push_back({m.y_var[i], -1.0});
        lp.AddRow(RowType::kLessEqual, 0.0, std::move(terms));
      } else {
        lp.AddRow(RowType::kLessEqual, 1.0, std::move(terms));
      }
      m.linked[static_cast<std::size_t>(u) * k + i] = 1;
    }
  }
  for (int i = 0; i < k; ++i) {
    const int c = set[i];
    std::vector<Term> terms;
    for (int u = 0; u < m.num_users; ++u) {
      const double q = instance.QueryWeight(u);
      for (int t = 0; t < m.slots; ++t) {
        const double w = q * instance.EngagementWeight(u, c, t);
        if (w != 0.0) terms.push_back({m.PiVar(u, i, t), w});
      }
    }
    const double nu = instance.providers[c].threshold;
    if (relaxed) {
      terms.push_back({m.y_var[i], -nu});
      lp.AddRow(RowType::kGreaterEqual, 0.0, std::move(terms));
    } else {
      lp.AddRow(RowType::kGreaterEqual, nu, std::move(terms));
    }
  }
  return m;
}

}  // namespace internal

// cSW(C) with every provider of C forced viable.
inline MatchingModel BuildCswModel(const Instance& instance,
                                   std::span<const int> set) {
  if (set.empty()) throw InputError("cSW: provider subset must be nonempty");
  internal::CheckSubset(instance, set);
  if (SupplyShortfall(instance, set))
    throw InputError("cSW: total supply below the sum of thresholds");
  return internal::BuildModel(instance, set, /*relaxed=*/false, false);
}

inline LinearProgram BuildCswLp(const Instance& instance,
                                std::span<const int> set) {
  return BuildCswModel(instance, set).lp;
}

// MILP relaxation over all providers with y_c in [0, 1]. With `lazy_links`
// only each user's three best linking rows are present up front; the rest
// are separated during the solve.
inline MatchingModel BuildRelaxedModel(const Instance& instance,
                                       bool lazy_links = true) {
  std::vector<int> all(instance.num_providers());
  std::iota(all.begin(), all.end(), 0);
  return internal::BuildModel(instance, all, /*relaxed=*/true, lazy_links);
}

// Adds MR >= mu_u - U(u) for every user and -lambda * MR to the objective.
inline void AddRegretTradeoff(MatchingModel& model, const Instance& instance,
                              std::span<const double> mu, double lambda) {
  if (!(lambda >= 0.0)) throw InputError("regret tradeoff: lambda must be >= 0");
  if (instance.is_sigmoid())
    throw InputError("regret tradeoff requires an additive utility");
  if (model.mr_var >= 0) throw InputError("regret tradeoff already added");
  const Vector alpha = SlotWeights(instance);
  model.lambda = lambda;
  model.mr_var = model.lp.AddVariable(-lambda, -kInfinity, kInfinity);
  const int k = static_cast<int>(model.providers.size());
  for (int u = 0; u < model.num_users; ++u) {
    std::vector<Term> terms{{model.mr_var, 1.0}};
    for (int i = 0; i < k; ++i) {
      const double r = MeanReward(instance, u, model.providers[i]);
      for (int t = 0; t < model.slots; ++t)
        if (alpha[t] * r != 0.0) terms.push_back({model.PiVar(u, i, t), alpha[t] * r});
    }
    model.lp.AddRow(RowType::kGreaterEqual, mu[u], std::move(terms));
  }
}

// Solves the model, separating missing linking rows when needed.
inline LpSolution SolveModel(MatchingModel& model,
                             const SimplexOptions& options = {}) {
  const bool complete = std::all_of(model.linked.begin(), model.linked.end(),
                                    [](char x) { return x != 0; });
  if (complete || (!model.relaxed() && model.slots == 1))
    return SolveLp(model.lp, options);
  const int k = static_cast<int>(model.providers.size());
  auto separate = [&model, k](const LpSolution& sol) {
    std::vector<LpRow> rows;
    const bool relaxed = model.relaxed();
    for (int u = 0; u < model.num_users; ++u) {
      for (int i = 0; i < k; ++i) {
        char& flag = model.linked[static_cast<std::size_t>(u) * k + i];
        if (flag) continue;
        double mass = 0.0;
        for (int t = 0; t < model.slots; ++t) mass += sol.primal[model.PiVar(u, i, t)];
        const double cap = relaxed ? sol.primal[model.y_var[i]] : 1.0;
        if (mass <= cap + 1e-9) continue;
        LpRow row{RowType::kLessEqual, relaxed ? 0.0 : 1.0, {}};
        for (int t = 0; t < model.slots; ++t) row.terms.push_back({model.PiVar(u, i, t), 1.0});
        if (relaxed) row.terms.push_back({model.y_var[i], -1.0});
        rows.push_back(std::move(row));
        flag = 1;
      }
    }
    return rows;
  };
  return SolveWithLazyRows(model.lp, separate, 200, options);
}

// Reads pi back into a full-size policy and scores it.
inline MatchingPolicy ExtractPolicy(const Instance& instance,
                                    const MatchingModel& model,
                                    const LpSolution& sol) {
  MatchingPolicy p = EmptyPolicy(instance);
  const int k = static_cast<int>(model.providers.size());
  for (int u = 0; u < model.num_users; ++u)
    for (int i = 0; i < k; ++i)
      for (int t = 0; t < model.slots; ++t) {
        const double x = sol.primal[model.PiVar(u, i, t)];
        p.pi[p.Index(u, model.providers[i], t)] = std::clamp(x, 0.0, 1.0);
      }
  p.viable_set = model.providers;
  std::sort(p.viable_set.begin(), p.viable_set.end());
  p.objective = sol.objective_value;
  if (model.mr_var >= 0) p.max_regret_bound = sol.primal[model.mr_var];
  ScorePolicy(instance, p);
  return p;
}

//
//  cSW and provider selection
//

struct CswResult {
  double value = 0.0;  // g(C); -infinity when C cannot be kept viable
  MatchingPolicy policy;
  LpStatus status = LpStatus::kOptimal;
};

// g(C). The empty set scores 0 with every user unmatched.
inline CswResult Csw(const Instance& instance, std::span<const int> set,
                     const SimplexOptions& options = {}) {
  CswResult res;
  res.policy = EmptyPolicy(instance);
  if (set.empty()) return res;
  internal::CheckSubset(instance, set);
  if (SupplyShortfall(instance, set)) {
    res.value = -kInfinity;
    res.status = LpStatus::kInfeasible;
    return res;
  }
  MatchingModel model = internal::BuildModel(instance, set, false, true);
  const LpSolution sol = SolveModel(model, options);
  res.status = sol.status;
  if (sol.status == LpStatus::kInfeasible) {
    res.value = -kInfinity;
    return res;
  }
  if (!sol.optimal())
    throw std::runtime_error(std::string("cSW solve failed: ") +
                             LpStatusName(sol.status));
  res.policy = ExtractPolicy(instance, model, sol);
  res.value = sol.objective_value;
  return res;
}

struct GreedyStep {
  int provider = -1;
  double value = 0.0;
};

// Greedy provider selection from the empty set. `trace` receives each
// accepted addition.
inline MatchingPolicy GreedyProviders(const Instance& instance,
                                      std::vector<GreedyStep>* trace = nullptr) {
  ValidateInstance(instance);
  std::vector<int> chosen;
  std::vector<char> in(instance.num_providers(), 0);
  CswResult current = Csw(instance, chosen);
  while (true) {
    int best_c = -1;
    CswResult best;
    for (int c = 0; c < instance.num_providers(); ++c) {
      if (in[c]) continue;
      std::vector<int> cand = chosen;
      cand.push_back(c);
      std::sort(cand.begin(), cand.end());
      CswResult r = Csw(instance, cand);
      if (r.value == -kInfinity) continue;
      if (best_c < 0 || r.value > best.value + 1e-9) {
        best_c = c;
        best = std::move(r);
      }
    }
    if (best_c < 0 || !(best.value > current.value + 1e-9)) break;
    chosen.push_back(best_c);
    std::sort(chosen.begin(), chosen.end());
    in[best_c] = 1;
    if (trace) trace->push_back({best_c, best.value});
    current = std::move(best);
  }
  current.policy.objective = current.value;
  return current.policy;
}

// Best cSW over every provider subset.
inline MatchingPolicy ExactEnumeration(const Instance& instance,
                                       int max_providers = 15) {
  ValidateInstance(instance);
  const int n = instance.num_providers();
  if (n > max_providers)
    throw InputError("exact enumeration refused: " + std::to_string(n) +
                     " providers exceeds cap " + std::to_string(max_providers));
  CswResult best = Csw(instance, std::vector<int>{});
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> set;
    for (int c = 0; c < n; ++c)
      if (mask & (1u << c)) set.push_back(c);
    CswResult r = Csw(instance, set);
    if (r.value > best.value + 1e-9) best = std::move(r);
  }
  best.policy.objective = best.value;
  return best.policy;
}

//
//  Regret
//

// mu_u: every query of u answered by its best providers with viability
// ignored. Slots take the top rewards in order of decreasing weight.
inline Vector IdealUtilities(const Instance& instance) {
  const int n_c = instance.num_providers();
  const int slots = std::min(instance.horizon, n_c);
  Vector alpha = SlotWeights(instance);
  std::sort(alpha.begin(), alpha.end(), std::greater<>());
  Vector mu(instance.num_users(), 0.0);
  for (int u = 0; u < instance.num_users(); ++u) {
    Vector r(n_c);
    for (int c = 0; c < n_c; ++c) r[c] = MeanReward(instance, u, c);
    std::sort(r.begin(), r.end(), std::greater<>());
    r.resize(slots);
    if (instance.is_sigmoid()) {
      mu[u] = SlateUtility(instance, r);
    } else {
      double acc = 0.0;
      for (int t = 0; t < slots; ++t) acc += alpha[t] * r[t];
      mu[u] = acc;
    }
  }
  return mu;
}

struct RegretReport {
  Vector mu;
  Vector regret;
  double max_regret = 0.0;
};

inline RegretReport MakeRegretReport(const Instance& instance,
                                     const MatchingPolicy& policy) {
  RegretReport rep;
  rep.mu = IdealUtilities(instance);
  rep.regret.resize(rep.mu.size());
  rep.max_regret = instance.num_users() > 0 ? -kInfinity : 0.0;
  for (std::size_t u = 0; u < rep.mu.size(); ++u) {
    rep.regret[u] = rep.mu[u] - policy.per_user_utility[u];
    rep.max_regret = std::max(rep.max_regret, rep.regret[u]);
  }
  return rep;
}

//
//  LP rounding
//

struct LpRsOptions {
  double theta = 0.5;
  double lambda = 0.0;  // regret weight; 0 disables the MR term
  bool lazy_links = true;
  SimplexOptions simplex;
};

// Largest y_c consistent with the relaxed solution's engagement.
inline Vector ConsistentY(const Instance& instance, const MatchingModel& model,
                          const LpSolution& sol) {
  const int k = static_cast<int>(model.providers.size());
  Vector y(k, 0.0);
  for (int i = 0; i < k; ++i) {
    const int c = model.providers[i];
    double e = 0.0;
    for (int u = 0; u < model.num_users; ++u)
      for (int t = 0; t < model.slots; ++t)
        e += instance.QueryWeight(u) * instance.EngagementWeight(u, c, t) *
             sol.primal[model.PiVar(u, i, t)];
    const double nu = instance.providers[c].threshold;
    y[i] = nu > 0 ? std::min(1.0, e / nu) : 1.0;
    y[i] = std::max(y[i], sol.primal[model.y_var[i]]);
  }
  return y;
}

// Removes providers until each can be fed alone and all can be fed together.
// Lowest score goes first; ties drop the highest id.
inline std::vector<int> PruneToSupply(const Instance& instance,
                                      std::vector<int> set,
                                      std::span<const double> score) {
  auto drop_worst = [&](std::vector<int>& s) {
    auto it = std::min_element(s.begin(), s.end(), [&](int a, int b) {
      if (score[a] != score[b]) return score[a] < score[b];
      return a > b;
    });
    s.erase(it);
  };
  bool changed = true;
  while (changed && !set.empty()) {
    changed = false;
    for (auto it = set.begin(); it != set.end();) {
      if (AttainableEngagement(instance, *it) <
          instance.providers[*it].threshold - 1e-9) {
        it = set.erase(it);
        changed = true;
      } else {
        ++it;
      }
    }
    if (!set.empty() && SupplyShortfall(instance, set)) {
      drop_worst(set);
      changed = true;
    }
  }
  return set;
}

// cSW(V) with an optional regret term; infeasible sets lose their weakest
// provider until a solve succeeds.
inline MatchingPolicy SolveRestricted(const Instance& instance,
                                      std::vector<int> set,
                                      std::span<const double> score,
                                      double lambda,
                                      const SimplexOptions& options,
                                      std::string* diagnostic) {
  const Vector mu = lambda > 0 ? IdealUtilities(instance) : Vector{};
  while (!set.empty()) {
    std::sort(set.begin(), set.end());
    MatchingModel model = internal::BuildModel(instance, set, false, true);
    if (lambda > 0) AddRegretTradeoff(model, instance, mu, lambda);
    const LpSolution sol = SolveModel(model, options);
    if (sol.optimal()) return ExtractPolicy(instance, model, sol);
    if (sol.status != LpStatus::kInfeasible)
      throw std::runtime_error(std::string("restricted solve failed: ") +
                               LpStatusName(sol.status));
    auto it = std::min_element(set.begin(), set.end(), [&](int a, int b) {
      if (score[a] != score[b]) return score[a] < score[b];
      return a > b;
    });
    if (diagnostic)
      *diagnostic += "dropped provider " + std::to_string(*it) +
                     " after infeasible restricted solve; ";
    set.erase(it);
  }
  if (diagnostic) *diagnostic += "empty viable set";
  return EmptyPolicy(instance);
}

// Relax y, round at theta, prune to supply, re-solve cSW on the survivors.
inline MatchingPolicy LpRs(const Instance& instance,
                           const LpRsOptions& options = {}) {
  if (!(options.theta > 0.0 && options.theta <= 1.0))
    throw InputError("lp_rs: theta must lie in (0, 1]");
  if (!(options.lambda >= 0.0)) throw InputError("lp_rs: lambda must be >= 0");
  ValidateInstance(instance);
  if (instance.num_providers() == 0 || instance.num_users() == 0) {
    MatchingPolicy p = EmptyPolicy(instance);
    p.diagnostic = "empty viable set";
    return p;
  }
  MatchingModel relaxed = BuildRelaxedModel(instance, options.lazy_links);
  if (options.lambda > 0)
    AddRegretTradeoff(relaxed, instance, IdealUtilities(instance),
                      options.lambda);
  const LpSolution sol = SolveModel(relaxed, options.simplex);
  if (!sol.optimal())
    throw std::runtime_error(std::string("relaxed solve failed: ") +
                             LpStatusName(sol.status));
  const Vector y = ConsistentY(instance, relaxed, sol);
  std::vector<int> v;
  for (int c = 0; c < instance.num_providers(); ++c)
    if (y[c] >= options.theta - 1e-9) v.push_back(c);
  v = PruneToSupply(instance, std::move(v), y);
  std::string diag;
  MatchingPolicy p = SolveRestricted(instance, std::move(v), y, options.lambda,
                                     options.simplex, &diag);
  p.relaxed_objective = sol.objective_value;
  p.diagnostic = diag;
  return p;
}

}  // namespace ecomatch

#endif  // ECOMATCH_MATCHING_H_
