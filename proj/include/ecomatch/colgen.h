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
//  Column generation for non-additive (sigmoid) utilities.
//
//  A star is a user together with the k providers answering that user's k
//  queries in an epoch. Its value is Qbar(u) * f(rewards), so any utility of
//  the reward vector can be handled. The master LP is
//
//    max  sum_s value_s pi_s
//    s.t. sum_{s of u} pi_s                    <= 1        per user
//         sum_{s of u, c in s} pi_s            <= y_c      per (user, provider)
//         sum_s #(s,c) Qbar w pi_s - nu_c y_c  >= 0        per provider
//         pi >= 0, 0 <= y <= 1
//
//  pi carries no explicit upper bound; the convexity row already caps it and
//  keeps the duals free of bound multipliers.
//
//  Linking rows only exist for pairs used by some star in the pool. The
//  restricted variant fixes y = 1 on a chosen set, drops the linking rows and
//  adds penalized artificials to the viability rows so that the pool can
//  start infeasible.
//

#ifndef ECOMATCH_COLGEN_H_
#define ECOMATCH_COLGEN_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ecomatch/lp.h"
#include "ecomatch/matching.h"
#include "ecomatch/model.h"

namespace ecomatch {

struct Star {
  int user = 0;
  // Ordered by decreasing reward (ties by id); slot t is providers[t].
  std::vector<int> providers;
  double value = 0.0;

  bool operator==(const Star& o) const {
    return user == o.user && providers == o.providers;
  }
};

// Puts `providers` in slot order and computes the star value.
inline Star MakeStar(const Instance& instance, int user,
                     std::vector<int> providers) {
  std::vector<double> r(instance.num_providers());
  for (int c : providers) r[c] = MeanReward(instance, user, c);
  std::sort(providers.begin(), providers.end(), [&](int a, int b) {
    if (r[a] != r[b]) return r[a] > r[b];
    return a < b;
  });
  Vector rewards;
  for (int c : providers) rewards.push_back(r[c]);
  Star s{user, std::move(providers), 0.0};
  s.value = instance.QueryWeight(user) * SlateUtility(instance, rewards);
  return s;
}

// Engagement the star sends to each provider it contains, (provider, units).
inline std::vector<std::pair<int, double>> StarEngagement(const Instance& instance,
                                                          const Star& s) {
  std::vector<std::pair<int, double>> out;
  const double q = instance.QueryWeight(s.user);
  for (int t = 0; t < static_cast<int>(s.providers.size()); ++t) {
    const int c = s.providers[t];
    const double e = q * instance.EngagementWeight(s.user, c, t);
    auto it = std::find_if(out.begin(), out.end(),
                           [c](const auto& p) { return p.first == c; });
    if (it == out.end()) out.push_back({c, e});
    else it->second += e;
  }
  return out;
}

struct DualPrices {
  Vector beta;   // per user, >= 0
  Vector gamma;  // per (user, provider), >= 0; 0 where no row exists
  Vector alpha;  // per provider, <= 0 (dual of a >= row)

  double Gamma(int u, int c, int n_c) const {
    return gamma[static_cast<std::size_t>(u) * n_c + c];
  }
};

inline double ReducedCost(const Instance& instance, const DualPrices& d,
                          const Star& s) {
  const int n_c = instance.num_providers();
  double rc = s.value - d.beta[s.user];
  for (const auto& [c, e] : StarEngagement(instance, s))
    rc -= d.Gamma(s.user, c, n_c) + e * d.alpha[c];
  return rc;
}

class StarMaster {
 public:
  // Relaxed master over every provider.
  static StarMaster Relaxed(const Instance& instance) {
    StarMaster m(instance);
    const int n_c = instance.num_providers();
    m.allowed_.assign(n_c, 1);
    for (int c = 0; c < n_c; ++c) m.y_var_.push_back(m.lp_.AddVariable(0.0, 0.0, 1.0));
    for (int c = 0; c < n_c; ++c)
      m.viab_row_.push_back(m.lp_.AddRow(RowType::kGreaterEqual, 0.0,
                                         {{m.y_var_[c], -instance.providers[c].threshold}}));
    return m;
  }

  // Master with y fixed to 1 on `set` and 0 elsewhere. A positive `penalty`
  // adds artificials with that objective cost to the viability rows.
  static StarMaster Restricted(const Instance& instance, std::span<const int> set,
                               double penalty) {
    StarMaster m(instance);
    m.allowed_.assign(instance.num_providers(), 0);
    m.viab_row_.assign(instance.num_providers(), -1);
    for (int c : set) {
      m.allowed_[c] = 1;
      std::vector<Term> terms;
      if (penalty > 0) {
        m.art_var_.push_back(m.lp_.AddVariable(-penalty, 0.0, kInfinity));
        terms.push_back({m.art_var_.back(), 1.0});
      }
      m.viab_row_[c] = m.lp_.AddRow(RowType::kGreaterEqual,
                                    instance.providers[c].threshold, std::move(terms));
    }
    return m;
  }

  bool restricted() const { return y_var_.empty(); }
  bool Allowed(int c) const { return allowed_[c] != 0; }
  const std::vector<char>& allowed() const { return allowed_; }
  const std::vector<Star>& stars() const { return stars_; }
  const LinearProgram& lp() const { return lp_; }
  int StarVar(int i) const { return star_var_[i]; }
  int YVar(int c) const { return y_var_[c]; }
  const std::vector<int>& artificials() const { return art_var_; }

  bool Contains(const Star& s) const {
    return std::find(stars_.begin(), stars_.end(), s) != stars_.end();
  }

  // Appends a column; returns false when the star is already present.
  bool AddStar(const Star& s) {
    for (int c : s.providers)
      if (!allowed_[c]) throw InputError("star uses a provider outside the master");
    if (Contains(s)) return false;
    const int n_c = instance_.num_providers();
    std::vector<std::pair<int, double>> entries;
    entries.push_back({ConvexityRow(s.user), 1.0});
    for (const auto& [c, e] : StarEngagement(instance_, s)) {
      if (!restricted()) {
        int& row = link_row_[static_cast<std::size_t>(s.user) * n_c + c];
        if (row < 0)
          row = lp_.AddRow(RowType::kLessEqual, 0.0, {{y_var_[c], -1.0}});
        entries.push_back({row, 1.0});
      }
      if (e != 0.0) entries.push_back({viab_row_[c], e});
    }
    star_var_.push_back(lp_.AddColumn(s.value, 0.0, kInfinity, entries));
    stars_.push_back(s);
    return true;
  }

  DualPrices Duals(const LpSolution& sol) const {
    const int n_u = instance_.num_users();
    const int n_c = instance_.num_providers();
    DualPrices d;
    d.beta.assign(n_u, 0.0);
    d.gamma.assign(static_cast<std::size_t>(n_u) * n_c, 0.0);
    d.alpha.assign(n_c, 0.0);
    for (int u = 0; u < n_u; ++u)
      if (conv_row_[u] >= 0) d.beta[u] = sol.dual[conv_row_[u]];
    for (std::size_t i = 0; i < link_row_.size(); ++i)
      if (link_row_[i] >= 0) d.gamma[i] = sol.dual[link_row_[i]];
    for (int c = 0; c < n_c; ++c)
      if (viab_row_[c] >= 0) d.alpha[c] = sol.dual[viab_row_[c]];
    return d;
  }

 private:
  explicit StarMaster(const Instance& instance)
      : instance_(instance),
        conv_row_(instance.num_users(), -1),
        link_row_(static_cast<std::size_t>(instance.num_users()) *
                      instance.num_providers(),
                  -1) {}

  int ConvexityRow(int u) {
    if (conv_row_[u] < 0) conv_row_[u] = lp_.AddRow(RowType::kLessEqual, 1.0, {});
    return conv_row_[u];
  }

  const Instance& instance_;
  LinearProgram lp_;
  std::vector<Star> stars_;
  std::vector<int> star_var_;
  std::vector<int> y_var_;
  std::vector<int> art_var_;
  std::vector<int> conv_row_;
  std::vector<int> link_row_;
  std::vector<int> viab_row_;
  std::vector<char> allowed_;
};

// LP of the relaxed master holding exactly `stars`.
inline LinearProgram BuildMaster(const Instance& instance,
                                 const std::vector<Star>& stars) {
  StarMaster m = StarMaster::Relaxed(instance);
  for (const auto& s : stars) m.AddStar(s);
  return m.lp();
}

//
//  Pricing
//

// Calls fn(multiset) for every nondecreasing k-tuple over `pool`.
template <typename Fn>
void ForEachMultiset(std::span<const int> pool, int k, Fn&& fn) {
  std::vector<int> idx(k, 0);
  std::vector<int> cur(k);
  if (pool.empty()) return;
  const int n = static_cast<int>(pool.size());
  while (true) {
    for (int t = 0; t < k; ++t) cur[t] = pool[idx[t]];
    fn(cur);
    int t = k - 1;
    while (t >= 0 && idx[t] == n - 1) --t;
    if (t < 0) return;
    ++idx[t];
    for (int r = t + 1; r < k; ++r) idx[r] = idx[t];
  }
}

inline double MultisetCount(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n + i - 1) / i;
  return c;
}

struct PricedStar {
  Star star;
  double reduced_cost = -kInfinity;
};

inline std::vector<int> AllowedList(const std::vector<char>& allowed) {
  std::vector<int> out;
  for (int c = 0; c < static_cast<int>(allowed.size()); ++c)
    if (allowed[c]) out.push_back(c);
  return out;
}

// Best star of one user by exhaustive enumeration.
inline PricedStar PriceUserExact(const Instance& instance, const DualPrices& d,
                                 int user, int k,
                                 const std::vector<char>& allowed,
                                 double max_enumeration = 2e5) {
  const std::vector<int> pool = AllowedList(allowed);
  if (MultisetCount(static_cast<int>(pool.size()), k) > max_enumeration)
    throw InputError("pricing enumeration budget exceeded; use the linearized oracle");
  PricedStar best;
  ForEachMultiset(pool, k, [&](const std::vector<int>& tuple) {
    Star s = MakeStar(instance, user, tuple);
    const double rc = ReducedCost(instance, d, s);
    if (rc > best.reduced_cost) best = {std::move(s), rc};
  });
  return best;
}

// Global best star; users are priced independently and the lowest user id
// wins ties.
inline PricedStar PriceStar(const Instance& instance, const DualPrices& d, int k,
                            const std::vector<char>& allowed) {
  PricedStar best;
  for (int u = 0; u < instance.num_users(); ++u) {
    PricedStar p = PriceUserExact(instance, d, u, k, allowed);
    if (p.reduced_cost > best.reduced_cost) best = std::move(p);
  }
  return best;
}

inline PricedStar PriceStar(const Instance& instance, const DualPrices& d, int k) {
  return PriceStar(instance, d, k, std::vector<char>(instance.num_providers(), 1));
}

//
//  Linearized pricing
//
//  The reward sum R of a star ranges over [k min r, k max r]. That range is
//  cut into equal intervals and on each one the value Qbar * sigma(R) is
//  replaced by its tangent at the midpoint. Inside one interval the reduced
//  cost is linear in the slot counts apart from the per-provider linking
//  price, and the best gated tuple is found by depth-first branch and bound.
//

struct LinearizedPrice {
  Star star;
  double approx_reduced_cost = -kInfinity;
  double reduced_cost = -kInfinity;  // exact, for the returned star
  double error_bound = 0.0;          // max |value - tangent| on any interval
};

inline double SigmoidCurvatureBound() { return 1.0 / (6.0 * std::sqrt(3.0)); }

inline LinearizedPrice PriceUserLinearized(const Instance& instance,
                                           const DualPrices& d, int user, int k,
                                           const std::vector<char>& allowed,
                                           int intervals = 8) {
  const auto* sig = std::get_if<SigmoidUtility>(&instance.utility);
  if (!sig) throw InputError("linearized pricing needs a sigmoid utility");
  if (intervals < 1) throw InputError("linearized pricing needs >= 1 interval");
  const int n_c = instance.num_providers();
  const std::vector<int> pool = AllowedList(allowed);
  LinearizedPrice out;
  if (pool.empty()) return out;
  const double q = instance.QueryWeight(user);
  Vector r(n_c, 0.0);
  double rmin = kInfinity, rmax = -kInfinity;
  for (int c : pool) {
    r[c] = MeanReward(instance, user, c);
    rmin = std::min(rmin, r[c]);
    rmax = std::max(rmax, r[c]);
  }
  const double lo = k * rmin;
  const double h = (k * rmax - lo) / intervals;
  out.error_bound = q * sig->scale * sig->scale * SigmoidCurvatureBound() *
                    (h / 2) * (h / 2) / 2;
  auto value = [&](double sum) { return q * Logistic(sig->scale * (sum + sig->beta)); };

  for (int i = 0; i < intervals; ++i) {
    const double gate_lo = lo + i * h;
    const double gate_hi = i + 1 == intervals ? k * rmax : lo + (i + 1) * h;
    const double mid = 0.5 * (gate_lo + gate_hi);
    const double s = Logistic(sig->scale * (mid + sig->beta));
    const double slope = q * sig->scale * s * (1 - s);
    const double base = value(mid) - slope * mid - d.beta[user];
    // Per-copy gain and first-use price of each provider, best gain first.
    std::vector<int> order = pool;
    Vector gain(n_c, 0.0);
    for (int c : pool)
      gain[c] = slope * r[c] - q * instance.EngagementWeight(user, c, 0) * d.alpha[c];
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return gain[a] > gain[b]; });
    const int n = static_cast<int>(order.size());
    Vector suf_gain(n + 1, -kInfinity), suf_rmin(n + 1, kInfinity),
        suf_rmax(n + 1, -kInfinity);
    for (int j = n - 1; j >= 0; --j) {
      suf_gain[j] = std::max(suf_gain[j + 1], gain[order[j]]);
      suf_rmin[j] = std::min(suf_rmin[j + 1], r[order[j]]);
      suf_rmax[j] = std::max(suf_rmax[j + 1], r[order[j]]);
    }
    double best = -kInfinity;
    std::vector<int> best_tuple, cur;
    const double slack = 1e-12 * (1 + std::abs(gate_hi));
    auto dfs = [&](auto&& self, int j, int rem, double obj, double sum) -> void {
      if (rem == 0) {
        if (sum >= gate_lo - slack && sum <= gate_hi + slack && obj > best) {
          best = obj;
          best_tuple = cur;
        }
        return;
      }
      if (j == n) return;
      if (obj + rem * suf_gain[j] <= best) return;
      if (sum + rem * suf_rmax[j] < gate_lo - slack ||
          sum + rem * suf_rmin[j] > gate_hi + slack)
        return;
      const int c = order[j];
      for (int take = rem; take >= 0; --take) {
        const double add = take * gain[c] - (take > 0 ? d.Gamma(user, c, n_c) : 0.0);
        for (int t = 0; t < take; ++t) cur.push_back(c);
        self(self, j + 1, rem - take, obj + add, sum + take * r[c]);
        cur.resize(cur.size() - take);
      }
    };
    dfs(dfs, 0, k, 0.0, 0.0);
    if (best_tuple.empty()) continue;
    if (base + best > out.approx_reduced_cost) {
      out.approx_reduced_cost = base + best;
      out.star = MakeStar(instance, user, best_tuple);
    }
  }
  out.reduced_cost = ReducedCost(instance, d, out.star);
  return out;
}

//
//  Column generation loop
//

struct ColGenOptions {
  int k = 1;
  double tol = 1e-7;
  int max_iter = 300;
  double theta = 0.5;
  bool linearized = false;
  int intervals = 8;
  double max_enumeration = 2e5;
  SimplexOptions simplex;
};

struct ColGenIteration {
  int iteration = 0;
  std::string phase;  // "relaxed" or "restricted"
  double master_objective = 0.0;
  double max_reduced_cost = 0.0;
  int columns_added = 0;
};

struct ColGenResult {
  MatchingPolicy policy;
  std::vector<ColGenIteration> log;
  double relaxed_objective = 0.0;  // last relaxed master value
  bool converged = false;          // relaxed phase met the tolerance
  std::vector<Star> stars;         // final support
  Vector star_mass;
};

inline void WriteColGenLog(const std::vector<ColGenIteration>& log, std::ostream& out) {
  out << "iteration,phase,master_objective,max_reduced_cost,columns_added\n";
  char buf[160];
  for (const auto& it : log) {
    std::snprintf(buf, sizeof(buf), "%d,%s,%.6f,%.6f,%d\n", it.iteration,
                  it.phase.c_str(), it.master_objective, it.max_reduced_cost,
                  it.columns_added);
    out << buf;
  }
}

namespace internal {

inline Star BestSingleProviderStar(const Instance& instance, int u, int k,
                                   const std::vector<char>& allowed) {
  int best = -1;
  double br = -kInfinity;
  for (int c = 0; c < instance.num_providers(); ++c) {
    if (!allowed[c]) continue;
    const double r = MeanReward(instance, u, c);
    if (r > br) {
      br = r;
      best = c;
    }
  }
  return MakeStar(instance, u, std::vector<int>(k, best));
}

// Runs pricing rounds until nothing prices out. Returns the final solution.
inline LpSolution RunLoop(const Instance& instance, StarMaster& master,
                          const ColGenOptions& opt, const std::string& phase,
                          std::vector<ColGenIteration>& log, bool* converged) {
  LpSolution sol;
  *converged = false;
  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    sol = SolveLp(master.lp(), opt.simplex);
    if (!sol.optimal())
      throw std::runtime_error(std::string("master solve failed: ") +
                               LpStatusName(sol.status));
    const DualPrices d = master.Duals(sol);
    ColGenIteration rec{iter, phase, sol.objective_value, -kInfinity, 0};
    std::vector<Star> fresh;
    for (int u = 0; u < instance.num_users(); ++u) {
      Star s;
      double rc;
      if (opt.linearized) {
        LinearizedPrice p = PriceUserLinearized(instance, d, u, opt.k,
                                                master.allowed(), opt.intervals);
        s = std::move(p.star);
        rc = p.reduced_cost;
        if (s.providers.empty()) continue;
      } else {
        PricedStar p = PriceUserExact(instance, d, u, opt.k, master.allowed(),
                                      opt.max_enumeration);
        s = std::move(p.star);
        rc = p.reduced_cost;
      }
      rec.max_reduced_cost = std::max(rec.max_reduced_cost, rc);
      if (rc > opt.tol && !master.Contains(s)) fresh.push_back(std::move(s));
    }
    for (const auto& s : fresh) master.AddStar(s);
    rec.columns_added = static_cast<int>(fresh.size());
    log.push_back(rec);
    if (fresh.empty()) {
      *converged = true;
      return sol;
    }
  }
  sol = SolveLp(master.lp(), opt.simplex);
  if (!sol.optimal())
    throw std::runtime_error(std::string("master solve failed: ") +
                             LpStatusName(sol.status));
  return sol;
}

// Support of the solution, with each user's unused mass moved onto the
// user's best star among the allowed providers.
inline void CollectSupport(const Instance& instance, const StarMaster& master,
                           const LpSolution& sol, int k,
                           std::vector<Star>& stars, Vector& mass) {
  Vector used(instance.num_users(), 0.0);
  for (std::size_t i = 0; i < master.stars().size(); ++i) {
    const double x = std::clamp(sol.primal[master.StarVar(static_cast<int>(i))], 0.0, 1.0);
    if (x <= 1e-12) continue;
    stars.push_back(master.stars()[i]);
    mass.push_back(x);
    used[master.stars()[i].user] += x;
  }
  for (int u = 0; u < instance.num_users(); ++u) {
    const double left = 1.0 - used[u];
    if (left <= 1e-12) continue;
    Star s = BestSingleProviderStar(instance, u, k, master.allowed());
    auto it = std::find(stars.begin(), stars.end(), s);
    if (it == stars.end()) {
      stars.push_back(std::move(s));
      mass.push_back(left);
    } else {
      mass[it - stars.begin()] += left;
    }
  }
}

}  // namespace internal

// Flattens star masses into slot marginals and scores the policy.
inline MatchingPolicy StarsToPolicy(const Instance& instance,
                                    const std::vector<Star>& stars,
                                    std::span<const double> mass,
                                    std::vector<int> viable) {
  MatchingPolicy p = EmptyPolicy(instance);
  std::sort(viable.begin(), viable.end());
  p.viable_set = std::move(viable);
  for (std::size_t i = 0; i < stars.size(); ++i) {
    const Star& s = stars[i];
    for (int t = 0; t < static_cast<int>(s.providers.size()) && t < p.horizon; ++t)
      p.pi[p.Index(s.user, s.providers[t], t)] += mass[i];
    p.per_user_utility[s.user] += mass[i] * s.value / instance.QueryWeight(s.user);
    p.welfare += mass[i] * s.value;
  }
  p.objective = p.welfare;
  return p;
}

inline double EngagementOf(const Instance& instance, const std::vector<Star>& stars,
                           std::span<const double> mass, int c) {
  double e = 0.0;
  for (std::size_t i = 0; i < stars.size(); ++i)
    for (const auto& [pc, units] : StarEngagement(instance, stars[i]))
      if (pc == c) e += mass[i] * units;
  return e;
}

namespace internal {

inline void CheckColGenInputs(const Instance& instance, int k) {
  ValidateInstance(instance);
  if (k < 1) throw InputError("column generation: k must be >= 1");
  if (k != instance.horizon)
    throw InputError("column generation: k must equal the instance horizon");
}

// Upper bound on any star value, used to price the artificials.
inline double PenaltyFor(const Instance& instance) {
  double qmax = 0.0, rmax = 0.0;
  for (int u = 0; u < instance.num_users(); ++u) {
    qmax = std::max(qmax, instance.QueryWeight(u));
    for (int c = 0; c < instance.num_providers(); ++c)
      rmax = std::max(rmax, std::abs(MeanReward(instance, u, c)));
  }
  double f = 1.0;
  if (const auto* lin = std::get_if<LinearUtility>(&instance.utility)) {
    f = 0.0;
    for (double a : lin->alpha) f += std::abs(a) * rmax;
  }
  return 1e3 * (1.0 + qmax * f);
}

// Prune a rounded set to what k slots per user can feed.
inline std::vector<int> PruneStars(const Instance& instance, std::vector<int> set,
                                   std::span<const double> score) {
  auto attainable = [&](int c) {
    double e = 0.0;
    for (int u = 0; u < instance.num_users(); ++u)
      for (int t = 0; t < instance.horizon; ++t)
        e += instance.QueryWeight(u) * instance.EngagementWeight(u, c, t);
    return e;
  };
  auto short_supply = [&](const std::vector<int>& s) {
    double need = 0.0, supply = 0.0;
    for (int c : s) need += instance.providers[c].threshold;
    for (int u = 0; u < instance.num_users(); ++u)
      for (int t = 0; t < instance.horizon; ++t) {
        double best = 0.0;
        for (int c : s) best = std::max(best, instance.EngagementWeight(u, c, t));
        supply += instance.QueryWeight(u) * best;
      }
    return supply < need - 1e-9;
  };
  bool changed = true;
  while (changed && !set.empty()) {
    changed = false;
    for (auto it = set.begin(); it != set.end();) {
      if (attainable(*it) < instance.providers[*it].threshold - 1e-9) {
        it = set.erase(it);
        changed = true;
      } else {
        ++it;
      }
    }
    if (!set.empty() && short_supply(set)) {
      set.erase(std::min_element(set.begin(), set.end(), [&](int a, int b) {
        if (score[a] != score[b]) return score[a] < score[b];
        return a > b;
      }));
      changed = true;
    }
  }
  return set;
}

}  // namespace internal

inline ColGenResult ColumnGeneration(const Instance& instance,
                                     const ColGenOptions& opt = {}) {
  internal::CheckColGenInputs(instance, opt.k);
  if (!(opt.tol > 0)) throw InputError("column generation: tol must be > 0");
  if (opt.max_iter < 1) throw InputError("column generation: max_iter must be >= 1");
  if (!(opt.theta > 0 && opt.theta <= 1))
    throw InputError("column generation: theta must lie in (0, 1]");
  ColGenResult res;
  const int n_c = instance.num_providers();
  const int n_u = instance.num_users();
  if (n_c == 0 || n_u == 0) {
    res.policy = EmptyPolicy(instance);
    res.converged = true;
    return res;
  }

  StarMaster master = StarMaster::Relaxed(instance);
  const std::vector<char> every(n_c, 1);
  for (int u = 0; u < n_u; ++u)
    master.AddStar(internal::BestSingleProviderStar(instance, u, opt.k, every));
  const LpSolution relaxed =
      internal::RunLoop(instance, master, opt, "relaxed", res.log, &res.converged);
  res.relaxed_objective = relaxed.objective_value;

  // Round y at its largest value consistent with the engagement.
  Vector y(n_c, 0.0);
  {
    std::vector<Star> stars;
    Vector mass;
    for (std::size_t i = 0; i < master.stars().size(); ++i) {
      stars.push_back(master.stars()[i]);
      mass.push_back(relaxed.primal[master.StarVar(static_cast<int>(i))]);
    }
    for (int c = 0; c < n_c; ++c) {
      const double nu = instance.providers[c].threshold;
      const double e = EngagementOf(instance, stars, mass, c);
      y[c] = nu > 0 ? std::min(1.0, e / nu) : 1.0;
      y[c] = std::max(y[c], relaxed.primal[master.YVar(c)]);
    }
  }
  std::vector<int> v;
  int fractional = 0;
  for (int c = 0; c < n_c; ++c) {
    if (y[c] > 1e-7 && y[c] < 1 - 1e-7) ++fractional;
    if (y[c] >= opt.theta - 1e-9) v.push_back(c);
  }
  v = internal::PruneStars(instance, std::move(v), y);
  std::string diag;
  if (fractional > 0)
    diag += std::to_string(fractional) + " fractional provider variables rounded; ";

  // Restricted phase with y = 1 on v; drop the weakest provider whenever the
  // pool cannot make v viable.
  const double penalty = internal::PenaltyFor(instance);
  while (!v.empty()) {
    StarMaster rm = StarMaster::Restricted(instance, v, penalty);
    for (const auto& s : master.stars()) {
      bool inside = true;
      for (int c : s.providers) inside = inside && rm.Allowed(c);
      if (inside) rm.AddStar(s);
    }
    for (int u = 0; u < n_u; ++u)
      rm.AddStar(internal::BestSingleProviderStar(instance, u, opt.k, rm.allowed()));
    bool done = false;
    const LpSolution sol =
        internal::RunLoop(instance, rm, opt, "restricted", res.log, &done);
    double art = 0.0;
    for (int a : rm.artificials()) art += sol.primal[a];
    if (art <= 1e-7) {
      internal::CollectSupport(instance, rm, sol, opt.k, res.stars, res.star_mass);
      res.policy = StarsToPolicy(instance, res.stars, res.star_mass, v);
      res.policy.relaxed_objective = res.relaxed_objective;
      if (!done) diag += "restricted phase hit the iteration cap; ";
      res.policy.diagnostic = diag;
      return res;
    }
    auto it = std::min_element(v.begin(), v.end(), [&](int a, int b) {
      if (y[a] != y[b]) return y[a] < y[b];
      return a > b;
    });
    diag += "dropped provider " + std::to_string(*it) + " (viability not reachable); ";
    v.erase(it);
  }
  res.policy = EmptyPolicy(instance);
  res.policy.relaxed_objective = res.relaxed_objective;
  res.policy.diagnostic = diag + "empty viable set";
  return res;
}

//
//  Exhaustive oracle
//

inline std::vector<Star> AllStars(const Instance& instance, int k,
                                  const std::vector<char>& allowed) {
  std::vector<Star> out;
  const std::vector<int> pool = AllowedList(allowed);
  for (int u = 0; u < instance.num_users(); ++u)
    ForEachMultiset(pool, k, [&](const std::vector<int>& tuple) {
      out.push_back(MakeStar(instance, u, tuple));
    });
  return out;
}

struct StarOracleResult {
  MatchingPolicy policy;
  double value = 0.0;
  std::vector<int> viable_set;
};

// Best star LP over every provider subset, each with y fixed to 0/1.
inline StarOracleResult EnumerateStarsExact(const Instance& instance, int k,
                                            double cap = 50000) {
  internal::CheckColGenInputs(instance, k);
  const int n_c = instance.num_providers();
  const double columns =
      instance.num_users() * std::pow(static_cast<double>(n_c), k);
  if (columns > cap)
    throw InputError("star enumeration refused: " + std::to_string(columns) +
                     " columns exceeds cap");
  if (n_c > 15) throw InputError("star enumeration refused: too many providers");
  StarOracleResult best;
  best.policy = EmptyPolicy(instance);
  for (std::uint32_t mask = 1; mask < (1u << n_c); ++mask) {
    std::vector<int> set;
    for (int c = 0; c < n_c; ++c)
      if (mask >> c & 1) set.push_back(c);
    StarMaster m = StarMaster::Restricted(instance, set, 0.0);
    for (const auto& s : AllStars(instance, k, m.allowed())) m.AddStar(s);
    const LpSolution sol = SolveLp(m.lp());
    if (sol.status == LpStatus::kInfeasible) continue;
    if (!sol.optimal())
      throw std::runtime_error(std::string("oracle solve failed: ") +
                               LpStatusName(sol.status));
    if (sol.objective_value > best.value + 1e-9) {
      std::vector<Star> stars;
      Vector mass;
      internal::CollectSupport(instance, m, sol, k, stars, mass);
      best.value = sol.objective_value;
      best.viable_set = set;
      best.policy = StarsToPolicy(instance, stars, mass, set);
      best.policy.objective = sol.objective_value;
    }
  }
  return best;
}

}  // namespace ecomatch

#endif  // ECOMATCH_COLGEN_H_
