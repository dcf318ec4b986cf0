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
//  Ecosystem model: users, providers, reward kernels and utilities.
//

#ifndef ECOMATCH_MODEL_H_
#define ECOMATCH_MODEL_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ecomatch {

using Vector = std::vector<double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Raised for malformed caller input (dimension mismatch, bad parameters).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct UserProfile {
  int id = 0;
  Vector mean;
  double variance = 0.0;    // isotropic query noise
  double activation = 1.0;  // probability the user is active in an epoch
  int demand = 1;           // queries per epoch
};

struct ProviderRecord {
  int id = 0;
  Vector embedding;
  double threshold = 0.0;  // engagement units needed per epoch
};

enum class RewardKind { kDotProduct, kNegativeDistance };

// f(r) = sum_t alpha_t r_t.
struct LinearUtility {
  Vector alpha;
};

// f(r) = logistic(scale * (sum_t r_t + beta)).
struct SigmoidUtility {
  double beta = 0.0;
  double scale = 1.0;
};

using UtilityKind = std::variant<LinearUtility, SigmoidUtility>;

struct Instance {
  std::vector<UserProfile> users;
  std::vector<ProviderRecord> providers;
  RewardKind reward_kind = RewardKind::kDotProduct;
  // r = max(reward_floor, offset + kernel(q, c)). The floor is off unless set.
  double reward_offset = 0.0;
  std::optional<double> reward_floor;
  // Expected queries per user epoch; empty means activation * demand.
  Vector query_weight;
  // Engagement units per impression, flattened [user][provider][slot];
  // empty means 1 everywhere.
  Vector engagement_weight;
  int horizon = 1;     // slots per epoch (T)
  int slate_size = 1;  // s
  UtilityKind utility = LinearUtility{{1.0}};

  int num_users() const { return static_cast<int>(users.size()); }
  int num_providers() const { return static_cast<int>(providers.size()); }
  int dimension() const {
    if (!providers.empty()) return static_cast<int>(providers[0].embedding.size());
    if (!users.empty()) return static_cast<int>(users[0].mean.size());
    return 0;
  }

  double QueryWeight(int u) const {
    if (!query_weight.empty()) return query_weight[u];
    return users[u].activation * users[u].demand;
  }

  double EngagementWeight(int u, int c, int t) const {
    if (engagement_weight.empty()) return 1.0;
    return engagement_weight[(static_cast<std::size_t>(u) * num_providers() + c) *
                                 horizon + t];
  }

  bool is_sigmoid() const {
    return std::holds_alternative<SigmoidUtility>(utility);
  }
};

inline double Logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Kernel value before offset and floor. Used as the secondary ranking key so
// that clipped ties still prefer the closer provider.
inline double RawScore(RewardKind kind, std::span<const double> query,
                       std::span<const double> provider) {
  if (query.size() != provider.size()) {
    throw InputError("reward: query dimension " + std::to_string(query.size()) +
                     " != provider dimension " +
                     std::to_string(provider.size()));
  }
  double acc = 0.0;
  if (kind == RewardKind::kDotProduct) {
    for (std::size_t i = 0; i < query.size(); ++i) acc += query[i] * provider[i];
    return acc;
  }
  for (std::size_t i = 0; i < query.size(); ++i) {
    const double d = query[i] - provider[i];
    acc += d * d;
  }
  return -std::sqrt(acc);
}

inline double Reward(const Instance& instance, std::span<const double> query,
                     int provider_id) {
  if (provider_id < 0 || provider_id >= instance.num_providers()) {
    throw InputError("reward: provider id out of range");
  }
  double r = instance.reward_offset +
             RawScore(instance.reward_kind, query,
                      instance.providers[provider_id].embedding);
  if (instance.reward_floor) r = std::max(r, *instance.reward_floor);
  return r;
}

// Reward of user u's canonical query (the profile mean).
inline double MeanReward(const Instance& instance, int u, int c) {
  return Reward(instance, instance.users[u].mean, c);
}

inline double UtilityLinear(std::span<const double> rewards,
                            std::span<const double> alpha) {
  if (rewards.size() != alpha.size()) {
    throw InputError("utility_linear: " + std::to_string(rewards.size()) +
                     " rewards vs " + std::to_string(alpha.size()) + " weights");
  }
  double acc = 0.0;
  for (std::size_t t = 0; t < rewards.size(); ++t) acc += alpha[t] * rewards[t];
  return acc;
}

inline Vector DiscountWeights(double gamma, int horizon) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw InputError("discount_weights: gamma must lie in (0, 1]");
  }
  if (horizon < 1) throw InputError("discount_weights: horizon must be >= 1");
  Vector alpha(horizon);
  double w = 1.0;
  for (int t = 0; t < horizon; ++t) {
    alpha[t] = w;
    w *= gamma;
  }
  return alpha;
}

inline double UtilitySigmoid(std::span<const double> rewards, double beta,
                             double scale) {
  if (!(scale > 0.0)) throw InputError("utility_sigmoid: scale must be > 0");
  double sum = 0.0;
  for (double r : rewards) sum += r;
  return Logistic(scale * (sum + beta));
}

// Slot weights used by the additive solvers. Sigmoid instances fall back to
// cumulative reward.
inline Vector SlotWeights(const Instance& instance) {
  if (const auto* lin = std::get_if<LinearUtility>(&instance.utility)) {
    return lin->alpha;
  }
  return Vector(instance.horizon, 1.0);
}

// Utility of one realized slate. Missing slots contribute zero reward.
inline double SlateUtility(const Instance& instance,
                           std::span<const double> rewards) {
  if (const auto* sig = std::get_if<SigmoidUtility>(&instance.utility)) {
    return UtilitySigmoid(rewards, sig->beta, sig->scale);
  }
  const auto& alpha = std::get<LinearUtility>(instance.utility).alpha;
  double acc = 0.0;
  for (std::size_t t = 0; t < rewards.size() && t < alpha.size(); ++t) {
    acc += alpha[t] * rewards[t];
  }
  return acc;
}

inline void ValidateInstance(const Instance& instance) {
  const int d = instance.dimension();
  const int n_c = instance.num_providers();
  for (const auto& u : instance.users) {
    if (static_cast<int>(u.mean.size()) != d)
      throw InputError("user " + std::to_string(u.id) + ": dimension mismatch");
    if (u.variance < 0) throw InputError("user variance must be >= 0");
    if (u.activation < 0 || u.activation > 1)
      throw InputError("user activation must lie in [0, 1]");
    if (u.demand < 1) throw InputError("user demand must be >= 1");
  }
  for (const auto& c : instance.providers) {
    if (static_cast<int>(c.embedding.size()) != d)
      throw InputError("provider " + std::to_string(c.id) +
                       ": dimension mismatch");
    if (c.threshold < 0) throw InputError("provider threshold must be >= 0");
  }
  if (instance.horizon < 1) throw InputError("horizon must be >= 1");
  if (instance.slate_size < 1) throw InputError("slate size must be >= 1");
  if (n_c > 0 && instance.slate_size > n_c)
    throw InputError("slate size exceeds provider count");
  if (const auto* lin = std::get_if<LinearUtility>(&instance.utility)) {
    if (static_cast<int>(lin->alpha.size()) != instance.horizon)
      throw InputError("alpha length must equal horizon");
  } else if (!(std::get<SigmoidUtility>(instance.utility).scale > 0)) {
    throw InputError("sigmoid scale must be > 0");
  }
  if (!instance.query_weight.empty()) {
    if (static_cast<int>(instance.query_weight.size()) != instance.num_users())
      throw InputError("query weight table size mismatch");
    for (double q : instance.query_weight)
      if (!(q >= 0)) throw InputError("query weights must be >= 0");
  }
  if (!instance.engagement_weight.empty()) {
    const std::size_t expect = static_cast<std::size_t>(instance.num_users()) *
                               n_c * instance.horizon;
    if (instance.engagement_weight.size() != expect)
      throw InputError("engagement weight table size mismatch");
    for (double w : instance.engagement_weight)
      if (!(w >= 0)) throw InputError("engagement weights must be >= 0");
  }
}

// Sub-instance over the given providers (ids into `instance`), renumbered
// 0..k-1 in the given order. Slate size is clamped to the new provider count.
inline Instance RestrictProviders(const Instance& instance,
                                  std::span<const int> keep) {
  Instance sub = instance;
  sub.providers.clear();
  for (std::size_t i = 0; i < keep.size(); ++i) {
    ProviderRecord p = instance.providers[keep[i]];
    p.id = static_cast<int>(i);
    sub.providers.push_back(std::move(p));
  }
  if (!instance.engagement_weight.empty()) {
    const int n_c = instance.num_providers();
    const int k = static_cast<int>(keep.size());
    sub.engagement_weight.assign(
        static_cast<std::size_t>(instance.num_users()) * k * instance.horizon,
        0.0);
    for (int u = 0; u < instance.num_users(); ++u)
      for (int i = 0; i < k; ++i)
        for (int t = 0; t < instance.horizon; ++t)
          sub.engagement_weight[(static_cast<std::size_t>(u) * k + i) *
                                    instance.horizon + t] =
              instance.engagement_weight[(static_cast<std::size_t>(u) * n_c +
                                          keep[i]) * instance.horizon + t];
  }
  sub.slate_size = std::max(1, std::min<int>(instance.slate_size,
                                             static_cast<int>(keep.size())));
  return sub;
}

}  // namespace ecomatch

#endif  // ECOMATCH_MODEL_H_
