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
//  Mixture-of-Gaussians instances in a small topic space.
//
//  Providers are drawn from N(0, spread I). Every user picks one provider as
//  its component and draws its embedding from N(center, v I). In the skewed
//  variant components near the origin are more likely and their users have
//  a larger v; far components get few, tightly packed users.
//

#ifndef ECOMATCH_SYNTHETIC_H_
#define ECOMATCH_SYNTHETIC_H_

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ecomatch/model.h"

namespace ecomatch {

enum class SyntheticVariant { kUniform, kSkewed };

inline const char* VariantName(SyntheticVariant v) {
  return v == SyntheticVariant::kUniform ? "uniform" : "skewed";
}

inline SyntheticVariant ParseVariant(const std::string& name) {
  if (name == "uniform") return SyntheticVariant::kUniform;
  if (name == "skewed") return SyntheticVariant::kSkewed;
  throw InputError("unknown variant '" + name + "'");
}

struct SyntheticParams {
  int n_providers = 20;
  int n_users = 400;
  int dim = 2;
  SyntheticVariant variant = SyntheticVariant::kSkewed;
  double provider_spread = 5.0;  // variance of provider coordinates
  double user_variance = 0.1;    // mean per-coordinate variance of users
  double skew = 1.5;             // popularity decay per provider std dev
  double query_noise = 0.0;      // per-query variance, relative to v
  double nu = 15.0;
  double reward_offset = 0.0;
  int slate_size = 1;
  double gamma = 1.0;
  std::uint64_t seed = 0;
};

inline void ValidateSyntheticParams(const SyntheticParams& p) {
  if (p.n_providers < 1 || p.n_users < 1 || p.dim < 1)
    throw InputError("synthetic: counts must be >= 1");
  if (!(p.provider_spread > 0)) throw InputError("synthetic: spread must be > 0");
  if (!(p.user_variance >= 0)) throw InputError("synthetic: user variance must be >= 0");
  if (!(p.skew >= 0)) throw InputError("synthetic: skew must be >= 0");
  if (!(p.query_noise >= 0)) throw InputError("synthetic: query noise must be >= 0");
  if (!(p.nu >= 0)) throw InputError("synthetic: nu must be >= 0");
  if (p.slate_size < 1 || p.slate_size > p.n_providers)
    throw InputError("synthetic: slate size must lie in [1, providers]");
  if (!(p.gamma > 0 && p.gamma <= 1)) throw InputError("synthetic: gamma must lie in (0, 1]");
}

struct SyntheticData {
  Instance instance;
  std::vector<int> component;  // per user
  Vector prior;                // per provider
  Vector variance;             // per provider
};

inline SyntheticData GenSyntheticData(const SyntheticParams& p) {
  ValidateSyntheticParams(p);
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SyntheticData out;
  Instance& inst = out.instance;
  inst.reward_kind = RewardKind::kNegativeDistance;
  inst.reward_offset = p.reward_offset;
  inst.horizon = p.slate_size;
  inst.slate_size = p.slate_size;
  inst.utility = LinearUtility{DiscountWeights(p.gamma, p.slate_size)};

  const double sd = std::sqrt(p.provider_spread);
  Vector dist(p.n_providers);
  for (int c = 0; c < p.n_providers; ++c) {
    Vector e(p.dim);
    double sq = 0.0;
    for (double& x : e) {
      x = sd * gauss(rng);
      sq += x * x;
    }
    dist[c] = std::sqrt(sq);
    inst.providers.push_back({c, std::move(e), p.nu});
  }

  out.prior.assign(p.n_providers, 1.0 / p.n_providers);
  out.variance.assign(p.n_providers, p.user_variance);
  if (p.variant == SyntheticVariant::kSkewed) {
    double total = 0.0;
    for (int c = 0; c < p.n_providers; ++c)
      total += out.prior[c] = std::exp(-p.skew * dist[c] / sd);
    for (double& w : out.prior) w /= total;
    // Popular components get proportionally wider user clouds.
    for (int c = 0; c < p.n_providers; ++c)
      out.variance[c] = p.user_variance * out.prior[c] * p.n_providers;
  }

  std::discrete_distribution<int> pick(out.prior.begin(), out.prior.end());
  for (int u = 0; u < p.n_users; ++u) {
    const int c = pick(rng);
    const double v = out.variance[c];
    Vector mean = inst.providers[c].embedding;
    for (double& x : mean) x += std::sqrt(v) * gauss(rng);
    inst.users.push_back({u, std::move(mean), p.query_noise * v, 1.0, 1});
    out.component.push_back(c);
  }
  return out;
}

inline Instance GenSynthetic(const SyntheticParams& p) {
  return GenSyntheticData(p).instance;
}

// Desk-scale defaults: 20 providers, 400 users, one slot, nu at three
// quarters of the mean provider load.
inline SyntheticParams DeskParams(SyntheticVariant variant, std::uint64_t seed) {
  SyntheticParams p;
  p.variant = variant;
  p.seed = seed;
  return p;
}

// Two-slot skewed instance for discount sweeps. Half the users keep the
// per-provider load of the one-slot desk; the offset keeps welfare positive.
inline SyntheticParams DeskSweepParams(double gamma, std::uint64_t seed) {
  SyntheticParams p = DeskParams(SyntheticVariant::kSkewed, seed);
  p.n_users = 200;
  p.slate_size = 2;
  p.gamma = gamma;
  p.reward_offset = 10.0;
  return p;
}

}  // namespace ecomatch

#endif  // ECOMATCH_SYNTHETIC_H_
