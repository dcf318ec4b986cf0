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

#ifndef ECOMATCH_FIXTURES_H_
#define ECOMATCH_FIXTURES_H_

#include "ecomatch/model.h"

namespace ecomatch {

// Three providers and six users on a line, each provider needing two
// engagement units per epoch. Reward is 2 - |u - c|, clipped at 0.
//
// Positions: c1 = 0, c2 = 2, c3 = 4; u1 = u2 = 0, u3 = 1 - eps, u4 = 2,
// u5 = 3 - eps, u6 = 4. They are pinned down by the following facts:
//
//   * u1, u2, u4, u6 sit on a provider (reward 2) and u3, u5 are the two
//     borderline users whose best provider gives 1 + eps and whose second
//     best gives 1 - eps.
//   * Myopic serving sends u1, u2, u3 to c1, u4 and u5 to c2 and only u6 to
//     c3. Epoch one earns 2 + 2 + (1 + eps) + 2 + (1 + eps) + 2 = 10 + 2 eps
//     and c3 falls short (1 < 2) and leaves.
//   * Without c3, u6 lands on c2 at distance 2, reward 0, so every later
//     epoch earns 8 + 2 eps.
//   * Sending u3 to c2 and u5 to c3 keeps every provider at exactly two
//     units and earns 10 - 2 eps; u3 and u5 each lose 2 eps against their
//     ideal, so the max regret is 2 eps.
//   * Sending u3 to c3 instead (distance 3 + eps, reward clipped to 0) keeps
//     all three viable at 9 + eps with max regret 1 + eps.
//
// The clip is what gives u3 a reward of 0 at c3; without it that policy
// would score 8 and the clipped figures above would not hold.
inline Instance LineInstance(double eps = 0.05, bool clip = true) {
  Instance inst;
  inst.reward_kind = RewardKind::kNegativeDistance;
  inst.reward_offset = 2.0;
  if (clip) inst.reward_floor = 0.0;
  const double users[] = {0.0, 0.0, 1.0 - eps, 2.0, 3.0 - eps, 4.0};
  const double providers[] = {0.0, 2.0, 4.0};
  for (int i = 0; i < 6; ++i) inst.users.push_back({i, {users[i]}, 0.0, 1.0, 1});
  for (int i = 0; i < 3; ++i) inst.providers.push_back({i, {providers[i]}, 2.0});
  inst.horizon = 1;
  inst.slate_size = 1;
  inst.utility = LinearUtility{{1.0}};
  return inst;
}

}  // namespace ecomatch

#endif  // ECOMATCH_FIXTURES_H_
