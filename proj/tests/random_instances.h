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

#ifndef ECOMATCH_TESTS_RANDOM_INSTANCES_H_
#define ECOMATCH_TESTS_RANDOM_INSTANCES_H_

#include <random>

#include "ecomatch/model.h"

namespace ecomatch::testing_oracle {

// Nonnegative 2-d embeddings with dot-product rewards, unit demand, small
// integer thresholds.
inline Instance RandomSmallInstance(std::mt19937& rng, int n_providers,
                                    int n_users, int max_threshold = 3) {
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  std::uniform_int_distribution<int> nu(0, max_threshold);
  Instance inst;
  inst.reward_kind = RewardKind::kDotProduct;
  for (int c = 0; c < n_providers; ++c)
    inst.providers.push_back({c, {coord(rng), coord(rng)}, double(nu(rng))});
  for (int u = 0; u < n_users; ++u)
    inst.users.push_back({u, {coord(rng), coord(rng)}, 0.0, 1.0, 1});
  return inst;
}

}  // namespace ecomatch::testing_oracle

#endif  // ECOMATCH_TESTS_RANDOM_INSTANCES_H_
