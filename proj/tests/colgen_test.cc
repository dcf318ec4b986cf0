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

#include "ecomatch/colgen.h"

#include <random>
#include <sstream>

#include "ecomatch/fixtures.h"
#include "gtest/gtest.h"
#include "random_instances.h"

namespace ecomatch {
namespace {

Instance SigmoidInstance(std::mt19937& rng, int n_c, int n_u, int k) {
  Instance inst = testing_oracle::RandomSmallInstance(rng, n_c, n_u, 3);
  inst.horizon = k;
  inst.slate_size = k;
  inst.utility = SigmoidUtility{-2.0, 2.0};
  return inst;
}

TEST(StarTest, CanonicalOrderAndValue) {
  Instance f = LineInstance();
  f.horizon = 2;
  f.slate_size = 2;
  f.utility = SigmoidUtility{-2.0, 1.0};
  const Star s = MakeStar(f, 2, {2, 0});  // u3: c3 gives 0, c1 gives 1.05
  EXPECT_EQ(s.providers, (std::vector<int>{0, 2}));
  EXPECT_NEAR(s.value, Logistic(1.05 - 2.0), 1e-12);
  EXPECT_EQ(MakeStar(f, 2, {0, 2}), s);
  const auto eng = StarEngagement(f, MakeStar(f, 0, {1, 1}));
  ASSERT_EQ(eng.size(), 1u);
  EXPECT_EQ(eng[0].second, 2.0);
}

TEST(MasterTest, SingleUserSingleProvider) {
  Instance inst;
  inst.providers = {{0, {1.0}, 0.0}};
  inst.users = {{0, {0.5}, 0.0, 1.0, 1}};
  inst.utility = SigmoidUtility{0.0, 1.0};
  const Star s = MakeStar(inst, 0, {0});
  const LpSolution sol = SolveLp(BuildMaster(inst, {s}));
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.objective_value, Logistic(0.5), 1e-12);
  EXPECT_NEAR(sol.primal.back(), 1.0, 1e-12);
}

TEST(MasterTest, ObjectiveGrowsWithPool) {
  std::mt19937 rng(2);
  const Instance inst = SigmoidInstance(rng, 4, 5, 2);
  std::vector<Star> all = AllStars(inst, 2, std::vector<char>(4, 1));
  std::shuffle(all.begin(), all.end(), rng);
  std::vector<Star> pool;
  double prev = -kInfinity;
  for (const auto& s : all) {
    pool.push_back(s);
    const LpSolution sol = SolveLp(BuildMaster(inst, pool));
    ASSERT_TRUE(sol.optimal());
    EXPECT_GE(sol.objective_value, prev - 1e-9);
    prev = sol.objective_value;
  }
}

TEST(PricingTest, ZeroDualsPickBestValue) {
  std::mt19937 rng(6);
  const Instance inst = SigmoidInstance(rng, 5, 6, 2);
  DualPrices zero{Vector(6, 0.0), Vector(30, 0.0), Vector(5, 0.0)};
  const PricedStar p = PriceStar(inst, zero, 2);
  double best = -kInfinity;
  for (const auto& s : AllStars(inst, 2, std::vector<char>(5, 1)))
    best = std::max(best, s.value);
  EXPECT_DOUBLE_EQ(p.reduced_cost, best);
  EXPECT_DOUBLE_EQ(p.star.value, best);
}

TEST(PricingTest, FullMasterHasNoImprovingColumn) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const Instance inst = SigmoidInstance(rng, 5, 6, 2);
    StarMaster m = StarMaster::Relaxed(inst);
    for (const auto& s : AllStars(inst, 2, m.allowed())) m.AddStar(s);
    const LpSolution sol = SolveLp(m.lp());
    ASSERT_TRUE(sol.optimal());
    EXPECT_LE(PriceStar(inst, m.Duals(sol), 2).reduced_cost, 1e-6);
  }
}

TEST(PricingTest, DecomposesByUser) {
  std::mt19937 rng(13);
  const Instance inst = SigmoidInstance(rng, 5, 6, 2);
  StarMaster m = StarMaster::Relaxed(inst);
  for (int u = 0; u < 6; ++u) m.AddStar(MakeStar(inst, u, {u % 5, u % 5}));
  const DualPrices d = m.Duals(SolveLp(m.lp()));
  double joint = -kInfinity;
  for (const auto& s : AllStars(inst, 2, m.allowed()))
    joint = std::max(joint, ReducedCost(inst, d, s));
  double per_user = -kInfinity;
  for (int u = 0; u < 6; ++u)
    per_user = std::max(per_user, PriceUserExact(inst, d, u, 2, m.allowed()).reduced_cost);
  EXPECT_DOUBLE_EQ(joint, per_user);
  EXPECT_DOUBLE_EQ(joint, PriceStar(inst, d, 2).reduced_cost);
}

TEST(PricingTest, LinearizedWithinErrorBound) {
  std::mt19937 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const Instance inst = SigmoidInstance(rng, 5, 6, 2);
    StarMaster m = StarMaster::Relaxed(inst);
    for (int u = 0; u < 6; ++u) m.AddStar(MakeStar(inst, u, {(u + trial) % 5, u % 5}));
    const DualPrices d = m.Duals(SolveLp(m.lp()));
    for (int u = 0; u < 6; ++u) {
      const PricedStar e = PriceUserExact(inst, d, u, 2, m.allowed());
      const LinearizedPrice l = PriceUserLinearized(inst, d, u, 2, m.allowed());
      EXPECT_LE(std::abs(e.reduced_cost - l.approx_reduced_cost), l.error_bound + 1e-12);
      EXPECT_LE(e.reduced_cost - l.reduced_cost, 2 * l.error_bound + 1e-12);
      EXPECT_GT(l.error_bound, 0.0);
    }
  }
}

TEST(PricingTest, LinearizedNeedsSigmoid) {
  const Instance f = LineInstance();
  DualPrices d{Vector(6, 0.0), Vector(18, 0.0), Vector(3, 0.0)};
  EXPECT_THROW(PriceUserLinearized(f, d, 0, 1, std::vector<char>(3, 1)), InputError);
}

TEST(PricingTest, EnumerationBudget) {
  std::mt19937 rng(1);
  Instance inst = SigmoidInstance(rng, 20, 2, 3);
  DualPrices d{Vector(2, 0.0), Vector(40, 0.0), Vector(20, 0.0)};
  EXPECT_THROW(PriceUserExact(inst, d, 0, 3, std::vector<char>(20, 1), 1000), InputError);
}

TEST(ColumnGenerationTest, MatchesOracle) {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = SigmoidInstance(rng, 5, 6, 2);
    const StarOracleResult oracle = EnumerateStarsExact(inst, 2);
    const ColGenResult r = ColumnGeneration(inst, {.k = 2});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.policy.welfare, oracle.value, 1e-4) << "trial " << trial;
    EXPECT_EQ(CheckPolicy(inst, r.policy, 1e-7, false), "");
    EXPECT_EQ(CheckPolicy(inst, oracle.policy, 1e-7, false), "");
    for (std::size_t i = 1; i < r.log.size(); ++i)
      if (r.log[i].phase == r.log[i - 1].phase)
        EXPECT_GE(r.log[i].master_objective, r.log[i - 1].master_objective - 1e-9);
  }
}

TEST(ColumnGenerationTest, RelaxedValueMatchesFullStarLp) {
  std::mt19937 rng(22);
  const double tol = 1e-7;
  for (int trial = 0; trial < 5; ++trial) {
    const Instance inst = SigmoidInstance(rng, 5, 6, 2);
    const LpSolution full =
        SolveLp(BuildMaster(inst, AllStars(inst, 2, std::vector<char>(5, 1))));
    const ColGenResult r = ColumnGeneration(inst, {.k = 2, .tol = tol});
    EXPECT_GE(r.relaxed_objective, full.objective_value - 6 * tol);
    EXPECT_LE(r.relaxed_objective, full.objective_value + 1e-9);
  }
}

TEST(ColumnGenerationTest, LinearizedPathStaysFeasible) {
  std::mt19937 rng(23);
  const Instance inst = SigmoidInstance(rng, 5, 6, 2);
  const StarOracleResult oracle = EnumerateStarsExact(inst, 2);
  const ColGenResult r = ColumnGeneration(inst, {.k = 2, .linearized = true});
  EXPECT_EQ(CheckPolicy(inst, r.policy, 1e-7, false), "");
  EXPECT_LE(r.policy.welfare, oracle.value + 1e-7);
}

TEST(ColumnGenerationTest, SingleIterationIsFeasibleAndBounded) {
  std::mt19937 rng(24);
  for (int trial = 0; trial < 5; ++trial) {
    const Instance inst = SigmoidInstance(rng, 5, 6, 2);
    const StarOracleResult oracle = EnumerateStarsExact(inst, 2);
    const ColGenResult r = ColumnGeneration(inst, {.k = 2, .max_iter = 1});
    EXPECT_EQ(CheckPolicy(inst, r.policy, 1e-7, false), "");
    EXPECT_LE(r.policy.welfare, oracle.value + 1e-7);
  }
}

TEST(ColumnGenerationTest, AdditiveSingleSlotAgreesWithLpRs) {
  std::mt19937 rng(25);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = testing_oracle::RandomSmallInstance(rng, 5, 8, 3);
    EXPECT_EQ(ColumnGeneration(inst).policy.viable_set, LpRs(inst).viable_set);
  }
}

TEST(ColumnGenerationTest, GoldenSigmoid) {
  Instance f = LineInstance();
  f.utility = SigmoidUtility{-2.0, 1.0};
  const StarOracleResult oracle = EnumerateStarsExact(f, 1);
  const ColGenResult r = ColumnGeneration(f);
  EXPECT_NEAR(r.policy.welfare, oracle.value, 1e-4);
  EXPECT_EQ(r.policy.viable_set, oracle.viable_set);
}

TEST(ColumnGenerationTest, RejectsBadArguments) {
  const Instance f = LineInstance();
  EXPECT_THROW(ColumnGeneration(f, {.k = 2}), InputError);
  EXPECT_THROW(ColumnGeneration(f, {.tol = 0.0}), InputError);
  EXPECT_THROW(ColumnGeneration(f, {.max_iter = 0}), InputError);
}

TEST(ColumnGenerationTest, LogCsv) {
  const ColGenResult r = ColumnGeneration(LineInstance());
  std::ostringstream out;
  WriteColGenLog(r.log, out);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "iteration,phase,master_objective,max_reduced_cost,columns_added");
  EXPECT_NE(text.find("1,relaxed,"), std::string::npos);
}

TEST(StarOracleTest, SingleProvider) {
  Instance inst;
  inst.providers = {{0, {1.0, 0.0}, 3.0}};
  inst.users = {{0, {1.0, 0.0}, 0, 1, 1}, {1, {0.5, 0.5}, 0, 1, 1}};
  inst.horizon = 2;
  inst.slate_size = 1;
  inst.utility = SigmoidUtility{-1.0, 1.0};
  const StarOracleResult r = EnumerateStarsExact(inst, 2);
  EXPECT_EQ(r.viable_set, (std::vector<int>{0}));
  for (int u = 0; u < 2; ++u) EXPECT_NEAR(r.policy.Pi(u, 0, 0), 1.0, 1e-9);
  EXPECT_NEAR(r.value, Logistic(1.0) + Logistic(0.0), 1e-9);
}

TEST(StarOracleTest, CapRefusal) {
  std::mt19937 rng(1);
  const Instance inst = SigmoidInstance(rng, 20, 10, 3);
  EXPECT_THROW(EnumerateStarsExact(inst, 3), InputError);
}

}  // namespace
}  // namespace ecomatch
