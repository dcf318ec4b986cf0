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

#include "ecomatch/lp.h"

#include <cmath>
#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "lp_oracle.h"

namespace ecomatch {
namespace {

TEST(SolveLpTest, SimplexFaceOptimum) {
  LinearProgram lp;
  const int x1 = lp.AddVariable(1.0);
  const int x2 = lp.AddVariable(1.0);
  lp.AddRow(RowType::kLessEqual, 1.0, {{x1, 1.0}, {x2, 1.0}});
  const LpSolution sol = SolveLp(lp);
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.objective_value, 1.0, 1e-12);
  EXPECT_NEAR(sol.primal[x1] + sol.primal[x2], 1.0, 1e-12);
  EXPECT_TRUE(VerifySolution(lp, sol).Within(1e-9));
}

TEST(SolveLpTest, ContradictoryBoundsAreInfeasible) {
  LinearProgram lp;
  const int x = lp.AddVariable(1.0);
  lp.AddRow(RowType::kGreaterEqual, 2.0, {{x, 1.0}});
  lp.AddRow(RowType::kLessEqual, 1.0, {{x, 1.0}});
  EXPECT_EQ(SolveLp(lp).status, LpStatus::kInfeasible);
}

TEST(SolveLpTest, DetectsUnboundedRay) {
  LinearProgram lp;
  const int x = lp.AddVariable(1.0);
  const int y = lp.AddVariable(0.0);
  lp.AddRow(RowType::kLessEqual, 1.0, {{x, 1.0}, {y, -1.0}});
  EXPECT_EQ(SolveLp(lp).status, LpStatus::kUnbounded);
}

TEST(SolveLpTest, FreeVariableAndEqualityRow) {
  // max -z  s.t. z - x = -3, x in [0, 2], z free  ->  z = x - 3, best x = 0.
  LinearProgram lp;
  const int x = lp.AddVariable(0.0, 0.0, 2.0);
  const int z = lp.AddVariable(-1.0, -kInfinity, kInfinity);
  lp.AddRow(RowType::kEqual, -3.0, {{z, 1.0}, {x, -1.0}});
  const LpSolution sol = SolveLp(lp);
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.primal[z], -3.0, 1e-12);
  EXPECT_NEAR(sol.objective_value, 3.0, 1e-12);
  EXPECT_TRUE(VerifySolution(lp, sol).Within(1e-9));
}

TEST(SolveLpTest, RejectsNonFiniteData) {
  LinearProgram lp;
  const int x = lp.AddVariable(std::nan(""));
  lp.AddRow(RowType::kLessEqual, 1.0, {{x, 1.0}});
  EXPECT_THROW(SolveLp(lp), InputError);
}

TEST(SolveLpTest, IterationCapReportsNumericalFailure) {
  LinearProgram lp;
  std::vector<Term> terms;
  for (int j = 0; j < 5; ++j) terms.push_back({lp.AddVariable(1.0 + j), 1.0});
  lp.AddRow(RowType::kLessEqual, 1.0, terms);
  lp.AddRow(RowType::kGreaterEqual, 0.5, terms);
  SimplexOptions opt;
  opt.max_pivots = 1;
  EXPECT_EQ(SolveLp(lp, opt).status, LpStatus::kNumericalFailure);
}

// Objective scaling leaves the selected vertex unchanged.
TEST(SolveLpTest, ObjectiveScalingKeepsVertex) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    LinearProgram lp = testing_oracle::RandomBoxedLp(rng);
    const LpSolution base = SolveLp(lp);
    if (!base.optimal()) continue;
    for (double lambda : {0.5, 3.0, 8.0}) {
      LinearProgram scaled = lp;
      for (int j = 0; j < lp.num_variables(); ++j)
        scaled.SetObjective(j, lambda * lp.objective()[j]);
      const LpSolution s = SolveLp(scaled);
      ASSERT_TRUE(s.optimal());
      EXPECT_NEAR(s.objective_value, lambda * base.objective_value,
                  1e-9 * (1 + std::abs(s.objective_value)));
      for (int j = 0; j < lp.num_variables(); ++j)
        EXPECT_NEAR(s.primal[j], base.primal[j], 1e-9);
    }
  }
}

TEST(SolveLpTest, RandomLpsMatchVertexEnumeration) {
  std::mt19937 rng(20240611);
  int optimal = 0;
  int infeasible = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const LinearProgram lp = testing_oracle::RandomBoxedLp(rng);
    const auto oracle = testing_oracle::BestVertex(lp);
    const LpSolution sol = SolveLp(lp);
    if (!oracle) {
      EXPECT_EQ(sol.status, LpStatus::kInfeasible) << "trial " << trial;
      ++infeasible;
      continue;
    }
    ASSERT_TRUE(sol.optimal()) << "trial " << trial;
    EXPECT_NEAR(sol.objective_value, *oracle, 1e-6) << "trial " << trial;
    const ResidualReport rep = VerifySolution(lp, sol);
    EXPECT_TRUE(rep.Within(1e-6))
        << "trial " << trial << " primal " << rep.max_primal_residual
        << " dual " << rep.max_dual_residual << " gap " << rep.duality_gap;
    ++optimal;
  }
  EXPECT_GT(optimal, 100);
  EXPECT_GT(infeasible, 0);
}

TEST(VerifySolutionTest, HandBuiltKktPointHasZeroGap) {
  // max 3x + 2y  s.t. x + y <= 4, x + 3y <= 7, x <= 3.
  // Optimum (3, 1) with duals (2, 0) and reduced cost 1 on x at its bound.
  LinearProgram lp;
  const int x = lp.AddVariable(3.0, 0.0, 3.0);
  const int y = lp.AddVariable(2.0);
  lp.AddRow(RowType::kLessEqual, 4.0, {{x, 1.0}, {y, 1.0}});
  lp.AddRow(RowType::kLessEqual, 7.0, {{x, 1.0}, {y, 3.0}});
  LpSolution kkt;
  kkt.status = LpStatus::kOptimal;
  kkt.primal = {3.0, 1.0};
  kkt.dual = {2.0, 0.0};
  kkt.objective_value = 11.0;
  const ResidualReport rep = VerifySolution(lp, kkt);
  EXPECT_EQ(rep.duality_gap, 0.0);
  EXPECT_EQ(rep.max_primal_residual, 0.0);
  EXPECT_EQ(rep.max_dual_residual, 0.0);

  const LpSolution sol = SolveLp(lp);
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.objective_value, 11.0, 1e-12);
  EXPECT_NEAR(sol.dual[0], 2.0, 1e-12);
}

TEST(VerifySolutionTest, FlagsPerturbedPrimal) {
  LinearProgram lp;
  const int x = lp.AddVariable(1.0);
  const int y = lp.AddVariable(1.0);
  lp.AddRow(RowType::kLessEqual, 1.0, {{x, 1.0}, {y, 1.0}});
  LpSolution sol = SolveLp(lp);
  ASSERT_TRUE(sol.optimal());
  sol.primal[x] += 1e-3;
  EXPECT_GT(VerifySolution(lp, sol).max_primal_residual, 1e-4);
}

TEST(LazyRowsTest, MatchesFullModel) {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const LinearProgram full = testing_oracle::RandomBoxedLp(rng);
    const LpSolution expect = SolveLp(full);
    LinearProgram base;
    for (int j = 0; j < full.num_variables(); ++j)
      base.AddVariable(full.objective()[j], full.lower()[j], full.upper()[j]);
    auto separate = [&](const LpSolution& s) {
      std::vector<LpRow> out;
      for (const auto& row : full.rows()) {
        double ax = 0;
        for (const auto& t : row.terms) ax += t.coef * s.primal[t.var];
        const bool bad =
            (row.type != RowType::kGreaterEqual && ax > row.rhs + 1e-9) ||
            (row.type != RowType::kLessEqual && ax < row.rhs - 1e-9);
        if (bad) out.push_back(row);
      }
      return out;
    };
    const LpSolution got = SolveWithLazyRows(base, separate);
    ASSERT_EQ(got.status, expect.status) << "trial " << trial;
    if (got.optimal())
      EXPECT_NEAR(got.objective_value, expect.objective_value, 1e-7);
  }
}

TEST(LpDumpTest, RoundTripPreservesModel) {
  std::mt19937 rng(3);
  LinearProgram lp = testing_oracle::RandomBoxedLp(rng);
  lp.AddVariable(0.25, -kInfinity, kInfinity);
  std::stringstream buf;
  WriteLpDump(lp, buf);
  const LinearProgram back = ReadLpDump(buf);
  std::stringstream again;
  WriteLpDump(back, again);
  std::stringstream first;
  WriteLpDump(lp, first);
  EXPECT_EQ(first.str(), again.str());
}

TEST(LpDumpTest, RejectsBadRelation) {
  std::stringstream buf("ecomatch-lp 1\nvariables 1\n1 0 inf\nrows 1\nlt 1 1 0:1\n");
  EXPECT_THROW(ReadLpDump(buf), InputError);
}

}  // namespace
}  // namespace ecomatch
