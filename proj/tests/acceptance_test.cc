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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ecomatch/cli.h"
#include "ecomatch/colgen.h"
#include "ecomatch/ecosim.h"
#include "ecomatch/fixtures.h"
#include "ecomatch/lp.h"
#include "ecomatch/matching.h"
#include "ecomatch/synthetic.h"
#include "lp_oracle.h"
#include "random_instances.h"
#include "stats_oracle.h"

namespace ecomatch {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string Printf(const char* fmt, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c, d);
  return buf;
}

Outcome Golden() {
  const auto t0 = Clock::now();
  Outcome o;
  for (const GoldenCheck& c : GoldenSuite()) {
    o.pass = o.pass && c.pass();
    o.detail += c.name + "=" + Fmt(c.value) + " ";
  }
  const double sec = std::chrono::duration<double>(Clock::now() - t0).count();
  o.pass = o.pass && sec < 1.0;
  o.detail += Printf("(%.3fs)", sec);
  return o;
}

Outcome Equilibria() {
  const Instance inst = LineInstance();
  const std::vector<int> all = {0, 1, 2}, two = {0, 1};
  const Trajectory lp = RunSimulation(inst, {.kind = PolicyKind::kLpRs}, 20, 0);
  const Trajectory my = RunSimulation(inst, {.kind = PolicyKind::kMyopic}, 20, 0);
  Outcome o;
  int lp_bad = 0, my_bad = 0;
  // epochs[k].viable_set is the set entering epoch k + 2.
  for (const auto& m : lp.epochs) lp_bad += m.viable_set != all;
  for (const auto& m : my.epochs) my_bad += m.viable_set != two;
  o.pass = lp.epochs.size() == 20 && lp_bad == 0 && my_bad == 0;
  o.detail = Printf("lp-rs epochs off {0,1,2}: %g, myopic epochs off {0,1}: %g", lp_bad, my_bad);
  return o;
}

struct CellMeans {
  double welfare = 0, viable = 0;
};

CellMeans DeskCell(SyntheticVariant variant, PolicyKind kind) {
  CellMeans m;
  const std::vector<std::uint64_t> seeds = {0, 1, 2};
  for (std::uint64_t seed : seeds) {
    const Instance inst = GenSynthetic(DeskParams(variant, seed));
    const Trajectory tr = RunSimulation(inst, {.kind = kind}, 10, seed);
    double w = 0;
    for (const auto& e : tr.epochs) w += e.avg_user_utility;
    m.welfare += w / tr.epochs.size() / seeds.size();
    m.viable += tr.epochs.back().viable_count / double(seeds.size());
  }
  return m;
}

Outcome DeskDirection() {
  const auto t0 = Clock::now();
  Outcome o;
  for (SyntheticVariant v : {SyntheticVariant::kUniform, SyntheticVariant::kSkewed}) {
    const CellMeans my = DeskCell(v, PolicyKind::kMyopic);
    const CellMeans lp = DeskCell(v, PolicyKind::kLpRs);
    o.pass = o.pass && lp.welfare > my.welfare && lp.viable > my.viable;
    o.detail += std::string(VariantName(v)) +
                Printf(": welfare lp-rs %.4f vs myopic %.4f, viable %.2f vs %.2f; ", lp.welfare,
                       my.welfare, lp.viable, my.viable);
  }
  const double sec = std::chrono::duration<double>(Clock::now() - t0).count();
  o.pass = o.pass && sec < 120.0;
  o.detail += Printf("(%.1fs)", sec);
  return o;
}

Outcome GammaSweep() {
  const auto t0 = Clock::now();
  const std::vector<double> gammas = {0.1, 0.35, 0.67, 1.0};
  std::vector<double> ratio, viable;
  Outcome o;
  for (double g : gammas) {
    double w = 0, mr = 0, v = 0;
    for (std::uint64_t seed : {0, 1, 2}) {
      const Instance inst = GenSynthetic(DeskSweepParams(g, seed));
      const Trajectory tr = RunSimulation(inst, {.kind = PolicyKind::kLpRs}, 10, seed);
      w += tr.epochs.back().avg_user_utility;
      mr += tr.epochs.back().max_regret;
      v += tr.epochs.back().viable_count / 3.0;
    }
    ratio.push_back(mr / w);
    viable.push_back(v);
    o.detail += Printf("g=%.2f ratio %.4f viable %.2f; ", g, mr / w, v);
  }
  const double rho = testing_oracle::Spearman(gammas, ratio);
  int inversions = 0;
  for (std::size_t i = 1; i < viable.size(); ++i) inversions += viable[i] > viable[i - 1] + 1e-9;
  const double sec = std::chrono::duration<double>(Clock::now() - t0).count();
  o.pass = rho > 0 && inversions <= 1 && sec < 300.0;
  o.detail += Printf("spearman %.3f, viable inversions %g (%.1fs)", rho, inversions, sec);
  return o;
}

Outcome Submodularity() {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> np(1, 6), nu(1, 12);
  long checked = 0, violations = 0;
  double worst = -kInfinity;
  for (int trial = 0; trial < 200; ++trial) {
    const Instance inst = testing_oracle::RandomSmallInstance(rng, np(rng), nu(rng));
    const int n = inst.num_providers();
    std::vector<double> g(1 << n);
    for (int m = 0; m < (1 << n); ++m) {
      std::vector<int> s;
      for (int c = 0; c < n; ++c)
        if (m >> c & 1) s.push_back(c);
      g[m] = Csw(inst, s).value;
    }
    for (int m = 0; m < (1 << n); ++m)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          if (a == b || (m >> a & 1) || (m >> b & 1)) continue;
          const int ma = m | 1 << a, mb = m | 1 << b, mab = ma | 1 << b;
          if (g[m] == -kInfinity || g[ma] == -kInfinity || g[mb] == -kInfinity ||
              g[mab] == -kInfinity)
            continue;
          const double excess = (g[mab] - g[mb]) - (g[ma] - g[m]);
          worst = std::max(worst, excess);
          violations += excess > 1e-6;
          ++checked;
        }
  }
  Outcome o;
  o.pass = violations == 0 && checked > 0;
  o.detail = Printf("%g feasible quadruples, %g violations, max excess %.2e", checked, violations,
                    worst);
  return o;
}

Outcome Approximation() {
  std::mt19937 rng(6);
  std::uniform_int_distribution<int> np(2, 10), nu(4, 14);
  double min_ratio = kInfinity;
  int counted = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Instance inst = testing_oracle::RandomSmallInstance(rng, np(rng), nu(rng), 5);
    const double exact = ExactEnumeration(inst).welfare;
    const double greedy = GreedyProviders(inst).welfare;
    if (exact <= 0) continue;
    min_ratio = std::min(min_ratio, greedy / exact);
    ++counted;
  }
  Outcome o;
  o.pass = counted > 0 && min_ratio >= 1.0 / std::exp(1.0);
  o.detail = Printf("min greedy/exact ratio %.6f over %g instances (bound %.6f)", min_ratio,
                    counted, 1.0 / std::exp(1.0));
  return o;
}

Outcome ColGenOracle() {
  const auto t0 = Clock::now();
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> nu(2, 6);
  double worst = 0;
  int monotone_breaks = 0, unconverged = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Instance inst = testing_oracle::RandomSmallInstance(rng, 5, nu(rng), 3);
    inst.horizon = inst.slate_size = 2;
    inst.utility = SigmoidUtility{-2.0, 2.0};
    const StarOracleResult oracle = EnumerateStarsExact(inst, 2);
    const ColGenResult r = ColumnGeneration(inst, {.k = 2});
    worst = std::max(worst, std::abs(r.policy.welfare - oracle.value));
    unconverged += !r.converged;
    for (std::size_t i = 1; i < r.log.size(); ++i)
      if (r.log[i].phase == r.log[i - 1].phase &&
          r.log[i].master_objective < r.log[i - 1].master_objective - 1e-9)
        ++monotone_breaks;
  }
  const double sec = std::chrono::duration<double>(Clock::now() - t0).count();
  Outcome o;
  o.pass = worst <= 1e-4 && monotone_breaks == 0 && unconverged == 0 && sec < 60.0;
  o.detail = Printf("max |colgen - oracle| %.2e, master decreases %g, unconverged %g (%.2fs)",
                    worst, monotone_breaks, unconverged, sec);
  return o;
}

Outcome StochasticVsMyopic() {
  // Equilibrium welfare: mean social welfare over the last five of 20 epochs.
  auto eq = [](PolicyKind kind) {
    double total = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Instance inst = GenSynthetic(DeskParams(SyntheticVariant::kSkewed, seed));
      const Trajectory tr = RunSimulation(inst, {.kind = kind}, 20, seed);
      for (int k = 15; k < 20; ++k) total += tr.epochs[k].social_welfare / 25.0;
    }
    return total;
  };
  const double stoch = eq(PolicyKind::kStochastic), my = eq(PolicyKind::kMyopic);
  Outcome o;
  o.pass = stoch <= my;
  o.detail = Printf("stochastic %.4f vs myopic %.4f", stoch, my);
  return o;
}

Outcome LpCore() {
  std::mt19937 rng(20240611);
  int mismatches = 0, kkt_failures = 0, optimal = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const LinearProgram lp = testing_oracle::RandomBoxedLp(rng);
    const auto oracle = testing_oracle::BestVertex(lp);
    const LpSolution sol = SolveLp(lp);
    if (!oracle) {
      mismatches += sol.status != LpStatus::kInfeasible;
      continue;
    }
    if (!sol.optimal() || std::abs(sol.objective_value - *oracle) > 1e-6) {
      ++mismatches;
      continue;
    }
    ++optimal;
    kkt_failures += !VerifySolution(lp, sol).Within(1e-6);
  }
  std::mt19937 rng2(9);
  int fractional = 0, tu_solved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Instance inst = testing_oracle::RandomSmallInstance(rng2, 5, 10);
    const CswResult r = Csw(inst, std::vector<int>{0, 1, 2, 3, 4});
    if (r.value == -kInfinity) continue;
    ++tu_solved;
    for (double x : r.policy.pi)
      if (std::abs(x - std::round(x)) > 1e-7) {
        ++fractional;
        break;
      }
  }
  Outcome o;
  o.pass = mismatches == 0 && kkt_failures == 0 && fractional == 0 && tu_solved > 0;
  o.detail = Printf("oracle mismatches %g/500, verify failures %g/%g, fractional matchings %g",
                    mismatches, kkt_failures, optimal, fractional) +
             Printf(" of %g", tu_solved);
  return o;
}

Outcome RegretSweep() {
  const Instance inst = LineInstance();
  double prev_mr = kInfinity, prev_w = kInfinity;
  Outcome o;
  for (double lambda : {0.0, 1.0, 10.0, 100.0}) {
    const MatchingPolicy p = LpRs(inst, {.lambda = lambda});
    const double mr = MakeRegretReport(inst, p).max_regret;
    o.pass = o.pass && mr <= prev_mr + 1e-9 && p.welfare <= prev_w + 1e-9;
    if (lambda > 0) o.pass = o.pass && std::abs(p.max_regret_bound - mr) <= 1e-6;
    o.detail += Printf("l=%g welfare %.6f mr %.6f; ", lambda, p.welfare, mr);
    prev_mr = mr;
    prev_w = p.welfare;
  }
  return o;
}

}  // namespace
}  // namespace ecomatch

int main() {
  using namespace ecomatch;
  const std::vector<std::function<Outcome()>> criteria = {
      Golden,        Equilibria,   DeskDirection,      GammaSweep, Submodularity,
      Approximation, ColGenOracle, StochasticVsMyopic, LpCore,     RegretSweep};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %zu: %s\n", o.pass ? "PASS" : "FAIL", i + 1, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
