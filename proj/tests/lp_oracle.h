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

// Test-only brute-force LP oracle: enumerates every basic point of a small
// box-bounded LP and keeps the best feasible one.

#ifndef ECOMATCH_TESTS_LP_ORACLE_H_
#define ECOMATCH_TESTS_LP_ORACLE_H_

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "ecomatch/lp.h"

namespace ecomatch::testing_oracle {

// At most 6 variables and 6 rows, integer data, every variable boxed.
inline LinearProgram RandomBoxedLp(std::mt19937& rng) {
  std::uniform_int_distribution<int> size(1, 6);
  std::uniform_int_distribution<int> coef(-4, 4);
  std::uniform_int_distribution<int> rhs(-4, 12);
  std::uniform_int_distribution<int> width(1, 8);
  std::uniform_int_distribution<int> shift(-3, 0);
  std::uniform_int_distribution<int> kind(0, 5);
  LinearProgram lp;
  const int n = size(rng);
  const int m = size(rng);
  for (int j = 0; j < n; ++j) {
    const double lo = kind(rng) == 0 ? shift(rng) : 0.0;
    lp.AddVariable(coef(rng), lo, lo + width(rng));
  }
  for (int i = 0; i < m; ++i) {
    std::vector<Term> terms;
    for (int j = 0; j < n; ++j) {
      const int a = coef(rng);
      if (a != 0) terms.push_back({j, static_cast<double>(a)});
    }
    const int k = kind(rng);
    const RowType type = k <= 2   ? RowType::kLessEqual
                         : k <= 4 ? RowType::kGreaterEqual
                                  : RowType::kEqual;
    lp.AddRow(type, rhs(rng), std::move(terms));
  }
  return lp;
}

// Solves the dense square system in place; false when singular.
inline bool SolveSquare(std::vector<std::vector<double>> a, std::vector<double> b,
                        std::vector<double>& x) {
  const int n = static_cast<int>(b.size());
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    if (std::abs(a[p][c]) < 1e-10) return false;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  x.resize(n);
  for (int i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return true;
}

// Best objective over all vertices, or nullopt when no vertex is feasible.
inline std::optional<double> BestVertex(const LinearProgram& lp) {
  const int n = lp.num_variables();
  std::vector<std::vector<double>> planes;
  std::vector<double> level;
  for (const auto& row : lp.rows()) {
    std::vector<double> a(n, 0.0);
    for (const auto& t : row.terms) a[t.var] += t.coef;
    planes.push_back(a);
    level.push_back(row.rhs);
  }
  for (int j = 0; j < n; ++j) {
    for (double bound : {lp.lower()[j], lp.upper()[j]}) {
      std::vector<double> a(n, 0.0);
      a[j] = 1.0;
      planes.push_back(a);
      level.push_back(bound);
    }
  }
  const int k = static_cast<int>(planes.size());
  std::optional<double> best;
  std::vector<int> pick(n);
  auto feasible = [&](const std::vector<double>& x) {
    for (int j = 0; j < n; ++j)
      if (x[j] < lp.lower()[j] - 1e-9 || x[j] > lp.upper()[j] + 1e-9) return false;
    for (const auto& row : lp.rows()) {
      double ax = 0;
      for (const auto& t : row.terms) ax += t.coef * x[t.var];
      if (row.type != RowType::kGreaterEqual && ax > row.rhs + 1e-9) return false;
      if (row.type != RowType::kLessEqual && ax < row.rhs - 1e-9) return false;
    }
    return true;
  };
  // Enumerate n-subsets of the k hyperplanes.
  for (int i = 0; i < n; ++i) pick[i] = i;
  while (true) {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (int i : pick) {
      a.push_back(planes[i]);
      b.push_back(level[i]);
    }
    std::vector<double> x;
    if (SolveSquare(a, b, x) && feasible(x)) {
      double obj = 0;
      for (int j = 0; j < n; ++j) obj += lp.objective()[j] * x[j];
      if (!best || obj > *best) best = obj;
    }
    int i = n - 1;
    while (i >= 0 && pick[i] == k - n + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int r = i + 1; r < n; ++r) pick[r] = pick[r - 1] + 1;
  }
  return best;
}

}  // namespace ecomatch::testing_oracle

#endif  // ECOMATCH_TESTS_LP_ORACLE_H_
