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
//  Linear programming: a bounded-variable revised primal simplex with an
//  explicit dense basis inverse, plus a KKT residual checker.
//
//  Problems are stated as
//      maximize    c^T x
//      subject to  a_i^T x  {<=, >=, =}  b_i      for every row i
//                  l_j <= x_j <= u_j              (l_j, u_j may be infinite)
//
//  Row duals follow the usual convention for a maximization: y_i >= 0 on
//  <= rows, y_i <= 0 on >= rows, free on equality rows, and the reduced cost
//  of x_j is c_j - a_j^T y.
//

#ifndef ECOMATCH_LP_H_
#define ECOMATCH_LP_H_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ecomatch/model.h"

namespace ecomatch {

enum class RowType { kLessEqual, kGreaterEqual, kEqual };

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kNumericalFailure };

inline const char* LpStatusName(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

struct Term {
  int var;
  double coef;
};

struct LpRow {
  RowType type = RowType::kLessEqual;
  double rhs = 0.0;
  std::vector<Term> terms;
};

class LinearProgram {
 public:
  int AddVariable(double objective, double lower = 0.0,
                  double upper = kInfinity) {
    objective_.push_back(objective);
    lower_.push_back(lower);
    upper_.push_back(upper);
    return static_cast<int>(objective_.size()) - 1;
  }

  int AddRow(RowType type, double rhs, std::vector<Term> terms) {
    rows_.push_back(LpRow{type, rhs, std::move(terms)});
    return static_cast<int>(rows_.size()) - 1;
  }
  int AddRow(LpRow row) {
    rows_.push_back(std::move(row));
    return static_cast<int>(rows_.size()) - 1;
  }

  // New variable with coefficients in existing rows; entries are (row, coef).
  int AddColumn(double objective, double lower, double upper,
                const std::vector<std::pair<int, double>>& entries) {
    const int j = AddVariable(objective, lower, upper);
    for (const auto& [row, coef] : entries) rows_[row].terms.push_back({j, coef});
    return j;
  }

  void SetObjective(int var, double c) { objective_[var] = c; }
  void SetBounds(int var, double lower, double upper) {
    lower_[var] = lower;
    upper_[var] = upper;
  }

  int num_variables() const { return static_cast<int>(objective_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  const Vector& objective() const { return objective_; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  const std::vector<LpRow>& rows() const { return rows_; }
  const LpRow& row(int i) const { return rows_[i]; }

  void Validate() const {
    const int n = num_variables();
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(objective_[j]))
        throw InputError("lp: non-finite objective coefficient");
      if (std::isnan(lower_[j]) || std::isnan(upper_[j]) ||
          lower_[j] > upper_[j] || lower_[j] == kInfinity ||
          upper_[j] == -kInfinity)
        throw InputError("lp: invalid bounds on variable " +
                         std::to_string(j));
    }
    for (const auto& r : rows_) {
      if (!std::isfinite(r.rhs)) throw InputError("lp: non-finite rhs");
      for (const auto& t : r.terms) {
        if (t.var < 0 || t.var >= n)
          throw InputError("lp: variable index out of range");
        if (!std::isfinite(t.coef))
          throw InputError("lp: non-finite coefficient");
      }
    }
  }

 private:
  Vector objective_;
  Vector lower_;
  Vector upper_;
  std::vector<LpRow> rows_;
};

struct LpSolution {
  LpStatus status = LpStatus::kNumericalFailure;
  Vector primal;
  Vector dual;
  double objective_value = 0.0;
  int iterations = 0;

  bool optimal() const { return status == LpStatus::kOptimal; }
};

struct SimplexOptions {
  double feasibility_tol = 1e-7;
  double pivot_tol = 1e-9;
  double optimality_tol = 1e-9;
  // Consecutive degenerate pivots after which Bland's rule takes over.
  int bland_after_degenerate = 50;
  // 0 picks a limit proportional to the problem size.
  int max_pivots = 0;
  // Pivots between refactorizations; 0 picks max(100, rows / 2).
  int refactor_period = 0;
};

namespace internal {

class BoundedSimplex {
 public:
  BoundedSimplex(const LinearProgram& lp, const SimplexOptions& options)
      : lp_(lp), opt_(options), n_(lp.num_variables()), m_(lp.num_rows()) {}

  LpSolution Solve() {
    LpSolution sol;
    Setup();
    const int cap = opt_.max_pivots > 0 ? opt_.max_pivots
                                        : 50 * (n_ + m_) + 1000;
    max_pivots_ = cap;

    // Phase 1: drive artificials to zero.
    Vector phase1(total_, 0.0);
    for (int k = n_ + m_; k < total_; ++k) phase1[k] = -1.0;
    Outcome out = Iterate(phase1);
    sol.iterations = pivots_;
    if (out != Outcome::kOptimal) return Fail(sol);
    Refactor();
    double infeasibility = 0.0;
    for (int k = n_ + m_; k < total_; ++k) infeasibility += x_[k];
    double bnorm = 1.0;
    for (const auto& r : lp_.rows()) bnorm = std::max(bnorm, std::abs(r.rhs));
    if (infeasibility > opt_.feasibility_tol * bnorm) {
      sol.status = LpStatus::kInfeasible;
      return sol;
    }
    for (int k = n_ + m_; k < total_; ++k) {
      upper_[k] = 0.0;
      if (state_[k] != State::kBasic) {
        x_[k] = 0.0;
        state_[k] = State::kLower;
      }
    }

    // Phase 2.
    Vector cost(total_, 0.0);
    for (int j = 0; j < n_; ++j) cost[j] = lp_.objective()[j];
    out = Iterate(cost);
    sol.iterations = pivots_;
    if (out == Outcome::kFailure) return Fail(sol);
    if (out == Outcome::kUnbounded) {
      sol.status = LpStatus::kUnbounded;
      return sol;
    }
    Refactor();

    sol.status = LpStatus::kOptimal;
    sol.primal.assign(x_.begin(), x_.begin() + n_);
    for (int j = 0; j < n_; ++j) {
      // Snap values within tolerance of a bound.
      if (std::abs(sol.primal[j] - lower_[j]) <= 1e-12) sol.primal[j] = lower_[j];
      if (std::abs(sol.primal[j] - upper_[j]) <= 1e-12) sol.primal[j] = upper_[j];
    }
    sol.dual = Duals(cost);
    sol.objective_value = 0.0;
    for (int j = 0; j < n_; ++j)
      sol.objective_value += lp_.objective()[j] * sol.primal[j];
    return sol;
  }

 private:
  enum class State { kBasic, kLower, kUpper, kZero };
  enum class Outcome { kOptimal, kUnbounded, kFailure };

  LpSolution Fail(LpSolution& sol) {
    sol.status = LpStatus::kNumericalFailure;
    return sol;
  }

  void Setup() {
    // Column storage for structurals and slacks; artificials appended below.
    std::vector<std::vector<Term>> cols(n_);
    for (int i = 0; i < m_; ++i)
      for (const auto& t : lp_.row(i).terms)
        if (t.coef != 0.0) cols[t.var].push_back(Term{i, t.coef});
    for (int j = 0; j < n_; ++j) {
      col_start_.push_back(static_cast<int>(entries_.size()));
      // Merge duplicate row entries.
      std::sort(cols[j].begin(), cols[j].end(),
                [](const Term& a, const Term& b) { return a.var < b.var; });
      for (const auto& t : cols[j]) {
        if (static_cast<int>(entries_.size()) > col_start_.back() &&
            entries_.back().var == t.var) {
          entries_.back().coef += t.coef;
        } else {
          entries_.push_back(t);
        }
      }
    }
    for (int i = 0; i < m_; ++i) {
      col_start_.push_back(static_cast<int>(entries_.size()));
      entries_.push_back(Term{i, 1.0});
    }
    col_start_.push_back(static_cast<int>(entries_.size()));

    lower_ = lp_.lower();
    upper_ = lp_.upper();
    for (int i = 0; i < m_; ++i) {
      switch (lp_.row(i).type) {
        case RowType::kLessEqual:
          lower_.push_back(0.0);
          upper_.push_back(kInfinity);
          break;
        case RowType::kGreaterEqual:
          lower_.push_back(-kInfinity);
          upper_.push_back(0.0);
          break;
        case RowType::kEqual:
          lower_.push_back(0.0);
          upper_.push_back(0.0);
          break;
      }
    }
    x_.assign(n_ + m_, 0.0);
    state_.assign(n_ + m_, State::kLower);
    for (int j = 0; j < n_; ++j) {
      if (std::isfinite(lower_[j])) {
        x_[j] = lower_[j];
        state_[j] = State::kLower;
      } else if (std::isfinite(upper_[j])) {
        x_[j] = upper_[j];
        state_[j] = State::kUpper;
      } else {
        x_[j] = 0.0;
        state_[j] = State::kZero;
      }
    }
    Vector residual(m_);
    for (int i = 0; i < m_; ++i) residual[i] = lp_.row(i).rhs;
    for (int j = 0; j < n_; ++j) {
      if (x_[j] == 0.0) continue;
      for (int p = col_start_[j]; p < col_start_[j + 1]; ++p)
        residual[entries_[p].var] -= entries_[p].coef * x_[j];
    }

    basis_.assign(m_, -1);
    std::vector<int> art_rows;
    std::vector<double> art_sign;
    for (int i = 0; i < m_; ++i) {
      const int s = n_ + i;
      const double r = residual[i];
      if (r >= lower_[s] && r <= upper_[s]) {
        x_[s] = r;
        state_[s] = State::kBasic;
        basis_[i] = s;
      } else {
        const double bound = r < lower_[s] ? lower_[s] : upper_[s];
        x_[s] = bound;
        state_[s] = bound == lower_[s] ? State::kLower : State::kUpper;
        art_rows.push_back(i);
        art_sign.push_back(r - bound > 0 ? 1.0 : -1.0);
      }
    }
    for (std::size_t a = 0; a < art_rows.size(); ++a) {
      const int i = art_rows[a];
      const int k = static_cast<int>(x_.size());
      entries_.push_back(Term{i, art_sign[a]});
      col_start_.push_back(static_cast<int>(entries_.size()));
      lower_.push_back(0.0);
      upper_.push_back(kInfinity);
      x_.push_back(std::abs(residual[i] - x_[n_ + i]));
      state_.push_back(State::kBasic);
      basis_[i] = k;
    }
    total_ = static_cast<int>(x_.size());

    period_ = opt_.refactor_period > 0 ? opt_.refactor_period
                                       : std::max(100, m_ / 2);
    Refactor();
  }

  // Rebuilds the explicit inverse by Gauss-Jordan elimination with partial
  // pivoting and recomputes the basic values from the nonbasic ones.
  bool Refactor() {
    since_refactor_ = 0;
    if (m_ == 0) return true;
    const std::size_t mm = static_cast<std::size_t>(m_);
    Vector a(mm * mm, 0.0);
    for (int i = 0; i < m_; ++i) {
      const int k = basis_[i];
      for (int p = col_start_[k]; p < col_start_[k + 1]; ++p)
        a[entries_[p].var * mm + i] = entries_[p].coef;
    }
    binv_.assign(mm * mm, 0.0);
    for (int i = 0; i < m_; ++i) binv_[i * mm + i] = 1.0;
    for (int col = 0; col < m_; ++col) {
      int piv = col;
      double best = std::abs(a[col * mm + col]);
      for (int r = col + 1; r < m_; ++r) {
        const double v = std::abs(a[r * mm + col]);
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (best < 1e-13) {
        singular_ = true;
        return false;
      }
      if (piv != col) {
        for (int c = 0; c < m_; ++c) {
          std::swap(a[piv * mm + c], a[col * mm + c]);
          std::swap(binv_[piv * mm + c], binv_[col * mm + c]);
        }
      }
      const double inv = 1.0 / a[col * mm + col];
      for (int c = 0; c < m_; ++c) {
        a[col * mm + c] *= inv;
        binv_[col * mm + c] *= inv;
      }
      for (int r = 0; r < m_; ++r) {
        if (r == col) continue;
        const double f = a[r * mm + col];
        if (f == 0.0) continue;
        double* ar = &a[r * mm];
        const double* ac = &a[col * mm];
        double* br = &binv_[r * mm];
        const double* bc = &binv_[col * mm];
        for (int c = 0; c < m_; ++c) {
          ar[c] -= f * ac[c];
          br[c] -= f * bc[c];
        }
      }
    }
    // x_B = B^{-1} (b - N x_N)
    Vector rhs(m_);
    for (int i = 0; i < m_; ++i) rhs[i] = lp_.row(i).rhs;
    for (int k = 0; k < total_; ++k) {
      if (state_[k] == State::kBasic || x_[k] == 0.0) continue;
      for (int p = col_start_[k]; p < col_start_[k + 1]; ++p)
        rhs[entries_[p].var] -= entries_[p].coef * x_[k];
    }
    for (int i = 0; i < m_; ++i) {
      double v = 0.0;
      const double* bi = &binv_[i * mm];
      for (int c = 0; c < m_; ++c) v += bi[c] * rhs[c];
      x_[basis_[i]] = v;
    }
    return true;
  }

  Vector Duals(const Vector& cost) const {
    const std::size_t mm = static_cast<std::size_t>(m_);
    Vector y(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      const double* bi = &binv_[i * mm];
      for (int c = 0; c < m_; ++c) y[c] += cb * bi[c];
    }
    return y;
  }

  Outcome Iterate(const Vector& cost) {
    const std::size_t mm = static_cast<std::size_t>(m_);
    int degenerate_streak = 0;
    Vector alpha(m_);
    std::vector<int> nz;
    Vector y = Duals(cost);
    while (true) {
      if (singular_) return Outcome::kFailure;
      if (since_refactor_ >= period_) {
        if (!Refactor()) return Outcome::kFailure;
        y = Duals(cost);
      }
      if (pivots_ >= max_pivots_) return Outcome::kFailure;

      const bool bland = degenerate_streak >= opt_.bland_after_degenerate;

      // Pricing.
      int enter = -1;
      double enter_dir = 0.0;
      double enter_d = 0.0;
      double best = 0.0;
      for (int k = 0; k < total_; ++k) {
        const State s = state_[k];
        if (s == State::kBasic || lower_[k] == upper_[k]) continue;
        double d = cost[k];
        for (int p = col_start_[k]; p < col_start_[k + 1]; ++p)
          d -= y[entries_[p].var] * entries_[p].coef;
        double dir = 0.0;
        if (d > opt_.optimality_tol && s != State::kUpper) dir = 1.0;
        else if (d < -opt_.optimality_tol && s != State::kLower) dir = -1.0;
        if (dir == 0.0) continue;
        if (bland) {
          enter = k;
          enter_dir = dir;
          enter_d = d;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          enter = k;
          enter_dir = dir;
          enter_d = d;
        }
      }
      if (enter < 0) return Outcome::kOptimal;

      // alpha = B^{-1} a_enter
      std::fill(alpha.begin(), alpha.end(), 0.0);
      for (int p = col_start_[enter]; p < col_start_[enter + 1]; ++p) {
        const int r = entries_[p].var;
        const double a = entries_[p].coef;
        for (int i = 0; i < m_; ++i) alpha[i] += binv_[i * mm + r] * a;
      }

      // Harris two-pass ratio test. Basic i moves by -dir * alpha_i * theta.
      auto room = [&](int i, double move) {
        const int k = basis_[i];
        if (move < 0) return std::isfinite(lower_[k]) ? x_[k] - lower_[k] : kInfinity;
        return std::isfinite(upper_[k]) ? upper_[k] - x_[k] : kInfinity;
      };
      double relaxed = kInfinity;
      for (int i = 0; i < m_; ++i) {
        const double move = -enter_dir * alpha[i];
        if (std::abs(move) <= opt_.pivot_tol) continue;
        const double rm = room(i, move);
        if (!std::isfinite(rm)) continue;
        relaxed = std::min(relaxed, (std::max(rm, 0.0) + opt_.feasibility_tol) /
                                        std::abs(move));
      }
      const double flip = upper_[enter] - lower_[enter];
      int leave = -1;
      double theta = kInfinity;
      if (std::isfinite(relaxed)) {
        double best_pivot = 0.0;
        for (int i = 0; i < m_; ++i) {
          const double move = -enter_dir * alpha[i];
          if (std::abs(move) <= opt_.pivot_tol) continue;
          const double rm = room(i, move);
          if (!std::isfinite(rm)) continue;
          const double ratio = std::max(rm, 0.0) / std::abs(move);
          if (ratio > relaxed) continue;
          bool take;
          if (bland) {
            take = leave < 0 || ratio < theta - 1e-12 ||
                   (ratio <= theta + 1e-12 && basis_[i] < basis_[leave]);
          } else {
            take = std::abs(move) > best_pivot;
          }
          if (take) {
            leave = i;
            theta = ratio;
            best_pivot = std::abs(move);
          }
        }
      }

      if (std::isfinite(flip) && flip <= theta) {
        // Entering variable reaches its opposite bound first.
        theta = flip;
        leave = -1;
      }
      if (!std::isfinite(theta)) return Outcome::kUnbounded;

      const double step = enter_dir * theta;
      x_[enter] += step;
      for (int i = 0; i < m_; ++i) x_[basis_[i]] -= step * alpha[i];
      ++pivots_;
      degenerate_streak = theta <= 1e-12 ? degenerate_streak + 1 : 0;

      if (leave < 0) {
        state_[enter] = enter_dir > 0 ? State::kUpper : State::kLower;
        x_[enter] = enter_dir > 0 ? upper_[enter] : lower_[enter];
        continue;
      }

      const int out = basis_[leave];
      const double move = -enter_dir * alpha[leave];
      if (move < 0) {
        state_[out] = State::kLower;
        x_[out] = lower_[out];
      } else {
        state_[out] = State::kUpper;
        x_[out] = upper_[out];
      }
      if (!std::isfinite(x_[out])) {
        state_[out] = State::kZero;
        x_[out] = 0.0;
      }
      state_[enter] = State::kBasic;
      basis_[leave] = enter;

      // Rank-one update of the inverse, touching only the nonzeros of the
      // pivot row. The duals move along the same row.
      const double piv = alpha[leave];
      double* br = &binv_[leave * mm];
      nz.clear();
      for (int c = 0; c < m_; ++c) {
        if (br[c] == 0.0) continue;
        br[c] /= piv;
        nz.push_back(c);
      }
      for (int i = 0; i < m_; ++i) {
        if (i == leave || alpha[i] == 0.0) continue;
        const double f = alpha[i];
        double* bi = &binv_[i * mm];
        for (int c : nz) bi[c] -= f * br[c];
      }
      for (int c : nz) y[c] += enter_d * br[c];
      ++since_refactor_;
    }
  }

  const LinearProgram& lp_;
  SimplexOptions opt_;
  int n_;
  int m_;
  int total_ = 0;
  std::vector<int> col_start_;
  std::vector<Term> entries_;  // (row, coef) per column
  Vector lower_;
  Vector upper_;
  Vector x_;
  std::vector<State> state_;
  std::vector<int> basis_;
  Vector binv_;
  int pivots_ = 0;
  int max_pivots_ = 0;
  int since_refactor_ = 0;
  int period_ = 100;
  bool singular_ = false;
};

}  // namespace internal

// Deterministic given `lp`: no randomness and a fixed pivot rule.
inline LpSolution SolveLp(const LinearProgram& lp,
                          const SimplexOptions& options = {}) {
  lp.Validate();
  internal::BoundedSimplex simplex(lp, options);
  return simplex.Solve();
}

struct ResidualReport {
  double max_primal_residual = 0.0;  // row and bound violations
  double max_dual_residual = 0.0;    // dual sign and reduced-cost violations
  double duality_gap = 0.0;          // |dual objective - primal objective|
  double complementarity = 0.0;      // max |multiplier * slack|

  bool Within(double tol) const {
    return max_primal_residual <= tol && max_dual_residual <= tol &&
           duality_gap <= tol && complementarity <= tol;
  }
};

// Checks the KKT conditions of an optimal solution. The dual objective is
// b^T y + sum_j (d_j > 0 ? u_j d_j : l_j d_j) with d = c - A^T y.
inline ResidualReport VerifySolution(const LinearProgram& lp,
                                     const LpSolution& sol) {
  ResidualReport rep;
  const int n = lp.num_variables();
  const int m = lp.num_rows();
  const Vector& x = sol.primal;
  const Vector& y = sol.dual;
  Vector reduced = lp.objective();
  double dual_obj = 0.0;
  for (int i = 0; i < m; ++i) {
    const LpRow& row = lp.row(i);
    double ax = 0.0;
    for (const auto& t : row.terms) {
      ax += t.coef * x[t.var];
      reduced[t.var] -= t.coef * y[i];
    }
    double viol = 0.0;
    double sign_viol = 0.0;
    switch (row.type) {
      case RowType::kLessEqual:
        viol = std::max(0.0, ax - row.rhs);
        sign_viol = std::max(0.0, -y[i]);
        break;
      case RowType::kGreaterEqual:
        viol = std::max(0.0, row.rhs - ax);
        sign_viol = std::max(0.0, y[i]);
        break;
      case RowType::kEqual:
        viol = std::abs(ax - row.rhs);
        break;
    }
    rep.max_primal_residual = std::max(rep.max_primal_residual, viol);
    rep.max_dual_residual = std::max(rep.max_dual_residual, sign_viol);
    rep.complementarity =
        std::max(rep.complementarity, std::abs(y[i] * (row.rhs - ax)));
    dual_obj += row.rhs * y[i];
  }
  double primal_obj = 0.0;
  for (int j = 0; j < n; ++j) {
    primal_obj += lp.objective()[j] * x[j];
    const double lo = lp.lower()[j];
    const double hi = lp.upper()[j];
    rep.max_primal_residual = std::max(
        {rep.max_primal_residual, std::max(0.0, lo - x[j]),
         std::max(0.0, x[j] - hi)});
    const double d = reduced[j];
    if (d > 0) {
      if (std::isfinite(hi)) {
        dual_obj += hi * d;
        rep.complementarity = std::max(rep.complementarity, d * (hi - x[j]));
      } else {
        rep.max_dual_residual = std::max(rep.max_dual_residual, d);
      }
    } else if (d < 0) {
      if (std::isfinite(lo)) {
        dual_obj += lo * d;
        rep.complementarity = std::max(rep.complementarity, -d * (x[j] - lo));
      } else {
        rep.max_dual_residual = std::max(rep.max_dual_residual, -d);
      }
    }
  }
  rep.duality_gap = std::abs(dual_obj - primal_obj);
  return rep;
}

// Returns rows of a larger model that the current solution violates.
using RowSeparator = std::function<std::vector<LpRow>(const LpSolution&)>;

// Row generation: solves `lp`, appends the rows reported by `separate`, and
// repeats until nothing is violated. The final `lp` holds every added row,
// so the returned solution is optimal for the full model whenever the
// separator enumerates all violated rows.
inline LpSolution SolveWithLazyRows(LinearProgram& lp,
                                    const RowSeparator& separate,
                                    int max_rounds = 200,
                                    const SimplexOptions& options = {}) {
  LpSolution sol;
  for (int round = 0; round < max_rounds; ++round) {
    sol = SolveLp(lp, options);
    if (!sol.optimal()) return sol;
    auto rows = separate(sol);
    if (rows.empty()) return sol;
    for (auto& r : rows) lp.AddRow(std::move(r));
  }
  sol.status = LpStatus::kNumericalFailure;
  return sol;
}

//
//  Plain-text dump:
//      ecomatch-lp 1
//      variables <n>
//      <objective> <lower> <upper>          one line per variable
//      rows <m>
//      <le|ge|eq> <rhs> <nnz> <j>:<coef>... one line per row
//  Numbers use %.17g; infinite bounds are written as inf / -inf.
//

inline std::string FormatNumber(double v) {
  if (v == kInfinity) return "inf";
  if (v == -kInfinity) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void WriteLpDump(const LinearProgram& lp, std::ostream& out) {
  out << "ecomatch-lp 1\n";
  out << "variables " << lp.num_variables() << "\n";
  for (int j = 0; j < lp.num_variables(); ++j) {
    out << FormatNumber(lp.objective()[j]) << ' ' << FormatNumber(lp.lower()[j])
        << ' ' << FormatNumber(lp.upper()[j]) << '\n';
  }
  out << "rows " << lp.num_rows() << "\n";
  for (const auto& r : lp.rows()) {
    const char* rel = r.type == RowType::kLessEqual      ? "le"
                      : r.type == RowType::kGreaterEqual ? "ge"
                                                         : "eq";
    out << rel << ' ' << FormatNumber(r.rhs) << ' ' << r.terms.size();
    for (const auto& t : r.terms) out << ' ' << t.var << ':' << FormatNumber(t.coef);
    out << '\n';
  }
}

inline double ParseNumber(const std::string& s) {
  if (s == "inf") return kInfinity;
  if (s == "-inf") return -kInfinity;
  std::size_t used = 0;
  double v = std::stod(s, &used);
  if (used != s.size()) throw InputError("lp dump: bad number '" + s + "'");
  return v;
}

inline LinearProgram ReadLpDump(std::istream& in) {
  LinearProgram lp;
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "ecomatch-lp" || version != 1)
    throw InputError("lp dump: bad header");
  int n = 0;
  if (!(in >> tag >> n) || tag != "variables") throw InputError("lp dump: expected variables");
  for (int j = 0; j < n; ++j) {
    std::string c, lo, hi;
    if (!(in >> c >> lo >> hi)) throw InputError("lp dump: truncated variables");
    lp.AddVariable(ParseNumber(c), ParseNumber(lo), ParseNumber(hi));
  }
  int m = 0;
  if (!(in >> tag >> m) || tag != "rows") throw InputError("lp dump: expected rows");
  for (int i = 0; i < m; ++i) {
    std::string rel, rhs;
    std::size_t nnz = 0;
    if (!(in >> rel >> rhs >> nnz)) throw InputError("lp dump: truncated rows");
    LpRow row;
    if (rel == "le") row.type = RowType::kLessEqual;
    else if (rel == "ge") row.type = RowType::kGreaterEqual;
    else if (rel == "eq") row.type = RowType::kEqual;
    else throw InputError("lp dump: bad relation '" + rel + "'");
    row.rhs = ParseNumber(rhs);
    for (std::size_t k = 0; k < nnz; ++k) {
      std::string item;
      if (!(in >> item)) throw InputError("lp dump: truncated row");
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw InputError("lp dump: bad term");
      row.terms.push_back(Term{std::stoi(item.substr(0, colon)),
                               ParseNumber(item.substr(colon + 1))});
    }
    lp.AddRow(std::move(row));
  }
  lp.Validate();
  return lp;
}

}  // namespace ecomatch

#endif  // ECOMATCH_LP_H_
