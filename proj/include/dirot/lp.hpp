#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dirot/errors.hpp"
#include "dirot/rational.hpp"

namespace dirot {

/// Exact two-phase simplex for  min c.x  s.t.  A x = b, x >= 0  with b >= 0.
/// Bland's rule throughout. Phase one runs once; each objective restarts
/// phase two from the stored feasible basis.
class StandardFormLP {
 public:
  struct Solution {
    Rational value;
    std::vector<Rational> x;
  };

  StandardFormLP(std::vector<std::vector<Rational>> a, std::vector<Rational> b) : n_(0) {
    if (a.size() != b.size()) throw DomainError("lp: row count mismatch");
    n_ = a.empty() ? 0 : a.front().size();
    const std::size_t m = a.size();
    // columns: n structural, m artificial, rhs
    rows_.assign(m, std::vector<Rational>(n_ + m + 1));
    basis_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      if (a[i].size() != n_) throw DomainError("lp: ragged constraint matrix");
      if (b[i] < 0) {
        for (auto& v : a[i]) v = -v;
        b[i] = -b[i];
      }
      for (std::size_t j = 0; j < n_; ++j) rows_[i][j] = a[i][j];
      rows_[i][n_ + i] = 1;
      rows_[i][n_ + m] = b[i];
      basis_[i] = n_ + i;
    }
    // phase one: minimize the artificial sum
    std::vector<Rational> cost(n_ + m + 1);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n_; ++j) cost[j] -= rows_[i][j];
      cost[n_ + m] -= rows_[i][n_ + m];
    }
    run(rows_, basis_, cost, n_ + m);
    feasible_ = cost[n_ + m] == 0;
    if (!feasible_) return;
    // drive zero-level artificials out of the basis; drop redundant rows
    for (std::size_t i = 0; i < rows_.size();) {
      if (basis_[i] < n_) {
        ++i;
        continue;
      }
      std::optional<std::size_t> col;
      for (std::size_t j = 0; j < n_ && !col; ++j) {
        if (rows_[i][j] != 0) col = j;
      }
      if (col) {
        pivot(rows_, basis_, cost, i, *col);
        ++i;
      } else {
        rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(i));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
    // strip artificial columns
    for (auto& r : rows_) {
      Rational rhs = r.back();
      r.resize(n_);
      r.push_back(std::move(rhs));
    }
  }

  bool feasible() const { return feasible_; }
  std::size_t variables() const { return n_; }

  /// Minimizes c.x; throws when infeasible or unbounded.
  Solution minimize(const std::vector<Rational>& c) const {
    if (!feasible_) throw DomainError("lp: infeasible");
    if (c.size() != n_) throw DomainError("lp: objective size mismatch");
    auto rows = rows_;
    auto basis = basis_;
    std::vector<Rational> cost(n_ + 1);
    for (std::size_t j = 0; j < n_; ++j) cost[j] = c[j];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Rational cb = c[basis[i]];
      if (cb == 0) continue;
      for (std::size_t j = 0; j <= n_; ++j) cost[j] -= cb * rows[i][j];
    }
    run(rows, basis, cost, n_);
    Solution s;
    s.x.assign(n_, 0);
    for (std::size_t i = 0; i < rows.size(); ++i) s.x[basis[i]] = rows[i][n_];
    s.value = -cost[n_];
    return s;
  }

  Solution maximize(const std::vector<Rational>& c) const {
    std::vector<Rational> neg(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) neg[j] = -c[j];
    Solution s = minimize(neg);
    s.value = -s.value;
    return s;
  }

 private:
  using Tableau = std::vector<std::vector<Rational>>;

  static void pivot(Tableau& rows, std::vector<std::size_t>& basis, std::vector<Rational>& cost, std::size_t r,
                    std::size_t col) {
    const std::size_t width = rows[r].size();
    const Rational p = rows[r][col];
    for (std::size_t j = 0; j < width; ++j) rows[r][j] /= p;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][col] == 0) continue;
      const Rational f = rows[i][col];
      for (std::size_t j = 0; j < width; ++j) {
        if (rows[r][j] != 0) rows[i][j] -= f * rows[r][j];
      }
    }
    if (cost[col] != 0) {
      const Rational f = cost[col];
      for (std::size_t j = 0; j < width; ++j) {
        if (rows[r][j] != 0) cost[j] -= f * rows[r][j];
      }
    }
    basis[r] = col;
  }

  // cost holds reduced costs and -objective in its last slot
  static void run(Tableau& rows, std::vector<std::size_t>& basis, std::vector<Rational>& cost, std::size_t cols) {
    for (;;) {
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < cols; ++j) {
        if (cost[j] < 0) {
          enter = j;
          break;
        }
      }
      if (!enter) return;
      std::optional<std::size_t> leave;
      Rational best;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i][*enter] <= 0) continue;
        Rational ratio = rows[i].back() / rows[i][*enter];
        if (!leave || ratio < best || (ratio == best && basis[i] < basis[*leave])) {
          leave = i;
          best = std::move(ratio);
        }
      }
      if (!leave) throw DomainError("lp: unbounded");
      pivot(rows, basis, cost, *leave, *enter);
    }
  }

  std::size_t n_;
  Tableau rows_;
  std::vector<std::size_t> basis_;
  bool feasible_ = false;
};

}  // namespace dirot
