#pragma once

// Dense two-phase primal simplex over double or exact rationals.
//
// Pricing is Dantzig (most negative reduced cost) with smallest-index
// tie-breaking; after a run of degenerate pivots it falls back to Bland's
// rule, so the pivot sequence is deterministic and cannot cycle.

#include "delta_lab/error.hpp"
#include "delta_lab/numeric.hpp"

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace delta_lab {

enum class RowSense { LessEqual, GreaterEqual, Equal };
enum class LpStatus { Optimal, Infeasible, Unbounded };

template <Scalar T>
struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  T objective{};
  std::vector<T> values;
  std::size_t pivots = 0;

  bool optimal() const { return status == LpStatus::Optimal; }
};

template <Scalar T>
class LinearProgram {
 public:
  using Term = std::pair<std::size_t, T>;

  /// Adds a variable with objective coefficient `cost`; nonnegative unless `free`.
  std::size_t add_variable(T cost = T(0), bool free = false) {
    cost_.push_back(std::move(cost));
    free_.push_back(free);
    return cost_.size() - 1;
  }

  void set_cost(std::size_t var, T cost) { cost_.at(var) = std::move(cost); }

  void add_row(std::vector<Term> terms, RowSense sense, T rhs) {
    for (const auto& [var, coeff] : terms) {
      require(var < cost_.size(), ErrorCode::InvalidArgument, "LP row references unknown variable");
      (void)coeff;
    }
    rows_.push_back(Row{std::move(terms), sense, std::move(rhs)});
  }

  std::size_t num_variables() const { return cost_.size(); }
  std::size_t num_rows() const { return rows_.size(); }

  LpSolution<T> minimize() const { return solve(false); }

  LpSolution<T> maximize() const {
    auto sol = solve(true);
    if (sol.optimal()) sol.objective = -sol.objective;
    return sol;
  }

 private:
  struct Row {
    std::vector<Term> terms;
    RowSense sense;
    T rhs;
  };

  std::vector<T> cost_;
  std::vector<bool> free_;
  std::vector<Row> rows_;

  static T eps() {
    if constexpr (is_exact_v<T>) {
      return T(0);
    } else {
      return 1e-11;
    }
  }

  class Tableau {
   public:
    Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), data_((rows + 1) * (cols + 1), T(0)) {}

    T& at(std::size_t r, std::size_t c) { return data_[r * (n_ + 1) + c]; }
    const T& at(std::size_t r, std::size_t c) const { return data_[r * (n_ + 1) + c]; }
    T& rhs(std::size_t r) { return at(r, n_); }
    T& cost(std::size_t c) { return at(m_, c); }

    void pivot(std::size_t r, std::size_t c) {
      const T inv = T(1) / at(r, c);
      for (std::size_t j = 0; j <= n_; ++j) at(r, j) *= inv;
      at(r, c) = T(1);
      for (std::size_t i = 0; i <= m_; ++i) {
        if (i == r) continue;
        const T factor = at(i, c);
        if (factor == 0) continue;
        for (std::size_t j = 0; j <= n_; ++j) {
          if (at(r, j) != 0) at(i, j) -= factor * at(r, j);
        }
        at(i, c) = T(0);
      }
    }

    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }

   private:
    std::size_t m_;
    std::size_t n_;
    std::vector<T> data_;
  };

  // Runs simplex iterations on the current objective row. Returns false when unbounded.
  static bool iterate(Tableau& tab, std::vector<std::size_t>& basis, const std::vector<bool>& banned,
                      std::size_t& pivots) {
    const std::size_t m = tab.rows();
    const std::size_t n = tab.cols();
    const T tol = eps();
    std::size_t degenerate_run = 0;
    constexpr std::size_t kBlandAfter = 64;
    constexpr std::size_t kMaxPivots = 200000;
    while (true) {
      std::size_t entering = n;
      T best = -tol;
      const bool bland = degenerate_run >= kBlandAfter;
      for (std::size_t j = 0; j < n; ++j) {
        if (banned[j]) continue;
        const T& rc = tab.cost(j);
        if (rc < -tol && (entering == n || (!bland && rc < best))) {
          entering = j;
          best = rc;
          if (bland) break;
        }
      }
      if (entering == n) return true;

      std::size_t leaving = m;
      T best_ratio{};
      for (std::size_t i = 0; i < m; ++i) {
        const T& a = tab.at(i, entering);
        if (!(a > tol)) continue;
        T ratio = tab.rhs(i) / a;
        if (leaving == m) {
          leaving = i;
          best_ratio = ratio;
          continue;
        }
        T diff = ratio - best_ratio;
        if constexpr (is_exact_v<T>) {
          if (diff < 0 || (diff == 0 && basis[i] < basis[leaving])) {
            leaving = i;
            best_ratio = ratio;
          }
        } else {
          const double tie = 1e-12 * (1.0 + std::abs(best_ratio));
          if (diff < -tie || (diff <= tie && basis[i] < basis[leaving])) {
            leaving = i;
            best_ratio = ratio;
          }
        }
      }
      if (leaving == m) return false;
      degenerate_run = (best_ratio == 0) ? degenerate_run + 1 : 0;
      tab.pivot(leaving, entering);
      basis[leaving] = entering;
      if (++pivots > kMaxPivots) fail(ErrorCode::SearchCapReached, "simplex pivot limit exceeded");
    }
  }

  LpSolution<T> solve(bool negate_cost) const {
    const std::size_t m = rows_.size();
    // Column layout: structural (free vars split), then slack/surplus, then artificials.
    std::vector<std::size_t> pos_col(cost_.size()), neg_col(cost_.size(), SIZE_MAX);
    std::size_t ncol = 0;
    for (std::size_t v = 0; v < cost_.size(); ++v) {
      pos_col[v] = ncol++;
      if (free_[v]) neg_col[v] = ncol++;
    }
    const std::size_t structural = ncol;

    std::vector<RowSense> sense(m);
    std::vector<int> flip(m, 1);
    std::size_t n_slack = 0, n_art = 0;
    for (std::size_t i = 0; i < m; ++i) {
      sense[i] = rows_[i].sense;
      if (rows_[i].rhs < 0) {
        flip[i] = -1;
        if (sense[i] == RowSense::LessEqual) sense[i] = RowSense::GreaterEqual;
        else if (sense[i] == RowSense::GreaterEqual) sense[i] = RowSense::LessEqual;
      }
      if (sense[i] != RowSense::Equal) ++n_slack;
      if (sense[i] != RowSense::LessEqual) ++n_art;
    }
    const std::size_t slack_begin = structural;
    const std::size_t art_begin = slack_begin + n_slack;
    ncol = art_begin + n_art;

    Tableau tab(m, ncol);
    std::vector<std::size_t> basis(m);
    std::vector<bool> is_art(ncol, false);
    std::size_t next_slack = slack_begin, next_art = art_begin;
    for (std::size_t i = 0; i < m; ++i) {
      const T f = T(flip[i]);
      for (const auto& [var, coeff] : rows_[i].terms) {
        tab.at(i, pos_col[var]) += f * coeff;
        if (neg_col[var] != SIZE_MAX) tab.at(i, neg_col[var]) -= f * coeff;
      }
      tab.rhs(i) = f * rows_[i].rhs;
      if (sense[i] == RowSense::LessEqual) {
        tab.at(i, next_slack) = T(1);
        basis[i] = next_slack++;
      } else {
        if (sense[i] == RowSense::GreaterEqual) tab.at(i, next_slack++) = T(-1);
        tab.at(i, next_art) = T(1);
        is_art[next_art] = true;
        basis[i] = next_art++;
      }
    }

    LpSolution<T> out;
    std::vector<bool> banned(ncol, false);

    if (n_art > 0) {
      for (std::size_t j = 0; j <= ncol; ++j) tab.at(m, j) = T(0);
      for (std::size_t j = art_begin; j < ncol; ++j) tab.cost(j) = T(1);
      for (std::size_t i = 0; i < m; ++i) {
        if (!is_art[basis[i]]) continue;
        for (std::size_t j = 0; j <= ncol; ++j) tab.at(m, j) -= tab.at(i, j);
      }
      iterate(tab, basis, banned, out.pivots);
      T infeasibility = -tab.at(m, ncol);
      T feas_tol = T(0);
      if constexpr (!is_exact_v<T>) {
        double scale = 1.0;
        for (const auto& row : rows_) scale = std::max(scale, std::abs(row.rhs));
        feas_tol = 1e-9 * scale;
      }
      if (infeasibility > feas_tol) {
        out.status = LpStatus::Infeasible;
        return out;
      }
      // Drive remaining artificials out of the basis where possible.
      for (std::size_t i = 0; i < m; ++i) {
        if (!is_art[basis[i]]) continue;
        for (std::size_t j = 0; j < art_begin; ++j) {
          if (abs_of(tab.at(i, j)) > eps()) {
            tab.pivot(i, j);
            basis[i] = j;
            ++out.pivots;
            break;
          }
        }
      }
      for (std::size_t j = art_begin; j < ncol; ++j) banned[j] = true;
    }

    // Phase 2 objective row.
    std::vector<T> c(ncol, T(0));
    for (std::size_t v = 0; v < cost_.size(); ++v) {
      T cv = negate_cost ? T(-cost_[v]) : cost_[v];
      c[pos_col[v]] = cv;
      if (neg_col[v] != SIZE_MAX) c[neg_col[v]] = -cv;
    }
    for (std::size_t j = 0; j < ncol; ++j) tab.cost(j) = c[j];
    tab.at(m, ncol) = T(0);
    for (std::size_t i = 0; i < m; ++i) {
      const T cb = c[basis[i]];
      if (cb == 0) continue;
      for (std::size_t j = 0; j <= ncol; ++j) tab.at(m, j) -= cb * tab.at(i, j);
    }
    if (!iterate(tab, basis, banned, out.pivots)) {
      out.status = LpStatus::Unbounded;
      return out;
    }

    std::vector<T> col_value(ncol, T(0));
    for (std::size_t i = 0; i < m; ++i) col_value[basis[i]] = tab.rhs(i);
    out.values.assign(cost_.size(), T(0));
    out.objective = T(0);
    for (std::size_t v = 0; v < cost_.size(); ++v) {
      T x = col_value[pos_col[v]];
      if (neg_col[v] != SIZE_MAX) x -= col_value[neg_col[v]];
      out.values[v] = x;
      out.objective += (negate_cost ? T(-cost_[v]) : cost_[v]) * x;
    }
    out.status = LpStatus::Optimal;
    return out;
  }
};

}  // namespace delta_lab
