#pragma once

// Generalized polynomials p(t) = sum c_k t^{lambda_k} evaluated in the
// variable u = -ln t, where they become exponential sums sum c_k e^{-lambda_k u}
// on [0, inf]. Each term is monotone in u, which gives cheap rigorous range
// enclosures; exponents spanning fifty orders of magnitude stay tractable.

#include "delta_lab/error.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <string>
#include <vector>

namespace delta_lab::muntz {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo = 0;
  double hi = 0;

  double width() const { return hi - lo; }
  double magnitude() const { return std::max(std::abs(lo), std::abs(hi)); }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

inline Interval intersect(const Interval& a, const Interval& b) {
  Interval r{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
  if (r.lo > r.hi) return a.width() < b.width() ? a : b;  // rounding disagreement; keep the tighter one
  return r;
}

inline double u_of_t(double t) { return t <= 0 ? kInf : -std::log(t); }
inline double t_of_u(double u) { return std::isinf(u) ? 0.0 : std::exp(-u); }

struct Term {
  double lambda = 0;
  double coeff = 0;
};

class ExpSum {
 public:
  ExpSum() = default;

  explicit ExpSum(std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.lambda < b.lambda; });
    for (const auto& t : terms) {
      require(t.lambda >= 0 && std::isfinite(t.lambda) && std::isfinite(t.coeff), ErrorCode::InvalidArgument,
              "bad exponential-sum term");
      if (t.coeff == 0) continue;
      if (!terms_.empty() && terms_.back().lambda == t.lambda) {
        terms_.back().coeff += t.coeff;
        if (terms_.back().coeff == 0) terms_.pop_back();
      } else {
        terms_.push_back(t);
      }
    }
    for (const auto& t : terms_) abs_sum_ += std::abs(t.coeff);
  }

  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  double at_u(double u) const {
    double s = 0;
    for (const auto& t : terms_) s += t.coeff * term_value(t.lambda, u);
    return s;
  }

  double at_t(double t) const { return at_u(u_of_t(t)); }

  /// -dp/du = t p'(t); it vanishes exactly where p'(t) does on (0, 1].
  ExpSum critical_sum() const {
    std::vector<Term> d;
    for (const auto& t : terms_)
      if (t.lambda > 0) d.push_back({t.lambda, t.coeff * t.lambda});
    return ExpSum(std::move(d));
  }

  /// p'(t) = sum c lambda t^{lambda - 1} at a point t in [0, 1].
  double derivative_t(double t) const {
    double s = 0;
    for (const auto& term : terms_) {
      if (term.lambda == 0) continue;
      const double e = term.lambda - 1;
      const double tp = (e == 0) ? 1.0 : (t == 0 ? 0.0 : std::exp(e * std::log(t)));
      s += term.coeff * term.lambda * tp;
    }
    return s;
  }

  /// Range of the sum over u in [a, b] from per-term monotonicity.
  Interval monotone_range(double a, double b) const {
    Interval r{0, 0};
    for (const auto& t : terms_) {
      const double at_a = t.coeff * term_value(t.lambda, a);
      const double at_b = t.coeff * term_value(t.lambda, b);
      r.lo += std::min(at_a, at_b);
      r.hi += std::max(at_a, at_b);
    }
    return pad(r);
  }

  /// Range enclosure on [a, b]: monotone bound intersected with a mean-value bound.
  Interval range(double a, double b) const {
    Interval mono = monotone_range(a, b);
    if (std::isinf(b) || b - a <= 0) return mono;
    const double m = a + 0.5 * (b - a);
    Interval slope{0, 0};  // d/du range
    for (const auto& t : terms_) {
      if (t.lambda == 0) continue;
      const double k = -t.coeff * t.lambda;
      const double at_a = k * term_value(t.lambda, a);
      const double at_b = k * term_value(t.lambda, b);
      slope.lo += std::min(at_a, at_b);
      slope.hi += std::max(at_a, at_b);
    }
    const double left = a - m, right = b - m;
    const double c1 = slope.lo * left, c2 = slope.lo * right, c3 = slope.hi * left, c4 = slope.hi * right;
    const double v = at_u(m);
    Interval mv = pad(Interval{v + std::min({c1, c2, c3, c4}), v + std::max({c1, c2, c3, c4})});
    return intersect(mono, mv);
  }

  /// Sign changes of the coefficient sequence ordered by exponent (Descartes' rule).
  int sign_changes() const {
    int changes = 0;
    int last = 0;
    for (const auto& t : terms_) {
      const int s = t.coeff > 0 ? 1 : -1;
      if (last != 0 && s != last) ++changes;
      last = s;
    }
    return changes;
  }

  double abs_coeff_sum() const { return abs_sum_; }
  double lambda_min_positive() const {
    for (const auto& t : terms_)
      if (t.lambda > 0) return t.lambda;
    return 0;
  }
  double lambda_max() const { return terms_.empty() ? 0 : terms_.back().lambda; }

  /// Value at u = inf (t = 0): the constant term.
  double at_infinity() const { return (!terms_.empty() && terms_.front().lambda == 0) ? terms_.front().coeff : 0.0; }

  ExpSum operator-() const {
    auto t = terms_;
    for (auto& x : t) x.coeff = -x.coeff;
    return ExpSum(std::move(t));
  }

  friend ExpSum operator+(const ExpSum& a, const ExpSum& b) {
    auto t = a.terms_;
    t.insert(t.end(), b.terms_.begin(), b.terms_.end());
    return ExpSum(std::move(t));
  }
  friend ExpSum operator-(const ExpSum& a, const ExpSum& b) { return a + (-b); }
  friend ExpSum operator*(double s, const ExpSum& a) {
    auto t = a.terms_;
    for (auto& x : t) x.coeff *= s;
    return ExpSum(std::move(t));
  }

 private:
  static double term_value(double lambda, double u) {
    if (lambda == 0) return 1.0;
    if (std::isinf(u)) return 0.0;
    return std::exp(-lambda * u);
  }

  // Covers accumulated rounding in sums of |c| magnitude.
  Interval pad(Interval r) const {
    const double e = 16 * DBL_EPSILON * (abs_sum_ + 1.0);
    return {r.lo - e, r.hi + e};
  }

  std::vector<Term> terms_;
  double abs_sum_ = 0;
};

// ---------------------------------------------------------------------------
// Branch-and-bound extremum search with rigorous enclosures.

enum class Goal { Max, Min, AbsMax };

struct Enclosure {
  double lower = 0;   // attained by a sampled point
  double upper = 0;   // no point of the domain exceeds it
  double arg_u = 0;   // where `lower` was sampled
  std::size_t boxes = 0;
  bool converged = false;

  double arg_t() const { return t_of_u(arg_u); }
};

namespace detail {

// Breakpoints on [a, b] (b may be infinite): 0, a geometric ladder across the
// scales where terms change, and the tail.
inline std::vector<double> scale_grid(const ExpSum& p, double a, double b, double ratio) {
  std::vector<double> g;
  const double lmax = p.lambda_max();
  const double lmin = p.lambda_min_positive();
  g.push_back(a);
  if (lmax > 0) {
    double x = std::max(a, 1e-3 / lmax);
    const double stop = std::min(b, 64.0 / lmin);
    if (x > a && x < b) g.push_back(x);
    if (x == 0) x = 1e-3 / lmax;
    while (x * ratio < stop) {
      x *= ratio;
      if (x > a) g.push_back(x);
    }
    if (stop > g.back() && stop < b) g.push_back(stop);
  }
  if (b > g.back()) g.push_back(b);
  return g;
}

inline double split_point(double a, double b) {
  if (std::isinf(b)) return a > 0 ? 2 * a : 1.0;
  if (a > 0 && b / a > 4) return std::sqrt(a) * std::sqrt(b);
  return a + 0.5 * (b - a);
}

}  // namespace detail

/// Extremum of p over u in [a, b] to within `tol`, as a certified enclosure.
inline Enclosure extremum(const ExpSum& p, double a, double b, Goal goal, double tol = 1e-10,
                          std::size_t cap = 400000) {
  require(a >= 0 && b >= a, ErrorCode::InvalidArgument, "extremum interval must satisfy 0 <= a <= b");
  auto score = [goal](double v) {
    switch (goal) {
      case Goal::Max: return v;
      case Goal::Min: return -v;
      case Goal::AbsMax: return std::abs(v);
    }
    return v;
  };
  auto bound = [goal](const Interval& r) {
    switch (goal) {
      case Goal::Max: return r.hi;
      case Goal::Min: return -r.lo;
      case Goal::AbsMax: return r.magnitude();
    }
    return r.hi;
  };

  Enclosure out;
  double best = -kInf;
  auto sample = [&](double u) {
    const double v = std::isinf(u) ? p.at_infinity() : p.at_u(u);
    const double s = score(v);
    if (s > best) {
      best = s;
      out.arg_u = u;
    }
  };

  struct Box {
    double a, b, ub;
    bool operator<(const Box& o) const { return ub < o.ub; }
  };
  std::priority_queue<Box> heap;
  const auto grid = detail::scale_grid(p, a, b, 2.0);
  for (double x : grid) sample(x);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    heap.push({grid[i], grid[i + 1], bound(p.range(grid[i], grid[i + 1]))});
    ++out.boxes;
  }
  if (heap.empty()) {
    out.lower = out.upper = (goal == Goal::Min) ? -best : best;
    out.converged = true;
    return out;
  }

  while (true) {
    const Box top = heap.top();
    const double ub = std::max(top.ub, best);
    if (ub - best <= tol || out.boxes >= cap) {
      out.converged = ub - best <= tol;
      out.lower = best;
      out.upper = ub;
      break;
    }
    heap.pop();
    const double m = detail::split_point(top.a, top.b);
    if (!(m > top.a && m < top.b)) {
      // Box is below floating-point resolution; its bound is final.
      out.converged = false;
      out.lower = best;
      out.upper = ub;
      heap.push(top);
      break;
    }
    sample(m);
    heap.push({top.a, m, bound(p.range(top.a, m))});
    heap.push({m, top.b, bound(p.range(m, top.b))});
    out.boxes += 2;
  }
  if (goal == Goal::Min) {
    const double lo = -out.upper, hi = -out.lower;
    out.lower = lo;  // min lies in [lo, hi]; `hi` is attained
    out.upper = hi;
  }
  return out;
}

/// Same as `extremum` with the interval given in t in [t_lo, t_hi].
inline Enclosure extremum_t(const ExpSum& p, double t_lo, double t_hi, Goal goal, double tol = 1e-10) {
  require(0 <= t_lo && t_lo <= t_hi && t_hi <= 1, ErrorCode::InvalidArgument, "t-interval must lie in [0,1]");
  return extremum(p, u_of_t(t_hi), u_of_t(t_lo), goal, tol);
}

// ---------------------------------------------------------------------------
// Critical points by sign-change isolation, certified by Descartes' bound.

struct RootBracket {
  double a = 0;  // u-interval containing exactly one sign change of the critical sum
  double b = 0;

  double mid() const { return a + 0.5 * (b - a); }
};

struct RootIsolation {
  std::vector<RootBracket> brackets;
  int descartes_bound = 0;
  bool complete() const { return static_cast<int>(brackets.size()) == descartes_bound; }
};

/// Isolates the sign changes of q on (0, inf) and refines each to relative width ~1e-15.
inline RootIsolation isolate_roots(const ExpSum& q) {
  RootIsolation out;
  out.descartes_bound = q.sign_changes();
  if (out.descartes_bound == 0) return out;
  auto grid = detail::scale_grid(q, 0.0, kInf, 1.02);
  grid.erase(grid.begin());  // drop u = 0 (t = 1 is an endpoint, not interior)
  if (!grid.empty() && std::isinf(grid.back())) grid.pop_back();
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = q.at_u(grid[i]);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (vals[i] == 0) {
      out.brackets.push_back({grid[i], grid[i]});
      continue;
    }
    if ((vals[i] > 0) == (vals[i + 1] > 0) || vals[i + 1] == 0) continue;
    double a = grid[i], b = grid[i + 1];
    double fa = vals[i];
    for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
      const double m = detail::split_point(a, b);
      if (!(m > a && m < b)) break;
      const double fm = q.at_u(m);
      if (fm == 0) {
        a = b = m;
        break;
      }
      if ((fm > 0) == (fa > 0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    out.brackets.push_back({a, b});
  }
  if (!vals.empty() && vals.back() == 0) out.brackets.push_back({grid.back(), grid.back()});
  return out;
}

struct NormEnclosure {
  double lower = 0;
  double upper = 0;
  double arg_t = 1;
  std::string method;  // "roots" or "branch_and_bound"
  bool certified = false;

  double width() const { return upper - lower; }
};

/// Sup norm over [0, 1] with certified enclosure width <= tol when possible.
inline NormEnclosure sup_norm(const ExpSum& p, double tol = 1e-10) {
  NormEnclosure out;
  if (p.empty()) {
    out.method = "roots";
    out.certified = true;
    return out;
  }
  const RootIsolation iso = isolate_roots(p.critical_sum());
  if (iso.complete()) {
    double best = std::abs(p.at_u(0));
    double arg = 0;
    double upper = best;
    const double at_inf = std::abs(p.at_infinity());
    if (at_inf > best) {
      best = at_inf;
      arg = kInf;
    }
    upper = std::max(upper, at_inf);
    for (const auto& br : iso.brackets) {
      const double m = br.mid();
      const double v = std::abs(p.at_u(m));
      if (v > best) {
        best = v;
        arg = m;
      }
      upper = std::max(upper, p.range(br.a, br.b).magnitude());
    }
    upper = std::max(upper, best);
    if (upper - best <= tol) {
      out.lower = best;
      out.upper = upper;
      out.arg_t = t_of_u(arg);
      out.method = "roots";
      out.certified = true;
      return out;
    }
  }
  const Enclosure e = extremum(p, 0.0, kInf, Goal::AbsMax, tol);
  out.lower = e.lower;
  out.upper = e.upper;
  out.arg_t = e.arg_t();
  out.method = "branch_and_bound";
  out.certified = e.converged;
  return out;
}

}  // namespace delta_lab::muntz
