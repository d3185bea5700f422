#pragma once

// Distance from a point to the convex hull of finitely many points.
// Polyhedral norms reduce to one exact LP; Muntz and direct-sum norms use a
// cutting-plane LP whose relaxation value is a lower bound and whose primal
// residual, measured in the true norm, is an upper bound.

#include "delta_lab/core/space_point.hpp"
#include "delta_lab/lp.hpp"
#include "delta_lab/muntz/exp_sum.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace delta_lab {

template <Scalar T>
struct HullResult {
  T distance{};  // exact for polyhedral models, the upper bound otherwise
  double lower = 0;
  double upper = 0;
  std::vector<T> weights;
  std::string method;
  std::size_t iterations = 1;
  bool converged = true;

  double gap() const { return upper - lower; }
};

namespace detail {

template <Scalar T>
HullResult<T> finish_exact(const LpSolution<T>& sol, std::size_t n) {
  require(sol.optimal(), ErrorCode::VerificationFailed, "hull LP did not reach an optimum");
  HullResult<T> r;
  r.distance = sol.objective;
  r.lower = r.upper = to_double(sol.objective);
  r.weights.assign(sol.values.begin(), sol.values.begin() + static_cast<std::ptrdiff_t>(n));
  r.method = "lp_exact";
  return r;
}

}  // namespace detail

template <Scalar T>
HullResult<T> hull_distance(const l1::StepFunction<T>& target, const std::vector<l1::StepFunction<T>>& points) {
  require(!points.empty(), ErrorCode::EmptyInput, "hull of an empty point list");
  const auto& model = target.model();
  for (const auto& p : points) require(p.model() == model, ErrorCode::MixedSpaces, "step functions on different models");
  LinearProgram<T> lp;
  const std::size_t n = points.size(), c = model.size();
  for (std::size_t j = 0; j < n; ++j) lp.add_variable();
  for (std::size_t i = 0; i < c; ++i) lp.add_variable(model.cell(i).mass);
  std::vector<std::pair<std::size_t, T>> sum;
  for (std::size_t j = 0; j < n; ++j) sum.emplace_back(j, T(1));
  lp.add_row(sum, RowSense::Equal, T(1));
  for (std::size_t i = 0; i < c; ++i) {
    std::vector<std::pair<std::size_t, T>> up{{n + i, T(1)}}, down{{n + i, T(1)}};
    for (std::size_t j = 0; j < n; ++j) {
      const T& v = points[j].value(i);
      if (v == 0) continue;
      up.emplace_back(j, v);
      down.emplace_back(j, T(-v));
    }
    lp.add_row(up, RowSense::GreaterEqual, target.value(i));
    lp.add_row(down, RowSense::GreaterEqual, T(-target.value(i)));
  }
  return detail::finish_exact(lp.minimize(), n);
}

template <Scalar T>
HullResult<T> hull_distance(const ck::TailSequence<T>& target, const std::vector<ck::TailSequence<T>>& points) {
  require(!points.empty(), ErrorCode::EmptyInput, "hull of an empty point list");
  std::size_t len = target.length();
  for (const auto& p : points) {
    require(p.variant() == target.variant(), ErrorCode::MixedSpaces, "sequences from different spaces");
    if (!target.has_limit())
      require(p.length() == target.length(), ErrorCode::MixedSpaces, "l-infinity^n vectors of different dimension");
    len = std::max(len, p.length());
  }
  LinearProgram<T> lp;
  const std::size_t n = points.size();
  for (std::size_t j = 0; j < n; ++j) lp.add_variable();
  const std::size_t r = lp.add_variable(T(1));
  std::vector<std::pair<std::size_t, T>> sum;
  for (std::size_t j = 0; j < n; ++j) sum.emplace_back(j, T(1));
  lp.add_row(sum, RowSense::Equal, T(1));
  auto coordinate = [&](auto value_of) {
    std::vector<std::pair<std::size_t, T>> up{{r, T(1)}}, down{{r, T(1)}};
    for (std::size_t j = 0; j < n; ++j) {
      const T v = value_of(points[j]);
      if (v == 0) continue;
      up.emplace_back(j, v);
      down.emplace_back(j, T(-v));
    }
    const T t = value_of(target);
    lp.add_row(up, RowSense::GreaterEqual, t);
    lp.add_row(down, RowSense::GreaterEqual, T(-t));
  };
  for (std::size_t k = 0; k < len; ++k) coordinate([k](const ck::TailSequence<T>& s) { return s.at(k); });
  if (target.has_limit()) coordinate([](const ck::TailSequence<T>& s) { return s.limit(); });
  return detail::finish_exact(lp.minimize(), n);
}

namespace detail {

// One summand of the residual ||target - sum lambda_j p_j||, linearized for
// the cutting-plane LP. Cells/Coords blocks are exact; Exp blocks are cut at
// sample points u.
struct ResidualBlock {
  enum class Kind { Cells, Coords, Exp } kind = Kind::Coords;
  std::vector<double> masses;                  // Cells
  std::vector<double> target;                  // Cells, Coords
  std::vector<std::vector<double>> points;     // Cells, Coords: points[j][i]
  muntz::ExpSum target_sum;                    // Exp
  std::vector<muntz::ExpSum> point_sums;       // Exp
  std::vector<double> cuts;                    // Exp: u-values

  double residual_at(const std::vector<double>& lam, std::size_t i) const {
    double v = target[i];
    for (std::size_t j = 0; j < lam.size(); ++j) v -= lam[j] * points[j][i];
    return v;
  }

  muntz::ExpSum residual_sum(const std::vector<double>& lam) const {
    std::vector<muntz::Term> terms = target_sum.terms();
    for (std::size_t j = 0; j < lam.size(); ++j)
      for (const auto& t : point_sums[j].terms()) terms.push_back({t.lambda, -lam[j] * t.coeff});
    return muntz::ExpSum(std::move(terms));
  }

  /// Upper bound of the residual norm, and (Exp) the u where it peaks.
  std::pair<double, double> true_norm(const std::vector<double>& lam, double tol) const {
    if (kind == Kind::Exp) {
      const auto e = muntz::sup_norm(residual_sum(lam), tol * 0.25);
      return {e.upper, muntz::u_of_t(e.arg_t)};
    }
    double s = 0;
    for (std::size_t i = 0; i < target.size(); ++i) {
      const double r = std::abs(residual_at(lam, i));
      s = kind == Kind::Cells ? s + masses[i] * r : std::max(s, r);
    }
    return {s, 0.0};
  }

  static double value(const muntz::ExpSum& p, double u) { return std::isinf(u) ? p.at_infinity() : p.at_u(u); }

  /// Adds rows forcing variable `a` above this block's residual norm.
  void add_rows(LinearProgram<double>& lp, std::size_t n, std::size_t a) const {
    auto pair_rows = [&](std::size_t bound_var, double t, auto point_value) {
      std::vector<std::pair<std::size_t, double>> up{{bound_var, 1.0}}, down{{bound_var, 1.0}};
      for (std::size_t j = 0; j < n; ++j) {
        const double v = point_value(j);
        if (v == 0) continue;
        up.emplace_back(j, v);
        down.emplace_back(j, -v);
      }
      lp.add_row(up, RowSense::GreaterEqual, t);
      lp.add_row(down, RowSense::GreaterEqual, -t);
    };
    switch (kind) {
      case Kind::Cells: {
        std::vector<std::pair<std::size_t, double>> total{{a, 1.0}};
        for (std::size_t i = 0; i < target.size(); ++i) {
          const std::size_t s = lp.add_variable();
          pair_rows(s, target[i], [&](std::size_t j) { return points[j][i]; });
          total.emplace_back(s, -masses[i]);
        }
        lp.add_row(total, RowSense::GreaterEqual, 0.0);
        break;
      }
      case Kind::Coords:
        for (std::size_t i = 0; i < target.size(); ++i)
          pair_rows(a, target[i], [&](std::size_t j) { return points[j][i]; });
        break;
      case Kind::Exp:
        for (double u : cuts) pair_rows(a, value(target_sum, u), [&](std::size_t j) { return value(point_sums[j], u); });
        break;
    }
  }
};

template <Scalar T>
ResidualBlock make_block(const Component<T>& target, const std::vector<const Component<T>*>& pts) {
  ResidualBlock b;
  for (const auto* p : pts) require(p->index() == target.index(), ErrorCode::MixedSpaces, "components from different spaces");
  if (const auto* f = std::get_if<l1::StepFunction<T>>(&target)) {
    b.kind = ResidualBlock::Kind::Cells;
    for (std::size_t i = 0; i < f->model().size(); ++i) {
      b.masses.push_back(to_double(f->model().cell(i).mass));
      b.target.push_back(to_double(f->value(i)));
    }
    for (const auto* p : pts) {
      const auto& g = std::get<l1::StepFunction<T>>(*p);
      require(g.model() == f->model(), ErrorCode::MixedSpaces, "step functions on different models");
      std::vector<double> v;
      for (const auto& x : g.values()) v.push_back(to_double(x));
      b.points.push_back(std::move(v));
    }
  } else if (const auto* s = std::get_if<ck::TailSequence<T>>(&target)) {
    b.kind = ResidualBlock::Kind::Coords;
    std::size_t len = s->length();
    for (const auto* p : pts) len = std::max(len, std::get<ck::TailSequence<T>>(*p).length());
    auto values = [&](const ck::TailSequence<T>& q) {
      require(q.variant() == s->variant(), ErrorCode::MixedSpaces, "sequences from different spaces");
      std::vector<double> v;
      for (std::size_t k = 0; k < len; ++k) v.push_back(to_double(q.has_limit() || k < q.length() ? q.at(k) : T(0)));
      if (q.has_limit()) v.push_back(to_double(q.limit()));
      return v;
    };
    b.target = values(*s);
    for (const auto* p : pts) b.points.push_back(values(std::get<ck::TailSequence<T>>(*p)));
  } else {
    const auto& m = std::get<muntz::MuntzPolynomial<T>>(target);
    b.kind = ResidualBlock::Kind::Exp;
    b.target_sum = m.exp_sum();
    std::vector<muntz::Term> all = b.target_sum.terms();
    for (const auto* p : pts) {
      const auto& q = std::get<muntz::MuntzPolynomial<T>>(*p);
      require(q.ladder() == m.ladder(), ErrorCode::MixedSpaces, "polynomials on different ladders");
      b.point_sums.push_back(q.exp_sum());
      for (const auto& t : b.point_sums.back().terms()) all.push_back({t.lambda, 1.0});
    }
    b.cuts = muntz::detail::scale_grid(muntz::ExpSum(std::move(all)), 0.0, muntz::kInf, 1.25);
  }
  return b;
}

/// Cutting-plane LP over one or two residual blocks combined by N.
template <Scalar T>
HullResult<T> cutting_plane(std::vector<ResidualBlock> blocks, const sums::AbsoluteNorm* norm, std::size_t n,
                            double tol, std::size_t max_iterations = 400) {
  std::vector<std::pair<double, double>> norm_cuts;
  if (norm && norm->kind() == sums::NormKind::Lp && !norm->is_l1() && !norm->is_linf())
    for (int i = 0; i <= 16; ++i) {
      const auto [a, b] = norm->sphere_point(1.5707963267948966 * i / 16);
      norm_cuts.push_back(norm->subgradient(a, b));
    }

  HullResult<T> best;
  best.method = "cutting_plane";
  best.lower = 0;
  best.upper = muntz::kInf;
  std::vector<double> best_lam;
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    LinearProgram<double> lp;
    for (std::size_t j = 0; j < n; ++j) lp.add_variable();
    std::vector<std::size_t> a_vars;
    for (std::size_t k = 0; k < blocks.size(); ++k) a_vars.push_back(lp.add_variable(blocks.size() == 1 ? 1.0 : 0.0));
    std::vector<std::pair<std::size_t, double>> sum;
    for (std::size_t j = 0; j < n; ++j) sum.emplace_back(j, 1.0);
    lp.add_row(sum, RowSense::Equal, 1.0);
    for (std::size_t k = 0; k < blocks.size(); ++k) blocks[k].add_rows(lp, n, a_vars[k]);
    if (blocks.size() == 2) {
      const std::size_t t = lp.add_variable(1.0);
      auto cut = [&](double ga, double gb) {
        lp.add_row({{t, 1.0}, {a_vars[0], -ga}, {a_vars[1], -gb}}, RowSense::GreaterEqual, 0.0);
      };
      if (norm->kind() == sums::NormKind::Polygonal) {
        for (const auto& [na, nb] : norm->facet_normals()) cut(to_double(na), to_double(nb));
      } else if (norm->is_l1()) {
        cut(1, 1);
      } else if (norm->is_linf()) {
        cut(1, 0);
        cut(0, 1);
      } else {
        for (const auto& [ga, gb] : norm_cuts) cut(ga, gb);
      }
    }
    const auto sol = lp.minimize();
    require(sol.optimal(), ErrorCode::VerificationFailed, "hull LP did not reach an optimum");
    std::vector<double> lam(sol.values.begin(), sol.values.begin() + static_cast<std::ptrdiff_t>(n));
    for (auto& l : lam) l = std::max(l, 0.0);
    double total = 0;
    for (double l : lam) total += l;
    for (auto& l : lam) l /= total;

    best.lower = std::max(best.lower, sol.objective);
    std::vector<double> norms;
    bool added = false;
    for (auto& b : blocks) {
      const auto [nv, u] = b.true_norm(lam, tol);
      norms.push_back(nv);
      if (b.kind == ResidualBlock::Kind::Exp &&
          std::none_of(b.cuts.begin(), b.cuts.end(), [u = u](double c) { return c == u; })) {
        b.cuts.push_back(u);
        added = true;
      }
    }
    const double upper = blocks.size() == 1 ? norms[0] : (*norm)(norms[0], norms[1]);
    if (upper < best.upper) {
      best.upper = upper;
      best_lam = lam;
    }
    best.iterations = it;
    if (blocks.size() == 2 && !norm_cuts.empty()) {
      const double av = sol.values[a_vars[0]], bv = sol.values[a_vars[1]];
      norm_cuts.push_back(norm->subgradient(av, bv));
      added = true;
    }
    if (best.upper - best.lower <= tol || !added) break;
  }
  best.converged = best.upper - best.lower <= tol;
  best.distance = from_double<T>(best.upper);
  for (double l : best_lam) best.weights.push_back(from_double<T>(l));
  return best;
}

}  // namespace detail

template <Scalar T>
HullResult<T> hull_distance(const muntz::MuntzPolynomial<T>& target, const std::vector<muntz::MuntzPolynomial<T>>& points,
                            double tol = 1e-9) {
  require(!points.empty(), ErrorCode::EmptyInput, "hull of an empty point list");
  const Component<T> t = target;
  std::vector<Component<T>> comps(points.begin(), points.end());
  std::vector<const Component<T>*> ptrs;
  for (const auto& c : comps) ptrs.push_back(&c);
  return detail::cutting_plane<T>({detail::make_block<T>(t, ptrs)}, nullptr, points.size(), tol);
}

template <Scalar T>
HullResult<T> hull_distance(const SumPoint<T>& target, const std::vector<SumPoint<T>>& points, double tol = 1e-9) {
  require(!points.empty(), ErrorCode::EmptyInput, "hull of an empty point list");
  std::vector<const Component<T>*> xs, ys;
  for (const auto& p : points) {
    require(p.norm_rule.describe() == target.norm_rule.describe(), ErrorCode::MixedSpaces, "sum points with different norms");
    xs.push_back(&p.x);
    ys.push_back(&p.y);
  }
  std::vector<detail::ResidualBlock> blocks{detail::make_block<T>(target.x, xs), detail::make_block<T>(target.y, ys)};
  return detail::cutting_plane<T>(std::move(blocks), &target.norm_rule, points.size(), tol);
}

/// Dispatches on the space tag; all points must share it.
template <Scalar T>
HullResult<T> hull_distance(const SpacePoint<T>& target, const std::vector<SpacePoint<T>>& points, double tol = 1e-9) {
  require(!points.empty(), ErrorCode::EmptyInput, "hull of an empty point list");
  for (const auto& p : points)
    require(p.index() == target.index(), ErrorCode::MixedSpaces,
            std::string("mixed space tags ") + std::string(to_string(tag_of(target))) + " and " +
                std::string(to_string(tag_of(p))));
  return std::visit(
      [&](const auto& t) -> HullResult<T> {
        using P = std::decay_t<decltype(t)>;
        std::vector<P> pts;
        for (const auto& p : points) pts.push_back(std::get<P>(p));
        if constexpr (std::is_same_v<P, l1::StepFunction<T>> || std::is_same_v<P, ck::TailSequence<T>>) {
          return hull_distance(t, pts);
        } else {
          return hull_distance(t, pts, tol);
        }
      },
      target);
}

}  // namespace delta_lab
