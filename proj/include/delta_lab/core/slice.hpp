#pragma once

// Slice geometry: exact vertex sets of slices of polyhedral balls, slice
// diameters, and the slice form of the Delta-point test.

#include "delta_lab/core/space_point.hpp"
#include "delta_lab/lp.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace delta_lab {

/// Points spanning the closure of a slice of a polyhedral ball: ball vertices
/// inside the half-space plus crossings of ball edges with its boundary.
template <Scalar T>
struct SliceVertices {
  std::vector<SpacePoint<T>> points;
  std::vector<T> values;  // functional value at each point
  // L1: the refined model and parent map the points live on.
  std::optional<l1::MeasureModel<T>> refined;
  std::vector<std::size_t> parent;
  // C_SEQ: frame length (prefix coordinates before the fresh one).
  std::size_t frame_length = 0;
};

namespace detail {

template <Scalar T, class Point>
void add_crossings(std::vector<Point>& pts, std::vector<T>& vals, const std::vector<Point>& verts,
                   const std::vector<T>& vv, const T& level, auto adjacent, auto combine) {
  for (std::size_t i = 0; i < verts.size(); ++i) {
    if (vv[i] < level) continue;
    pts.push_back(verts[i]);
    vals.push_back(vv[i]);
  }
  for (std::size_t i = 0; i < verts.size(); ++i) {
    if (!(vv[i] > level)) continue;
    for (std::size_t j = 0; j < verts.size(); ++j) {
      if (!(vv[j] < level) || !adjacent(i, j)) continue;
      const T t = (level - vv[j]) / (vv[i] - vv[j]);
      pts.push_back(combine(verts[i], verts[j], t));
      vals.push_back(level);
    }
  }
}

}  // namespace detail

/// Nonatomic cells are split into 4 equal pieces: a diameter or distance
/// maximum needs at most 4 disjoint subsets of any one cell.
template <Scalar T>
SliceVertices<T> slice_vertices(const l1::DualStep<T>& a, const T& eps) {
  SliceVertices<T> out;
  out.refined = l1::refine_all_nonatomic(a.model, 4, &out.parent);
  const auto ra = l1::lift_to(a, *out.refined, out.parent);
  const T level = T(1) - eps;
  std::vector<l1::StepFunction<T>> verts, pts;
  std::vector<T> vv;
  for (std::size_t c = 0; c < out.refined->size(); ++c)
    for (int s : {1, -1}) {
      verts.push_back(l1::StepFunction<T>::normalized_indicator(*out.refined, c, s));
      vv.push_back(T(s) * ra.coefficients[c]);
    }
  T top = vv.empty() ? T(0) : vv[0];
  for (const auto& v : vv) top = max_of(top, v);
  require(top > level, ErrorCode::EmptySlice, "no point of the unit ball lies in the slice");
  // Non-antipodal pairs are edges; antipodal segments cross at interior points
  // (or at the slice's end in dimension one), which is harmless to include.
  auto adjacent = [](std::size_t i, std::size_t j) { return i != j; };
  auto combine = [](const l1::StepFunction<T>& p, const l1::StepFunction<T>& q, const T& t) {
    return p.scaled(t) + q.scaled(T(1) - t);
  };
  detail::add_crossings(pts, out.values, verts, vv, level, adjacent, combine);
  for (auto& p : pts) out.points.push_back(std::move(p));
  return out;
}

/// Frame: weights' coordinates, one fresh coordinate and the limit (variant C);
/// l-infinity^n has only its n coordinates; c0 has no limit coordinate.
template <Scalar T>
SliceVertices<T> slice_vertices(const ck::SequenceDual<T>& w, const T& eps, std::size_t min_length = 0) {
  SliceVertices<T> out;
  const bool linf = w.variant == ck::SequenceVariant::LinfN;
  const std::size_t len = std::max(w.weights.size(), min_length);
  const bool fresh = !linf;
  const bool limit = w.variant == ck::SequenceVariant::C;
  const std::size_t d = len + (fresh ? 1 : 0) + (limit ? 1 : 0);
  require(d <= 16, ErrorCode::SearchCapReached, "slice vertex enumeration limited to 16 coordinates");
  out.frame_length = len;
  std::vector<T> weights(d, T(0));
  for (std::size_t k = 0; k < w.weights.size(); ++k) weights[k] = w.weights[k];
  if (limit) weights[d - 1] = w.limit_weight;
  const T level = T(1) - eps;
  T top(0);
  for (const auto& x : weights) top += abs_of(x);
  require(top > level, ErrorCode::EmptySlice, "no point of the unit ball lies in the slice");

  auto make = [&](const std::vector<T>& g) {
    std::vector<T> prefix(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(len + (fresh ? 1 : 0)));
    if (linf) return ck::TailSequence<T>::linf(std::move(prefix));
    if (!limit) return ck::TailSequence<T>::c0(std::move(prefix));
    return ck::TailSequence<T>(std::move(prefix), g[d - 1], ck::SequenceVariant::C);
  };
  std::vector<std::vector<T>> verts;
  std::vector<T> vv;
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << d); ++mask) {
    std::vector<T> g(d);
    T v(0);
    for (std::size_t k = 0; k < d; ++k) {
      g[k] = (mask >> k) & 1 ? T(-1) : T(1);
      v += weights[k] * g[k];
    }
    verts.push_back(std::move(g));
    vv.push_back(v);
  }
  // Cube edges join vertices differing in exactly one coordinate.
  auto adjacent = [](std::size_t i, std::size_t j) {
    const auto x = static_cast<std::uint64_t>(i ^ j);
    return x != 0 && (x & (x - 1)) == 0;
  };
  auto combine = [](const std::vector<T>& p, const std::vector<T>& q, const T& t) {
    std::vector<T> r(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) r[k] = t * p[k] + (T(1) - t) * q[k];
    return r;
  };
  std::vector<std::vector<T>> pts;
  detail::add_crossings(pts, out.values, verts, vv, level, adjacent, combine);
  for (const auto& g : pts) out.points.push_back(make(g));
  return out;
}

/// Exact diameter of a c-model slice: the largest coordinate range over the
/// slice, each range found by LP.
template <Scalar T>
T sequence_slice_diameter(const ck::SequenceDual<T>& w, const T& eps) {
  const bool linf = w.variant == ck::SequenceVariant::LinfN;
  const bool limit = w.variant == ck::SequenceVariant::C;
  const std::size_t len = w.weights.size();
  const std::size_t d = len + (linf ? 0 : 1) + (limit ? 1 : 0);
  std::vector<T> weights(d, T(0));
  for (std::size_t k = 0; k < len; ++k) weights[k] = w.weights[k];
  if (limit) weights[d - 1] = w.limit_weight;
  T top(0);
  for (const auto& x : weights) top += abs_of(x);
  require(top > T(1) - eps, ErrorCode::EmptySlice, "no point of the unit ball lies in the slice");
  T best(0);
  for (std::size_t k = 0; k < d; ++k) {
    LinearProgram<T> lp;
    for (std::size_t j = 0; j < d; ++j) lp.add_variable(j == k ? T(1) : T(0), true);
    for (std::size_t j = 0; j < d; ++j) {
      lp.add_row({{j, T(1)}}, RowSense::LessEqual, T(1));
      lp.add_row({{j, T(1)}}, RowSense::GreaterEqual, T(-1));
    }
    std::vector<std::pair<std::size_t, T>> row;
    for (std::size_t j = 0; j < d; ++j)
      if (weights[j] != 0) row.emplace_back(j, weights[j]);
    lp.add_row(row, RowSense::GreaterEqual, T(1) - eps);
    const auto hi = lp.maximize(), lo = lp.minimize();
    require(hi.optimal() && lo.optimal(), ErrorCode::VerificationFailed, "slice LP did not reach an optimum");
    best = max_of(best, T(hi.objective - lo.objective));
  }
  return best;
}

template <Scalar T>
T max_pairwise_distance(const std::vector<SpacePoint<T>>& pts) {
  T best(0);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const auto d = exact_norm(point_difference(pts[i], pts[j]));
      if (d) {
        best = max_of(best, *d);
      } else {
        best = max_of(best, from_double<T>(distance_bounds(pts[i], pts[j]).lower));
      }
    }
  return best;
}

/// Exact mode (polyhedral models): the true diameter. Sampled mode: a lower
/// bound from the candidates that lie in the slice.
template <Scalar T>
T slice_diameter(const Slice<T>& slice, bool exact, const std::vector<SpacePoint<T>>& candidates = {}) {
  require(slice.eps > 0, ErrorCode::InvalidArgument, "slice eps must be positive");
  if (exact) {
    if (const auto* a = std::get_if<l1::DualStep<T>>(&slice.functional))
      return max_pairwise_distance(slice_vertices(*a, slice.eps).points);
    if (const auto* w = std::get_if<ck::SequenceDual<T>>(&slice.functional)) return sequence_slice_diameter(*w, slice.eps);
    fail(ErrorCode::NotPolyhedral, "exact slice diameter needs a polyhedral model");
  }
  std::vector<SpacePoint<T>> inside;
  for (const auto& p : candidates)
    if (slice.contains(p)) inside.push_back(p);
  require(!inside.empty(), ErrorCode::EmptySlice, "no sampled point lies in the slice");
  return max_pairwise_distance(inside);
}

enum class SliceStatus { Positive, Negative, NotFound };

constexpr std::string_view to_string(SliceStatus s) {
  switch (s) {
    case SliceStatus::Positive: return "POSITIVE";
    case SliceStatus::Negative: return "NEGATIVE";
    case SliceStatus::NotFound: return "NOT_FOUND";
  }
  return "?";
}

template <Scalar T>
struct SliceFinding {
  SliceStatus status = SliceStatus::NotFound;
  double best_distance = 0;            // sup of ||x - y|| over the searched set
  std::optional<SpacePoint<T>> witness;  // y in the open slice with ||x - y|| >= 2 - eps
};

namespace detail {

template <Scalar T>
SpacePoint<T> lift_for_slice(const SpacePoint<T>& x, const SliceVertices<T>& sv) {
  if (sv.refined) return l1::lift_to(std::get<l1::StepFunction<T>>(x), *sv.refined, sv.parent);
  return x;
}

}  // namespace detail

/// For each slice containing x, looks for y in the open slice with
/// ||x - y|| >= 2 - eps. Polyhedral models search the slice's vertex set, so
/// NEGATIVE is certified; other models search `candidates` (NOT_FOUND).
template <Scalar T>
std::vector<SliceFinding<T>> check_delta_via_slices(const SpacePoint<T>& x, const T& eps,
                                                    const std::vector<Slice<T>>& slices,
                                                    const std::vector<SpacePoint<T>>& candidates = {}) {
  const T target = T(2) - eps;
  std::vector<SliceFinding<T>> out;
  for (const auto& s : slices) {
    require(s.contains(x), ErrorCode::InvalidArgument, "slice does not contain x");
    SliceFinding<T> f;
    std::vector<SpacePoint<T>> pool;
    SpacePoint<T> xs = x;
    bool exact = false;
    if (const auto* a = std::get_if<l1::DualStep<T>>(&s.functional)) {
      const auto sv = slice_vertices(*a, s.eps);
      xs = detail::lift_for_slice(x, sv);
      pool = sv.points;
      exact = true;
    } else if (const auto* w = std::get_if<ck::SequenceDual<T>>(&s.functional)) {
      const auto& seq = std::get<ck::TailSequence<T>>(x);
      pool = slice_vertices(*w, s.eps, seq.length()).points;
      exact = true;
    } else {
      pool = candidates;
    }
    // ||x - y|| is convex in y, so its sup over the slice closure sits on the pool.
    T best(-1);
    std::optional<SpacePoint<T>> arg;
    for (const auto& y : pool) {
      if (!exact && !s.contains(y)) continue;
      const auto e = exact_norm(point_difference(xs, y));
      const T d = e ? *e : from_double<T>(distance_bounds(xs, y).lower);
      if (d > best) {
        best = d;
        arg = y;
      }
    }
    f.best_distance = to_double(best);
    if (arg && best >= target) {
      SpacePoint<T> y = *arg;
      if (!(evaluate(s.functional, y) > T(1) - s.eps)) {
        // On the slice boundary: pull toward x into the open slice.
        if (best > target) {
          T tau = (best - target) / (T(2) * best);
          if (tau > T(1) / T(2)) tau = T(1) / T(2);
          y = std::visit(
              [&](const auto& py) -> SpacePoint<T> {
                using P = std::decay_t<decltype(py)>;
                return py.scaled(T(1) - tau) + std::get<P>(xs).scaled(tau);
              },
              y);
        } else if (eps >= 2) {
          y = xs;
        } else {
          arg.reset();
        }
      }
      if (arg) {
        f.status = SliceStatus::Positive;
        f.witness = y;
      }
    }
    if (f.status != SliceStatus::Positive) f.status = exact ? SliceStatus::Negative : SliceStatus::NotFound;
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace delta_lab
