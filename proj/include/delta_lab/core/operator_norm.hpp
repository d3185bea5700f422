#pragma once

// Exact ||Id - x* (x) x|| on the polyhedral models.

#include "delta_lab/core/space_point.hpp"

#include <cstdint>

namespace delta_lab {

/// ||(Id - T)(s chi_B / mu(B))|| for B inside cell c, maximized over B.
/// Atoms force B = c; nonatomic cells let mu(B) -> 0.
template <Scalar T>
T l1_cell_row(const l1::DualStep<T>& a, const l1::StepFunction<T>& x, std::size_t c) {
  const T xn = x.norm();
  const T ac = abs_of(a.coefficients[c]);
  if (x.model().cell(c).kind == l1::CellKind::Nonatomic) return T(1) + ac * xn;
  const T m = x.model().cell(c).mass;
  return abs_of(T(T(1) - a.coefficients[c] * x.value(c) * m)) + ac * (xn - abs_of(x.value(c)) * m);
}

template <Scalar T>
T id_minus_rank1_norm(const l1::DualStep<T>& a, const l1::StepFunction<T>& x) {
  require(a.model == x.model(), ErrorCode::MixedSpaces, "functional and direction on different models");
  require(x.model().size() > 0, ErrorCode::EmptyInput, "empty measure model");
  T best(0);
  for (std::size_t c = 0; c < x.model().size(); ++c) best = max_of(best, l1_cell_row(a, x, c));
  return best;
}

namespace detail {

/// Coordinates of the truncated c-model used by the exact norm: prefix
/// 0..L-1, one fresh coordinate L (weight 0, value = limit), then the limit.
template <Scalar T>
struct SequenceFrame {
  std::size_t length = 0;
  bool fresh = false;
  bool limit = false;
  std::vector<T> x;  // direction on the frame
  std::vector<T> w;  // functional on the frame

  std::size_t size() const { return x.size(); }
};

template <Scalar T>
SequenceFrame<T> sequence_frame(const ck::SequenceDual<T>& w, const ck::TailSequence<T>& x) {
  SequenceFrame<T> f;
  if (!x.has_limit()) {
    require(w.weights.size() <= x.length(), ErrorCode::MixedSpaces, "functional longer than the l-infinity^n vector");
    require(w.limit_weight == 0, ErrorCode::InvalidArgument, "l-infinity^n has no limit functional");
  }
  f.length = x.has_limit() ? std::max(x.length(), w.weights.size()) : x.length();
  f.fresh = x.has_limit();
  f.limit = x.variant() == ck::SequenceVariant::C;
  for (std::size_t k = 0; k < f.length; ++k) {
    f.x.push_back(x.at(k));
    f.w.push_back(k < w.weights.size() ? w.weights[k] : T(0));
  }
  if (f.fresh) {
    f.x.push_back(x.limit());
    f.w.push_back(T(0));
  }
  if (f.limit) {
    f.x.push_back(x.limit());
    f.w.push_back(w.limit_weight);
  }
  return f;
}

}  // namespace detail

/// Max absolute row sum of Id - w (x) x on the frame (closed form).
template <Scalar T>
T id_minus_rank1_norm_rows(const ck::SequenceDual<T>& w, const ck::TailSequence<T>& x) {
  const auto f = detail::sequence_frame(w, x);
  T total(0);
  for (const auto& v : f.w) total += abs_of(v);
  T best(0);
  for (std::size_t k = 0; k < f.size(); ++k)
    best = max_of(best, T(abs_of(T(T(1) - f.x[k] * f.w[k])) + abs_of(f.x[k]) * (total - abs_of(f.w[k]))));
  return best;
}

/// Maximum of ||g - w(g) x|| over the extreme points of the frame's ball.
template <Scalar T>
T id_minus_rank1_norm_enumerated(const ck::SequenceDual<T>& w, const ck::TailSequence<T>& x) {
  const auto f = detail::sequence_frame(w, x);
  const std::size_t d = f.size();
  require(d <= 24, ErrorCode::SearchCapReached, "extreme-point enumeration limited to 24 coordinates");
  T best(0);
  std::vector<T> g(d);
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << d); ++mask) {
    T wg(0);
    for (std::size_t k = 0; k < d; ++k) {
      g[k] = (mask >> k) & 1 ? T(-1) : T(1);
      wg += f.w[k] * g[k];
    }
    T n(0);
    for (std::size_t k = 0; k < d; ++k) n = max_of(n, abs_of(T(g[k] - wg * f.x[k])));
    best = max_of(best, n);
  }
  return best;
}

template <Scalar T>
T id_minus_rank1_norm(const ck::SequenceDual<T>& w, const ck::TailSequence<T>& x) {
  const auto f = detail::sequence_frame(w, x);
  if (f.size() <= 16) return id_minus_rank1_norm_enumerated(w, x);
  return id_minus_rank1_norm_rows(w, x);
}

/// Exact operator norm on L1 and C_SEQ models; NOT_POLYHEDRAL otherwise.
template <Scalar T>
T id_minus_rank1_norm(const Rank1Operator<T>& op) {
  if (const auto* x = std::get_if<l1::StepFunction<T>>(&op.direction)) {
    const auto* a = std::get_if<l1::DualStep<T>>(&op.functional);
    require(a != nullptr, ErrorCode::MixedSpaces, "L1 direction needs a step functional");
    return id_minus_rank1_norm(*a, *x);
  }
  if (const auto* x = std::get_if<ck::TailSequence<T>>(&op.direction)) {
    const auto* w = std::get_if<ck::SequenceDual<T>>(&op.functional);
    require(w != nullptr, ErrorCode::MixedSpaces, "sequence direction needs a sequence functional");
    return id_minus_rank1_norm(*w, *x);
  }
  fail(ErrorCode::NotPolyhedral, std::string("no exact operator norm on ") + std::string(to_string(tag_of(op.direction))));
}

}  // namespace delta_lab
