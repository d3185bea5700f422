#pragma once

// Sequence models of C(K): c = C([0, omega]) as a finite prefix followed by a
// constant tail equal to the limit, c0 as the limit-zero subspace, and the
// finite-dimensional l-infinity^n with no limit coordinate at all.

#include "delta_lab/error.hpp"
#include "delta_lab/numeric.hpp"

#include <algorithm>
#include <cstddef>
#include <string_view>
#include <vector>

namespace delta_lab::ck {

enum class SequenceVariant { C, C0, LinfN };

constexpr std::string_view to_string(SequenceVariant v) {
  switch (v) {
    case SequenceVariant::C: return "C";
    case SequenceVariant::C0: return "C0";
    case SequenceVariant::LinfN: return "LINF_N";
  }
  return "?";
}

template <Scalar T>
class TailSequence {
 public:
  TailSequence() = default;

  TailSequence(std::vector<T> prefix, T limit, SequenceVariant variant = SequenceVariant::C)
      : prefix_(std::move(prefix)), limit_(std::move(limit)), variant_(variant) {
    if (variant_ == SequenceVariant::C0)
      require(limit_ == 0, ErrorCode::InvalidArgument, "c0 sequences have limit 0");
    if (variant_ == SequenceVariant::LinfN) limit_ = T(0);
  }

  static TailSequence c0(std::vector<T> prefix) { return TailSequence(std::move(prefix), T(0), SequenceVariant::C0); }
  static TailSequence linf(std::vector<T> values) {
    return TailSequence(std::move(values), T(0), SequenceVariant::LinfN);
  }
  static TailSequence constant(T value, SequenceVariant v = SequenceVariant::C) { return TailSequence({}, value, v); }

  const std::vector<T>& prefix() const { return prefix_; }
  const T& limit() const { return limit_; }
  SequenceVariant variant() const { return variant_; }
  bool has_limit() const { return variant_ != SequenceVariant::LinfN; }
  std::size_t length() const { return prefix_.size(); }

  /// Value at 0-based index k; indices past the prefix carry the limit.
  T at(std::size_t k) const {
    if (k < prefix_.size()) return prefix_[k];
    require(has_limit(), ErrorCode::InvalidArgument, "index past the end of an l-infinity^n vector");
    return limit_;
  }

  T norm() const {
    T m = has_limit() ? abs_of(limit_) : T(0);
    for (const auto& x : prefix_) m = max_of(m, abs_of(x));
    return m;
  }

  /// Same element with the prefix materialized up to `length` coordinates.
  TailSequence extended(std::size_t length) const {
    if (length <= prefix_.size()) return *this;
    require(has_limit(), ErrorCode::InvalidArgument, "cannot extend an l-infinity^n vector");
    auto p = prefix_;
    p.resize(length, limit_);
    return TailSequence(std::move(p), limit_, variant_);
  }

  TailSequence with_value(std::size_t k, T value) const {
    auto e = extended(k + 1);
    e.prefix_.at(k) = std::move(value);
    return e;
  }

  TailSequence with_limit(T limit) const { return TailSequence(prefix_, std::move(limit), variant_); }

  TailSequence scaled(const T& s) const {
    auto p = prefix_;
    for (auto& x : p) x *= s;
    return TailSequence(std::move(p), limit_ * s, variant_);
  }

  friend TailSequence operator-(const TailSequence& a, const TailSequence& b) { return combine(a, b, T(-1)); }
  friend TailSequence operator+(const TailSequence& a, const TailSequence& b) { return combine(a, b, T(1)); }

  /// Equality as elements of the space (prefix padding is immaterial).
  friend bool operator==(const TailSequence& a, const TailSequence& b) {
    if (a.variant_ != b.variant_) return false;
    if (a.has_limit() && a.limit_ != b.limit_) return false;
    if (!a.has_limit() && a.prefix_.size() != b.prefix_.size()) return false;
    const std::size_t n = std::max(a.length(), b.length());
    for (std::size_t k = 0; k < n; ++k)
      if (a.at(k) != b.at(k)) return false;
    return true;
  }

 private:
  static TailSequence combine(const TailSequence& a, const TailSequence& b, const T& sb) {
    require(a.variant_ == b.variant_, ErrorCode::MixedSpaces, "sequences from different spaces");
    if (!a.has_limit())
      require(a.length() == b.length(), ErrorCode::MixedSpaces, "l-infinity^n vectors of different dimension");
    const std::size_t n = std::max(a.length(), b.length());
    std::vector<T> p(n);
    for (std::size_t k = 0; k < n; ++k) p[k] = a.at(k) + sb * b.at(k);
    return TailSequence(std::move(p), a.limit_ + sb * b.limit_, a.variant_);
  }

  std::vector<T> prefix_;
  T limit_{};
  SequenceVariant variant_ = SequenceVariant::C;
};

template <Scalar T>
T distance(const TailSequence<T>& a, const TailSequence<T>& b) {
  return (a - b).norm();
}

/// Element of c* = l1 (+) lim: x*(f) = sum w_k f_k + w_lim lim f.
template <Scalar T>
struct SequenceDual {
  std::vector<T> weights;
  T limit_weight{};
  SequenceVariant variant = SequenceVariant::C;

  T operator()(const TailSequence<T>& f) const {
    T s = f.has_limit() ? T(limit_weight * f.limit()) : T(0);
    for (std::size_t k = 0; k < weights.size(); ++k) s += weights[k] * f.at(k);
    return s;
  }

  T dual_norm() const {
    T s = abs_of(limit_weight);
    for (const auto& w : weights) s += abs_of(w);
    return s;
  }

  friend bool operator==(const SequenceDual&, const SequenceDual&) = default;
};

}  // namespace delta_lab::ck
