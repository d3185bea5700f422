#pragma once

// Space-tagged points, dual functionals, slices, rank-1 operators and
// certificates shared by every model.

#include "delta_lab/ck/tail_sequence.hpp"
#include "delta_lab/error.hpp"
#include "delta_lab/l1/measure.hpp"
#include "delta_lab/muntz/polynomial.hpp"
#include "delta_lab/numeric.hpp"
#include "delta_lab/sums/absolute_norm.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace delta_lab {

enum class SpaceTag { L1, CSeq, Muntz, Sum };

constexpr std::string_view to_string(SpaceTag t) {
  switch (t) {
    case SpaceTag::L1: return "L1";
    case SpaceTag::CSeq: return "C_SEQ";
    case SpaceTag::Muntz: return "MUNTZ";
    case SpaceTag::Sum: return "SUM";
  }
  return "?";
}

/// Two-sided enclosure of a norm. Polyhedral models have lower == upper.
struct NormBounds {
  double lower = 0;
  double upper = 0;

  double mid() const { return 0.5 * (lower + upper); }
};

/// One summand of a direct sum.
template <Scalar T>
using Component = std::variant<l1::StepFunction<T>, ck::TailSequence<T>, muntz::MuntzPolynomial<T>>;

template <Scalar T>
SpaceTag tag_of(const Component<T>& c) {
  return static_cast<SpaceTag>(c.index());
}

template <Scalar T>
NormBounds component_norm(const Component<T>& c, double tol = 1e-10) {
  return std::visit(
      [tol](const auto& p) -> NormBounds {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, muntz::MuntzPolynomial<T>>) {
          const auto e = p.sup_norm(tol);
          return {e.lower, e.upper};
        } else {
          const double n = to_double(p.norm());
          return {n, n};
        }
      },
      c);
}

template <Scalar T>
std::optional<T> exact_component_norm(const Component<T>& c) {
  if (const auto* f = std::get_if<l1::StepFunction<T>>(&c)) return f->norm();
  if (const auto* s = std::get_if<ck::TailSequence<T>>(&c)) return s->norm();
  return std::nullopt;
}

template <Scalar T>
Component<T> component_combine(const Component<T>& a, const Component<T>& b, const T& sb) {
  require(a.index() == b.index(), ErrorCode::MixedSpaces, "components from different spaces");
  return std::visit(
      [&](const auto& pa) -> Component<T> {
        using P = std::decay_t<decltype(pa)>;
        const auto& pb = std::get<P>(b);
        return pa + pb.scaled(sb);
      },
      a);
}

template <Scalar T>
Component<T> component_scaled(const Component<T>& a, const T& s) {
  return std::visit([&](const auto& p) -> Component<T> { return p.scaled(s); }, a);
}

/// Element (x, y) of X (+)_N Y with norm N(||x||, ||y||).
template <Scalar T>
struct SumPoint {
  Component<T> x;
  Component<T> y;
  sums::AbsoluteNorm norm_rule;

  NormBounds norm_bounds(double tol = 1e-10) const {
    const NormBounds a = component_norm(x, tol), b = component_norm(y, tol);
    return {norm_rule(a.lower, b.lower), norm_rule(a.upper, b.upper)};
  }

  SumPoint scaled(const T& s) const { return {component_scaled(x, s), component_scaled(y, s), norm_rule}; }

  friend SumPoint operator-(const SumPoint& a, const SumPoint& b) {
    require(a.norm_rule.describe() == b.norm_rule.describe(), ErrorCode::MixedSpaces, "sum points with different norms");
    return {component_combine(a.x, b.x, T(-1)), component_combine(a.y, b.y, T(-1)), a.norm_rule};
  }
  friend SumPoint operator+(const SumPoint& a, const SumPoint& b) {
    require(a.norm_rule.describe() == b.norm_rule.describe(), ErrorCode::MixedSpaces, "sum points with different norms");
    return {component_combine(a.x, b.x, T(1)), component_combine(a.y, b.y, T(1)), a.norm_rule};
  }
};

template <Scalar T>
using SpacePoint = std::variant<l1::StepFunction<T>, ck::TailSequence<T>, muntz::MuntzPolynomial<T>, SumPoint<T>>;

template <Scalar T>
SpaceTag tag_of(const SpacePoint<T>& p) {
  return static_cast<SpaceTag>(p.index());
}

template <Scalar T>
SpacePoint<T> to_point(const Component<T>& c) {
  return std::visit([](const auto& v) -> SpacePoint<T> { return v; }, c);
}

template <Scalar T>
NormBounds norm_bounds(const SpacePoint<T>& p, double tol = 1e-10) {
  if (const auto* s = std::get_if<SumPoint<T>>(&p)) return s->norm_bounds(tol);
  return std::visit(
      [tol](const auto& v) -> NormBounds {
        using P = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<P, SumPoint<T>>) {
          return {};
        } else {
          return component_norm<T>(Component<T>(v), tol);
        }
      },
      p);
}

/// Exact norm on polyhedral payloads; nullopt otherwise.
template <Scalar T>
std::optional<T> exact_norm(const SpacePoint<T>& p) {
  if (const auto* f = std::get_if<l1::StepFunction<T>>(&p)) return f->norm();
  if (const auto* s = std::get_if<ck::TailSequence<T>>(&p)) return s->norm();
  if (const auto* z = std::get_if<SumPoint<T>>(&p)) {
    if constexpr (is_exact_v<T>) {
      if (!z->norm_rule.exact_kind()) return std::nullopt;
      const auto a = exact_component_norm(z->x), b = exact_component_norm(z->y);
      if (a && b) return z->norm_rule.exact(*a, *b);
    } else {
      const auto a = exact_component_norm(z->x), b = exact_component_norm(z->y);
      if (a && b) return z->norm_rule(*a, *b);
    }
  }
  return std::nullopt;
}

template <Scalar T>
SpacePoint<T> point_difference(const SpacePoint<T>& a, const SpacePoint<T>& b) {
  require(a.index() == b.index(), ErrorCode::MixedSpaces,
          std::string("points from ") + std::string(to_string(tag_of(a))) + " and " + std::string(to_string(tag_of(b))));
  return std::visit(
      [&](const auto& pa) -> SpacePoint<T> {
        using P = std::decay_t<decltype(pa)>;
        return pa - std::get<P>(b);
      },
      a);
}

template <Scalar T>
SpacePoint<T> point_scaled(const SpacePoint<T>& a, const T& s) {
  return std::visit([&](const auto& p) -> SpacePoint<T> { return p.scaled(s); }, a);
}

/// Distance ||a - b|| as an enclosure.
template <Scalar T>
NormBounds distance_bounds(const SpacePoint<T>& a, const SpacePoint<T>& b, double tol = 1e-10) {
  return norm_bounds(point_difference(a, b), tol);
}

/// Finite signed combination of point evaluations on [0,1].
struct PointEvaluations {
  std::vector<std::pair<double, double>> terms;  // (t, weight)

  double dual_norm() const {
    double s = 0;
    for (const auto& [t, w] : terms) s += std::abs(w);
    return s;
  }
  friend bool operator==(const PointEvaluations&, const PointEvaluations&) = default;
};

template <Scalar T>
using Functional = std::variant<l1::DualStep<T>, ck::SequenceDual<T>, PointEvaluations>;

template <Scalar T>
T dual_norm(const Functional<T>& f) {
  return std::visit(
      [](const auto& d) -> T {
        if constexpr (std::is_same_v<std::decay_t<decltype(d)>, PointEvaluations>) {
          return from_double<T>(d.dual_norm());
        } else {
          return d.dual_norm();
        }
      },
      f);
}

template <Scalar T>
T evaluate(const Functional<T>& f, const SpacePoint<T>& p) {
  if (const auto* d = std::get_if<l1::DualStep<T>>(&f)) {
    const auto* s = std::get_if<l1::StepFunction<T>>(&p);
    require(s != nullptr, ErrorCode::MixedSpaces, "step functional applied to a non-L1 point");
    return (*d)(*s);
  }
  if (const auto* d = std::get_if<ck::SequenceDual<T>>(&f)) {
    const auto* s = std::get_if<ck::TailSequence<T>>(&p);
    require(s != nullptr, ErrorCode::MixedSpaces, "sequence functional applied to a non-sequence point");
    return (*d)(*s);
  }
  const auto& e = std::get<PointEvaluations>(f);
  if (const auto* m = std::get_if<muntz::MuntzPolynomial<T>>(&p)) {
    double s = 0;
    for (const auto& [t, w] : e.terms) s += w * (*m)(t);
    return from_double<T>(s);
  }
  if (const auto* s = std::get_if<ck::TailSequence<T>>(&p)) {
    // t = index (0-based) for t >= 0, t < 0 evaluates the limit.
    T v(0);
    for (const auto& [t, w] : e.terms)
      v += from_double<T>(w) * (t < 0 ? s->limit() : s->at(static_cast<std::size_t>(t)));
    return v;
  }
  fail(ErrorCode::MixedSpaces, "point evaluations need a Muntz or sequence point");
}

/// S(x*, eps) = { p in B_X : x*(p) > 1 - eps }.
template <Scalar T>
struct Slice {
  Functional<T> functional;
  T eps{};

  bool contains(const SpacePoint<T>& p, double tol = unit_tol) const {
    const NormBounds n = norm_bounds(p);
    if (n.lower > 1 + tol) return false;
    return evaluate(functional, p) > T(1) - eps;
  }
};

/// T = x* (x) direction.
template <Scalar T>
struct Rank1Operator {
  Functional<T> functional;
  SpacePoint<T> direction;

  SpacePoint<T> apply(const SpacePoint<T>& p) const { return point_scaled(direction, evaluate(functional, p)); }
  bool is_projection(double tol = 1e-12) const {
    return abs_of(T(evaluate(functional, direction) - T(1))) <= slack<T>(tol);
  }
};

enum class Verdict { DeltaYes, DeltaNo, DaugavetYes, DaugavetNo };

constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::DeltaYes: return "DELTA_YES";
    case Verdict::DeltaNo: return "DELTA_NO";
    case Verdict::DaugavetYes: return "DAUGAVET_YES";
    case Verdict::DaugavetNo: return "DAUGAVET_NO";
  }
  return "?";
}

template <Scalar T>
struct WitnessFamily {
  double eps = 0;
  std::optional<SpacePoint<T>> target;
  std::vector<std::pair<SpacePoint<T>, double>> members;  // (point, convex weight)
  double min_distance = 0;                                // re-evaluated min ||x - member||
  double average_error = 0;                               // re-evaluated ||target - sum w_i member_i||
};

template <Scalar T>
struct Refutation {
  std::optional<Functional<T>> functional;
  std::optional<Rank1Operator<T>> projection;
  T bound{};                    // claimed bound (norm ceiling or distance floor)
  std::optional<T> exact_norm;  // exact ||Id - P|| when computed
  std::string note;
};

template <Scalar T>
struct Certificate {
  Verdict verdict = Verdict::DeltaNo;
  std::vector<WitnessFamily<T>> witnesses;
  std::optional<Refutation<T>> refutation;
  nlohmann::ordered_json log = nlohmann::ordered_json::array();
};

}  // namespace delta_lab
