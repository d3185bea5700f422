#pragma once

// Daugavet and Delta points of c = C([0, omega]), l-infinity^n and c0.
// Sequence indices in reports are 1-based; storage is 0-based.

#include "delta_lab/ck/tail_sequence.hpp"
#include "delta_lab/core/operator_norm.hpp"
#include "delta_lab/core/space_point.hpp"
#include "delta_lab/lp.hpp"

#include <string>
#include <vector>

namespace delta_lab::ck {

template <Scalar T>
void require_unit(const TailSequence<T>& f) {
  require(abs_of(T(f.norm() - T(1))) <= slack<T>(), ErrorCode::NotUnitNorm,
          "||f|| = " + std::to_string(to_double(f.norm())) + " is not 1");
}

template <Scalar T>
struct SequenceRefutation {
  std::vector<std::size_t> H;  // 0-based prefix indices with |f| = 1
  SequenceDual<T> mu;
  T delta{};
  T bound{};
  T exact_norm{};

  Rank1Operator<T> projection(const TailSequence<T>& f) const { return {mu, f}; }
};

/// P = mu (x) f with mu = (1/|H|) sum sign(f_h) delta_h; ||Id - P|| <= 2 - min{delta, 2/|H|}.
template <Scalar T>
SequenceRefutation<T> refute_delta_ck(const TailSequence<T>& f) {
  require_unit(f);
  if (f.has_limit())
    require(!has_unit_magnitude(f.limit()), ErrorCode::IsDaugavetPoint, "|lim f| = 1: f is a Daugavet point");
  SequenceRefutation<T> r;
  T rest = f.has_limit() ? abs_of(f.limit()) : T(0);
  for (std::size_t k = 0; k < f.length(); ++k) {
    if (has_unit_magnitude(f.at(k))) {
      r.H.push_back(k);
    } else {
      rest = max_of(rest, abs_of(f.at(k)));
    }
  }
  require(!r.H.empty(), ErrorCode::NonNormAttaining, "f attains its norm on no coordinate");
  const T h(static_cast<long>(r.H.size()));
  r.mu.variant = f.variant();
  r.mu.weights.assign(f.length(), T(0));
  for (auto k : r.H) r.mu.weights[k] = T(sign_of(f.at(k))) / h;
  r.delta = T(1) - rest;
  r.bound = T(2) - min_of(r.delta, T(T(2) / h));
  r.exact_norm = id_minus_rank1_norm(r.mu, f);
  require(r.exact_norm <= r.bound + slack<T>(1e-12), ErrorCode::VerificationFailed,
          "||Id - P|| exceeds 2 - min{delta, 2/|H|}");
  return r;
}

/// Daugavet (equivalently Delta) point iff |lim f| = 1; l-infinity^n has none.
template <Scalar T>
Certificate<T> is_daugavet_point_ck(const TailSequence<T>& f) {
  require_unit(f);
  Certificate<T> cert;
  if (f.variant() == SequenceVariant::C && has_unit_magnitude(f.limit())) {
    cert.verdict = Verdict::DaugavetYes;
    cert.log.push_back({{"check", "limit"}, {"abs_limit", 1}});
    return cert;
  }
  cert.verdict = Verdict::DaugavetNo;
  const auto r = refute_delta_ck(f);
  Refutation<T> ref;
  ref.projection = r.projection(f);
  ref.bound = r.bound;
  ref.exact_norm = r.exact_norm;
  ref.note = "H has " + std::to_string(r.H.size()) + " coordinate(s); ||Id - P|| < 2 so f is not a Delta point";
  cert.refutation = ref;
  cert.log.push_back({{"check", "limit"},
                      {"abs_limit", to_double(f.has_limit() ? abs_of(f.limit()) : T(0))},
                      {"delta", to_double(r.delta)},
                      {"bound", to_double(r.bound)},
                      {"exact_norm", to_double(r.exact_norm)}});
  return cert;
}

template <Scalar T>
struct SequenceWitness {
  std::vector<TailSequence<T>> members;
  std::vector<std::size_t> fresh;  // 0-based flipped coordinates
  T min_distance{};
  T average_error{};
};

/// g_i = g except -lim f at the i-th fresh coordinate beyond both prefixes.
template <Scalar T>
SequenceWitness<T> daugavet_witness_ck(const TailSequence<T>& f, const TailSequence<T>& g, const T& eps, std::size_t m) {
  require_unit(f);
  require(f.variant() == SequenceVariant::C && has_unit_magnitude(f.limit()), ErrorCode::NotDaugavetPoint,
          "|lim f| must be 1");
  require(g.variant() == f.variant(), ErrorCode::MixedSpaces, "f and g from different spaces");
  require(g.norm() <= T(1) + slack<T>(), ErrorCode::InvalidArgument, "g must lie in the unit ball");
  require(m >= 1, ErrorCode::InvalidArgument, "m must be at least 1");
  require(eps > T(0), ErrorCode::InvalidArgument, "eps must be positive");
  const std::size_t L = std::max(f.length(), g.length());
  SequenceWitness<T> w;
  TailSequence<T> sum = TailSequence<T>::constant(T(0));
  for (std::size_t i = 0; i < m; ++i) {
    w.fresh.push_back(L + i);
    w.members.push_back(g.with_value(L + i, T(-f.limit())));
    sum = sum + w.members.back();
  }
  w.min_distance = T(2);
  for (const auto& gi : w.members) w.min_distance = min_of(w.min_distance, distance(f, gi));
  w.average_error = distance(g, sum.scaled(T(1) / T(static_cast<long>(m))));
  require(w.min_distance >= T(2) - eps, ErrorCode::VerificationFailed, "member closer than 2 - eps to f");
  require(w.average_error <= T(2) / T(static_cast<long>(m)) + slack<T>(1e-12), ErrorCode::VerificationFailed,
          "average farther than 2/m from g");
  return w;
}

template <Scalar T>
struct SequenceDecomposition {
  std::size_t K = 0;  // 1-based first index of the rewritten tail
  T lambda{};
  TailSequence<T> plus;
  TailSequence<T> minus;
  T error{};  // ||f - (lambda f+ + (1 - lambda) f-)||
};

/// Ball point f = lambda f+ + (1 - lambda) f- up to eps, with f+- = f before K and +-1
/// from K on; both parts have |limit| = 1.
template <Scalar T>
SequenceDecomposition<T> convex_dld2p_decompose_ck(const TailSequence<T>& f, const T& eps) {
  require(f.norm() <= T(1) + slack<T>(), ErrorCode::InvalidArgument, "f must lie in the unit ball");
  require(f.variant() == SequenceVariant::C, ErrorCode::InvalidArgument, "decomposition needs the space c");
  require(eps > 0, ErrorCode::InvalidArgument, "eps must be positive");
  std::size_t k = f.length();
  while (k > 0 && abs_of(T(f.at(k - 1) - f.limit())) < eps) --k;
  std::vector<T> head(f.prefix().begin(), f.prefix().begin() + static_cast<std::ptrdiff_t>(k));
  SequenceDecomposition<T> d;
  d.K = k + 1;
  d.lambda = (T(1) + f.limit()) / T(2);
  d.plus = TailSequence<T>(head, T(1));
  d.minus = TailSequence<T>(head, T(-1));
  const auto rec = d.plus.scaled(d.lambda) + d.minus.scaled(T(1) - d.lambda);
  d.error = distance(f, rec);
  require(d.error < eps, ErrorCode::VerificationFailed, "reconstruction error not below eps");
  require(abs_of(T(d.plus.norm() - T(1))) <= slack<T>() && abs_of(T(d.minus.norm() - T(1))) <= slack<T>(),
          ErrorCode::VerificationFailed, "decomposition parts are not unit vectors");
  return d;
}

template <Scalar T>
struct C0Finding {
  Verdict verdict = Verdict::DeltaNo;
  T bound{};
  T exact_norm{};
};

/// Every unit c0 vector attains its norm on the prefix and is refuted.
template <Scalar T>
std::vector<C0Finding<T>> c0_delta_empty_check(const std::vector<TailSequence<T>>& points) {
  std::vector<C0Finding<T>> out;
  for (const auto& p : points) {
    require(p.variant() == SequenceVariant::C0, ErrorCode::InvalidArgument, "c0 check needs c0 points");
    const auto r = refute_delta_ck(p);
    out.push_back({Verdict::DeltaNo, r.bound, r.exact_norm});
  }
  return out;
}

template <Scalar T>
struct SequenceProjectionMin {
  T value{};
  SequenceDual<T> functional;
};

/// Smallest ||Id - w (x) f|| over w supported on the prefix and the limit
/// with w(f) = 1, by LP over the row-sum form.
template <Scalar T>
SequenceProjectionMin<T> min_projection_norm(const TailSequence<T>& f) {
  const std::size_t L = f.length();
  const bool lim = f.variant() == SequenceVariant::C;
  const bool fresh = f.has_limit();
  const std::size_t n = L + (lim ? 1 : 0);
  std::vector<T> x(n);
  for (std::size_t k = 0; k < L; ++k) x[k] = f.at(k);
  if (lim) x[L] = f.limit();
  LinearProgram<T> lp;
  const std::size_t gamma = lp.add_variable(T(1));
  const std::size_t S = lp.add_variable();
  std::vector<std::size_t> w(n), p(n), q(n);
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = lp.add_variable(T(0), true);
    p[k] = lp.add_variable();
    q[k] = lp.add_variable();
  }
  std::vector<std::pair<std::size_t, T>> norming, total{{S, T(1)}};
  for (std::size_t k = 0; k < n; ++k) {
    if (x[k] != 0) norming.emplace_back(w[k], x[k]);
    total.emplace_back(p[k], T(-1));
    lp.add_row({{p[k], T(1)}, {w[k], T(-1)}}, RowSense::GreaterEqual, T(0));
    lp.add_row({{p[k], T(1)}, {w[k], T(1)}}, RowSense::GreaterEqual, T(0));
    lp.add_row({{q[k], T(1)}, {w[k], x[k]}}, RowSense::GreaterEqual, T(1));
    lp.add_row({{q[k], T(1)}, {w[k], T(-x[k])}}, RowSense::GreaterEqual, T(-1));
    // gamma >= q_k + |x_k| (S - p_k)
    const T ax = abs_of(x[k]);
    lp.add_row({{gamma, T(1)}, {q[k], T(-1)}, {S, T(-ax)}, {p[k], ax}}, RowSense::GreaterEqual, T(0));
  }
  lp.add_row(total, RowSense::Equal, T(0));
  if (fresh) lp.add_row({{gamma, T(1)}, {S, T(-abs_of(f.limit()))}}, RowSense::GreaterEqual, T(1));
  require(!norming.empty(), ErrorCode::InvalidArgument, "f = 0 admits no norming functional");
  lp.add_row(norming, RowSense::Equal, T(1));
  const auto sol = lp.minimize();
  require(sol.optimal(), ErrorCode::VerificationFailed, "projection LP did not reach an optimum");
  SequenceProjectionMin<T> out;
  out.value = sol.objective;
  out.functional.variant = f.variant();
  for (std::size_t k = 0; k < L; ++k) out.functional.weights.push_back(sol.values[w[k]]);
  if (lim) out.functional.limit_weight = sol.values[w[L]];
  return out;
}

}  // namespace delta_lab::ck
