#pragma once

// Daugavet points, spikes, Bernstein estimates and decompositions in Muntz
// spaces M_0(Lambda). All norm claims rest on certified enclosures from
// sup_norm / extremum; nothing is returned unverified.

#include "delta_lab/core/hull.hpp"
#include "delta_lab/core/space_point.hpp"
#include "delta_lab/lp.hpp"
#include "delta_lab/muntz/exp_sum.hpp"
#include "delta_lab/muntz/ladder.hpp"
#include "delta_lab/muntz/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace delta_lab::muntz {

/// ||t^a - t^b|| for 0 < a < b, attained at u = ln(b/a)/(b - a).
inline double spike_norm(double a, double b) {
  require(0 < a && a < b, ErrorCode::InvalidArgument, "spike exponents must satisfy 0 < a < b");
  const double r = b / a;
  return std::exp(-std::log(r) / (r - 1)) * (1 - 1 / r);
}

struct Spike {
  Index k = 0;
  Index l = 0;
  double lambda_k = 0;
  double lambda_l = 0;
  double norm = 0;      // ||t^{lambda_k} - t^{lambda_l}||
  double peak_u = 0;    // f = 1 at t = e^{-peak_u}
  double tail_max = 0;  // certified sup of f over [0, 1 - eps]
  double min_value = 0; // certified lower bound of f on [0, 1]
  MuntzPolynomial<double> f;
};

namespace detail {

// Smallest ratio r = b/a with spike_norm > 1/2.
inline double half_norm_ratio() {
  double lo = 2, hi = 16;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (lo + hi);
    (spike_norm(1, m) > 0.5 ? hi : lo) = m;
  }
  return hi;
}

}  // namespace detail

/// Spike below `delta` on t <= e^{-u} (u = inf means only t = 0).
inline Spike spike_search_u(const ExponentLadder& ladder, double u, double delta) {
  require(u > 0, ErrorCode::InvalidArgument, "spike threshold must satisfy u > 0");
  require(delta > 0 && delta <= 1, ErrorCode::InvalidArgument, "delta must lie in (0, 1]");
  Spike s;
  s.k = std::isinf(u) ? Index(1) : ladder.first_index_above(std::log(2 / delta) / u);
  s.lambda_k = ladder.lambda(s.k);
  s.l = ladder.first_index_above(s.lambda_k * detail::half_norm_ratio(), s.k + 1);
  if (s.l - 1 > s.k && ladder.lambda(s.l - 1) > s.lambda_k && spike_norm(s.lambda_k, ladder.lambda(s.l - 1)) > 0.5) --s.l;
  while (!(spike_norm(s.lambda_k, ladder.lambda(s.l)) > 0.5)) s.l = ladder.first_index_above(ladder.lambda(s.l), s.l + 1);
  s.lambda_l = ladder.lambda(s.l);
  s.norm = spike_norm(s.lambda_k, s.lambda_l);
  s.peak_u = std::log(s.lambda_l / s.lambda_k) / (s.lambda_l - s.lambda_k);
  s.f = MuntzPolynomial<double>(ladder, {{s.k, 1 / s.norm}, {s.l, -1 / s.norm}});
  const ExpSum e = s.f.exp_sum();
  // c (t^a - t^b) with a < b and c > 0 is exactly 0 at both ends and positive between.
  const bool ordered = s.lambda_k < s.lambda_l && s.norm > 0;
  const double enclosed = extremum(e, 0.0, kInf, Goal::Min, 1e-12).lower;
  require(enclosed >= -1e-12, ErrorCode::VerificationFailed, "spike takes negative values");
  s.min_value = ordered ? 0.0 : enclosed;
  s.tail_max = std::isinf(u) ? 0.0 : extremum(e, u, kInf, Goal::Max, 1e-12).upper;
  require(s.tail_max < delta, ErrorCode::VerificationFailed, "spike exceeds delta on [0, 1 - eps]");
  return s;
}

/// f >= 0 with ||f|| = 1 = f(peak) and f < delta on [0, 1 - eps].
inline Spike spike_search(const ExponentLadder& ladder, double eps, double delta) {
  require(eps > 0 && eps <= 1, ErrorCode::InvalidArgument, "eps must lie in (0, 1]");
  return spike_search_u(ladder, eps >= 1 ? kInf : -std::log1p(-eps), delta);
}

template <Scalar T>
void require_unit(const MuntzPolynomial<T>& f) {
  const auto n = f.sup_norm();
  require(n.lower >= 1 - unit_tol && n.upper <= 1 + unit_tol, ErrorCode::NotUnitNorm,
          "||f|| in [" + std::to_string(n.lower) + ", " + std::to_string(n.upper) + "] is not 1");
}

/// Daugavet (equivalently Delta) point iff ||f|| = |f(1)|. Only M_0 ladders
/// with lambda_1 >= 1 are decided.
template <Scalar T>
Certificate<T> is_daugavet_point_muntz(const MuntzPolynomial<T>& f) {
  require(!f.ladder().includes_constant(), ErrorCode::Unsupported, "ladders with a constant term are not decided");
  require(f.ladder().lambda(1) >= 1, ErrorCode::InvalidArgument, "the characterization needs lambda_1 >= 1");
  require_unit(f);
  Certificate<T> cert;
  const double f1 = delta_lab::to_double(f.value_at_one());
  cert.verdict = std::abs(f1) >= 1 - unit_tol ? Verdict::DaugavetYes : Verdict::DaugavetNo;
  cert.log.push_back({{"check", "value_at_one"}, {"f1", f1}, {"norm_arg_t", f.sup_norm().arg_t}});
  if (cert.verdict == Verdict::DaugavetNo) {
    Refutation<T> r;
    r.bound = T(2);
    r.note = "|f(1)| < 1: the norm is attained inside (0, 1)";
    cert.refutation = r;
  }
  return cert;
}

struct MuntzWitness {
  std::size_t m = 0;
  std::vector<Spike> spikes;
  std::vector<MuntzPolynomial<double>> members;  // (1 + delta)^{-1} g_i
  double min_distance = 0;     // certified lower bound of min_i ||member_i - f||
  double average_error = 0;    // certified upper bound of ||g - mean(member_i)||
  double max_member_norm = 0;  // certified upper bound
};

/// m = ceil(2/delta) members g_i = g - (g(1) + 1) f_i scaled by (1 + delta)^{-1},
/// where f_1, ..., f_m are nested spikes near t = 1.
inline MuntzWitness daugavet_witness_muntz(const MuntzPolynomial<double>& f, const MuntzPolynomial<double>& g,
                                           double eps, double delta, double tol = 1e-8) {
  require(f.ladder() == g.ladder(), ErrorCode::MixedSpaces, "f and g on different ladders");
  require(delta > 0 && 3 * delta < eps, ErrorCode::InvalidArgument, "need 0 < 3 delta < eps");
  require_unit(f);
  require(g.sup_norm().upper <= 1 + tol, ErrorCode::InvalidArgument, "g must lie in the unit ball");
  const double f1 = f.value_at_one();
  require(std::abs(f1) >= 1 - unit_tol, ErrorCode::NotDaugavetPoint, "|f(1)| must be 1");
  const double sign = f1 > 0 ? 1 : -1;
  const auto F = f.scaled(sign);
  const auto G = g.scaled(sign);
  const double g1 = G.value_at_one();

  // Window [0, u1] in u where F > 1 - delta/2 and |G - G(1)| <= delta/2.
  std::vector<Term> shifted = G.exp_sum().terms();
  shifted.push_back({0.0, -g1});
  const ExpSum Gs(shifted), Fe = F.exp_sum();
  double u = 1;
  for (int i = 0;; ++i) {
    require(i < 200, ErrorCode::VerificationFailed, "no window near t = 1 found");
    if (extremum(Fe, 0, u, Goal::Min, 1e-12).lower >= 1 - delta / 2 &&
        extremum(Gs, 0, u, Goal::AbsMax, 1e-12).upper <= delta / 2)
      break;
    u /= 2;
  }

  MuntzWitness w;
  w.m = static_cast<std::size_t>(std::ceil(2 / delta - 1e-12));
  const double eta = delta / 4;
  for (std::size_t i = 0; i < w.m; ++i) {
    w.spikes.push_back(spike_search_u(f.ladder(), u, eta));
    const auto& s = w.spikes.back();
    // Below this u the spike stays under eta: f_i(u) <= (lambda_l - lambda_k) u / norm.
    u = eta * s.norm / (s.lambda_l - s.lambda_k);
  }
  const double c = g1 + 1;
  MuntzPolynomial<double> sum(f.ladder(), {});
  w.min_distance = kInf;
  for (const auto& s : w.spikes) {
    auto gi = (G - s.f.scaled(c)).scaled(sign / (1 + delta));
    if (gi.is_zero()) gi = MuntzPolynomial<double>(f.ladder(), {});
    w.min_distance = std::min(w.min_distance, (gi - f).sup_norm().lower);
    w.max_member_norm = std::max(w.max_member_norm, gi.sup_norm().upper);
    sum = sum + gi;
    w.members.push_back(std::move(gi));
  }
  w.average_error = (g - sum.scaled(1.0 / static_cast<double>(w.m))).sup_norm().upper;
  require(w.min_distance >= 2 - 3 * delta - tol, ErrorCode::VerificationFailed,
          "member closer than 2 - 3 delta to f: " + std::to_string(w.min_distance));
  require(w.average_error <= 3 * delta + tol, ErrorCode::VerificationFailed,
          "average farther than 3 delta from g: " + std::to_string(w.average_error));
  require(w.max_member_norm <= 1 + tol, ErrorCode::VerificationFailed,
          "member outside the unit ball: " + std::to_string(w.max_member_norm));
  return w;
}

struct BernsteinEstimate {
  double lower = 0;     // max over t* of p'(t*) / ||p|| at the LP optimizers (certified norm)
  double lp_value = 0;  // max LP value: grid-relaxed sup of p'(t*)
  double arg_t = 0;
  std::vector<double> coefficients;  // optimizer at arg_t, on lambda_1..lambda_M
};

/// Lower estimate of sup { ||p'||_{[0,s]} : ||p||_{[0,1]} <= 1 } over the first
/// M ladder terms, by one LP per t* in {k/grid_n <= s} and t* = s.
inline BernsteinEstimate bernstein_estimate(const ExponentLadder& ladder, std::size_t M, double s,
                                            std::size_t grid_n = 200) {
  require(M >= 1, ErrorCode::InvalidArgument, "need at least one ladder term");
  require(s > 0 && s < 1, ErrorCode::InvalidArgument, "s must lie in (0, 1)");
  require(grid_n >= M + 1, ErrorCode::InvalidArgument, "grid too coarse for the number of terms");
  std::vector<double> lam(M);
  for (std::size_t k = 0; k < M; ++k) lam[k] = ladder.lambda(Index(k + 1));
  std::vector<double> stars;
  for (std::size_t k = 0; k <= grid_n && static_cast<double>(k) / grid_n <= s; ++k)
    stars.push_back(static_cast<double>(k) / grid_n);
  if (stars.back() < s) stars.push_back(s);

  BernsteinEstimate best;
  for (double ts : stars) {
    LinearProgram<double> lp;
    for (std::size_t k = 0; k < M; ++k) lp.add_variable(lam[k] * std::pow(ts, lam[k] - 1), true);
    for (std::size_t j = 0; j <= grid_n; ++j) {
      const double tj = static_cast<double>(j) / grid_n;
      std::vector<std::pair<std::size_t, double>> row;
      for (std::size_t k = 0; k < M; ++k) row.emplace_back(k, std::pow(tj, lam[k]));
      lp.add_row(row, RowSense::LessEqual, 1);
      lp.add_row(row, RowSense::GreaterEqual, -1);
    }
    const auto sol = lp.maximize();
    require(sol.optimal(), ErrorCode::VerificationFailed, "Bernstein LP did not reach an optimum");
    std::vector<std::pair<Index, double>> terms;
    for (std::size_t k = 0; k < M; ++k) terms.emplace_back(Index(k + 1), sol.values[k]);
    const MuntzPolynomial<double> p(ladder, terms);
    const double ratio = p.is_zero() ? 0.0 : sol.objective / p.sup_norm().upper;
    best.lp_value = std::max(best.lp_value, sol.objective);
    if (ratio > best.lower) {
      best.lower = ratio;
      best.arg_t = ts;
      best.coefficients.assign(sol.values.begin(), sol.values.begin() + static_cast<std::ptrdiff_t>(M));
    }
  }
  return best;
}

struct PeakSet {
  std::vector<double> peaks_t;  // norm-attaining points of |f|
  std::vector<int> signs;       // sign of f there
  double radius = 0;            // half-width of the peak windows
  double off_peak_max = 0;      // certified sup of |f| outside the windows
  double eps_threshold = 0;     // min{1/(2m), 1 - off_peak_max, 1/4}
};

inline PeakSet peak_set(const MuntzPolynomial<double>& f, double radius = 0.1, double min_separation = 1e-4) {
  const ExpSum e = f.exp_sum();
  const auto norm = f.sup_norm();
  std::vector<double> cand{1.0};
  for (const auto& br : isolate_roots(e.critical_sum()).brackets) cand.push_back(t_of_u(br.mid()));
  cand.push_back(norm.arg_t);
  std::sort(cand.begin(), cand.end());
  PeakSet ps;
  for (double t : cand) {
    if (std::abs(e.at_t(t)) < norm.lower - 1e-9) continue;
    if (!ps.peaks_t.empty() && t - ps.peaks_t.back() < min_separation) continue;
    ps.peaks_t.push_back(t);
    ps.signs.push_back(e.at_t(t) > 0 ? 1 : -1);
  }
  require(!ps.peaks_t.empty(), ErrorCode::VerificationFailed, "no norm-attaining point isolated");
  ps.radius = radius;
  for (std::size_t i = 1; i < ps.peaks_t.size(); ++i)
    ps.radius = std::min(ps.radius, (ps.peaks_t[i] - ps.peaks_t[i - 1]) / 4);
  double lo = 0;
  for (double y : ps.peaks_t) {
    const double a = std::max(0.0, y - ps.radius);
    if (a > lo) ps.off_peak_max = std::max(ps.off_peak_max, extremum_t(e, lo, a, Goal::AbsMax, 1e-12).upper);
    lo = std::min(1.0, y + ps.radius);
  }
  if (lo < 1) ps.off_peak_max = std::max(ps.off_peak_max, extremum_t(e, lo, 1, Goal::AbsMax, 1e-12).upper);
  ps.eps_threshold = std::min({1.0 / (2.0 * static_cast<double>(ps.peaks_t.size())), 1 - ps.off_peak_max, 0.25});
  return ps;
}

struct CandidateCheck {
  bool skipped = false;
  std::string note;
  std::size_t peak = 0;       // index into PeakSet::peaks_t
  double far_distance = 0;    // certified lower bound of ||f - p||
  double gap = 0;             // |f(y_k) - p(y_k)|
  bool separated = false;     // gap > 1
};

struct SeparationReport {
  PeakSet peaks;
  std::vector<CandidateCheck> candidates;
  std::size_t kept = 0;
  double hull_lower = 0;  // lower bound on the distance from f to co(kept)
  bool hull_exceeds_eps = false;
  bool all_separated = false;
};

/// Far points of a non-Daugavet f sit below -f(y_k) by more than 1 at some
/// peak y_k; pigeonhole then keeps f at distance > eps from their hull.
inline SeparationReport separation_check_muntz(const MuntzPolynomial<double>& f,
                                               const std::vector<MuntzPolynomial<double>>& candidates, double eps,
                                               double tol = 1e-9) {
  require_unit(f);
  require(std::abs(f.value_at_one()) < 1 - unit_tol, ErrorCode::IsDaugavetPoint, "|f(1)| = 1: f is a Daugavet point");
  SeparationReport rep;
  rep.peaks = peak_set(f);
  require(eps > 0 && eps < rep.peaks.eps_threshold, ErrorCode::BoundVoid,
          "eps must lie below " + std::to_string(rep.peaks.eps_threshold));
  std::vector<MuntzPolynomial<double>> kept;
  rep.all_separated = true;
  for (const auto& p : candidates) {
    CandidateCheck c;
    const auto diff = (f - p).sup_norm();
    c.far_distance = diff.lower;
    if (p.sup_norm().upper > 1 + tol) {
      c.skipped = true;
      c.note = "outside the unit ball";
    } else if (diff.lower < 2 - eps) {
      c.skipped = true;
      c.note = "not eps-far from f";
    }
    if (c.skipped) {
      rep.candidates.push_back(c);
      continue;
    }
    const double x = diff.arg_t;
    std::size_t k = 0;
    for (std::size_t i = 1; i < rep.peaks.peaks_t.size(); ++i)
      if (std::abs(rep.peaks.peaks_t[i] - x) < std::abs(rep.peaks.peaks_t[k] - x)) k = i;
    c.peak = k;
    const double y = rep.peaks.peaks_t[k];
    c.gap = std::abs(f(y) - p(y));
    c.separated = std::abs(y - x) <= rep.peaks.radius && c.gap > 1;
    if (!c.separated) c.note = "far point not separated at a peak";
    rep.all_separated = rep.all_separated && c.separated;
    kept.push_back(p);
    rep.candidates.push_back(c);
  }
  rep.kept = kept.size();
  if (!kept.empty()) {
    rep.hull_lower = hull_distance(f, kept, 1e-6).lower;
    rep.hull_exceeds_eps = rep.hull_lower > eps;
  }
  return rep;
}

/// Points -(1 - theta) f + theta q with theta <= eps/2 and unit q: each is
/// at least 2 - eps from f at a peak of f.
inline std::vector<MuntzPolynomial<double>> far_candidates_muntz(const MuntzPolynomial<double>& f, double eps,
                                                                 std::size_t count, std::uint64_t seed) {
  std::vector<MuntzPolynomial<double>> out{f.scaled(-1)};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1, 1), theta(0, eps / 2);
  std::uniform_int_distribution<int> idx(1, 4), nterms(1, 3);
  while (out.size() < count) {
    std::vector<std::pair<Index, double>> terms;
    for (int i = nterms(rng); i > 0; --i) terms.emplace_back(Index(idx(rng)), coef(rng));
    MuntzPolynomial<double> q(f.ladder(), terms);
    if (q.is_zero()) continue;
    q = q.scaled(1 / q.sup_norm().upper);
    const double th = theta(rng);
    out.push_back(f.scaled(-(1 - th)) + q.scaled(th));
  }
  return out;
}

template <Scalar T>
struct MuntzDecomposition {
  T mu{};
  MuntzPolynomial<T> plus;
  MuntzPolynomial<T> minus;
  Index n = 0;       // ladder index of the added monomial
  Index N = 0;       // first index allowed by t0^{lambda_N} < s/2
  double s = 0;      // norm deficit 1 - ||f||
  double t0 = 0;     // beyond t0, f' and f'' keep their signs
  NormEnclosure plus_norm;
  NormEnclosure minus_norm;
};

/// f = mu f+ + (1 - mu) f- with f+- = f +- (1 -+ f(1)) t^{lambda_n},
/// mu = (f(1) + 1)/2; n is the first index past f's terms and N with both
/// certified norms <= 1 + 1e-9.
template <Scalar T>
MuntzDecomposition<T> convex_dld2p_decompose_muntz(const MuntzPolynomial<T>& f, std::size_t cap = 100000) {
  const auto& ladder = f.ladder();
  require(ladder.lambda(1) >= 1, ErrorCode::InvalidArgument, "decomposition needs lambda_1 >= 1");
  require(f.coefficient(Index(0)) == 0, ErrorCode::Unsupported, "constant terms are not supported");
  MuntzDecomposition<T> d;
  const auto norm = f.sup_norm();
  d.s = 1 - norm.upper;
  require(d.s > 0, ErrorCode::InvalidArgument, "need ||f|| < 1");

  std::vector<Term> d1, d2;
  for (const auto& [k, a] : f.terms()) {
    const double l = ladder.lambda(k), c = delta_lab::to_double(a);
    d1.push_back({l, c * l});
    d2.push_back({l, c * l * (l - 1)});
  }
  for (const auto* e : {&d1, &d2})
    for (const auto& br : isolate_roots(ExpSum(*e)).brackets) d.t0 = std::max(d.t0, t_of_u(br.a));
  d.N = d.t0 <= 0 ? Index(1) : ladder.first_index_above(std::log(d.s / 2) / std::log(d.t0));
  Index start = d.N;
  if (!f.terms().empty()) start = std::max(start, f.terms().rbegin()->first + 1);

  const T f1 = f.value_at_one();
  d.mu = (f1 + T(1)) / T(2);
  Index n = start;
  for (std::size_t it = 0; it < cap; ++it, ++n) {
    const auto mono = MuntzPolynomial<T>::monomial(ladder, n);
    auto plus = f + mono.scaled(T(1) - f1);
    auto minus = f - mono.scaled(T(1) + f1);
    const auto pn = plus.sup_norm(), mn = minus.sup_norm();
    if (pn.certified && mn.certified && pn.upper <= 1 + 1e-9 && mn.upper <= 1 + 1e-9) {
      d.n = n;
      d.plus = std::move(plus);
      d.minus = std::move(minus);
      d.plus_norm = pn;
      d.minus_norm = mn;
      require(d.plus.scaled(d.mu) + d.minus.scaled(T(1) - d.mu) == f || !is_exact_v<T>, ErrorCode::VerificationFailed,
              "reconstruction is not exact");
      return d;
    }
  }
  fail(ErrorCode::SearchCapReached, "no admissible index up to " + (n - 1).str());
}

}  // namespace delta_lab::muntz
