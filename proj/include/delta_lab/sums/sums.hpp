#pragma once

// Direct sums X (+)_N Y: Dirichlet averaging, positive octahedrality,
// property (alpha), and Daugavet/Delta constructions and refutations.

#include "delta_lab/ck/ck.hpp"
#include "delta_lab/core/hull.hpp"
#include "delta_lab/core/space_point.hpp"
#include "delta_lab/l1/l1.hpp"
#include "delta_lab/muntz/muntz.hpp"
#include "delta_lab/sums/absolute_norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace delta_lab::sums {

enum class Tri { True, False, Undecided };

constexpr std::string_view to_string(Tri t) {
  switch (t) {
    case Tri::True: return "true";
    case Tri::False: return "false";
    case Tri::Undecided: return "undecided";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Dirichlet averaging

template <Scalar T>
struct DirichletResult {
  std::size_t n = 0;
  std::vector<std::size_t> k;
  T error{};  // sum |w_i - k_i/n|
};

namespace detail {

template <Scalar T>
std::size_t floor_count(const T& x) {
  if constexpr (is_exact_v<T>) {
    const boost::multiprecision::cpp_int q = numerator(x) / denominator(x);
    return q.convert_to<std::size_t>();
  } else {
    return static_cast<std::size_t>(std::floor(x));
  }
}

/// Largest-remainder rounding of n w to integers summing to n; ties go to
/// the smallest index.
template <Scalar T>
DirichletResult<T> round_to(const std::vector<T>& w, std::size_t n) {
  DirichletResult<T> r;
  r.n = n;
  const T nn(static_cast<long>(n));
  std::vector<T> rem(w.size());
  std::size_t used = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const T x = nn * w[i];
    r.k.push_back(floor_count(x));
    rem[i] = x - T(static_cast<long>(r.k[i]));
    used += r.k[i];
  }
  std::vector<std::size_t> order(w.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t j = 0; used < n; ++j, ++used) ++r.k[order[j % order.size()]];
  while (used > n) {  // floors of rounded-up doubles can overshoot by one
    auto it = std::max_element(r.k.begin(), r.k.end());
    --*it;
    --used;
  }
  r.error = T(0);
  for (std::size_t i = 0; i < w.size(); ++i) r.error += abs_of(T(w[i] - T(static_cast<long>(r.k[i])) / nn));
  return r;
}

}  // namespace detail

/// Smallest n (scanning upward) whose largest-remainder rounding of the
/// weights satisfies sum |w_i - k_i/n| < eps.
template <Scalar T>
DirichletResult<T> dirichlet_average(const std::vector<T>& w, const T& eps, std::size_t cap = 10000000) {
  require(!w.empty(), ErrorCode::EmptyInput, "no weights");
  require(eps > 0, ErrorCode::InvalidArgument, "eps must be positive");
  T total(0);
  for (const auto& x : w) {
    require(x > 0, ErrorCode::InvalidArgument, "weights must be positive");
    total += x;
  }
  require(abs_of(T(total - T(1))) <= slack<T>(), ErrorCode::InvalidArgument, "weights must sum to 1");
  for (std::size_t n = 1; n <= cap; ++n) {
    auto r = detail::round_to(w, n);
    if (r.error < eps) return r;
  }
  fail(ErrorCode::SearchCapReached, "no n up to " + std::to_string(cap));
}

// ---------------------------------------------------------------------------
// Positive octahedrality

struct OctahedralVerdict {
  Tri verdict = Tri::Undecided;
  bool exact = false;
  double a = 0, b = 0;                  // witness, or best grid point
  std::optional<Vertex> exact_witness;  // rational witness when exact
  double best_value = 0;                // max found of min{N(a+1,b), N(a,b+1)}
  double upper_bound = 0;               // certified bound on that max
  double gap = 0;                       // 2 - best_value
  std::string method;
};

namespace detail {

inline double oct_value(const AbsoluteNorm& N, double a, double b) { return std::min(N(a + 1, b), N(a, b + 1)); }

/// Max over consecutive quadrant sphere grid points of N(s_{j+1} - s_j).
inline double grid_chord(const AbsoluteNorm& N, const std::vector<std::pair<double, double>>& s) {
  double D = 0;
  for (std::size_t j = 0; j + 1 < s.size(); ++j)
    D = std::max(D, N(s[j + 1].first - s[j].first, s[j + 1].second - s[j].second));
  return D;
}

inline std::vector<std::pair<double, double>> sphere_grid(const AbsoluteNorm& N, std::size_t grid_n) {
  std::vector<std::pair<double, double>> s;
  for (std::size_t j = 0; j <= grid_n; ++j)
    s.push_back(N.sphere_point(std::numbers::pi / 2 * static_cast<double>(j) / static_cast<double>(grid_n)));
  return s;
}

}  // namespace detail

inline OctahedralVerdict is_positively_octahedral(const AbsoluteNorm& N, double tol = -1, std::size_t grid_n = 4096) {
  if (tol < 0) tol = N.exact_kind() ? 1e-9 : 1e-6;
  OctahedralVerdict v;
  auto exact_hit = [&](const Vertex& w, const std::string& method) {
    v.verdict = Tri::True;
    v.exact = true;
    v.exact_witness = w;
    v.a = to_double(w.first);
    v.b = to_double(w.second);
    v.best_value = v.upper_bound = 2;
    v.method = method;
  };
  if (N.is_l1()) {
    exact_hit({Rational(1), Rational(0)}, "exact");
    return v;
  }
  if (N.is_linf()) {
    exact_hit({Rational(1), Rational(1)}, "exact");
    return v;
  }
  if (N.kind() == NormKind::Polygonal) {
    // The sphere points s with N(s + e1) = 2 form a union of closed faces,
    // likewise for e2; a nonempty intersection contains a chain vertex.
    for (const auto& w : N.chain())
      if (N.exact(w.first + 1, w.second) == 2 && N.exact(w.first, w.second + 1) == 2) {
        exact_hit(w, "exact_vertices");
        return v;
      }
  }
  const auto s = detail::sphere_grid(N, grid_n);
  std::size_t best = 0;
  std::vector<double> F(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    F[j] = detail::oct_value(N, s[j].first, s[j].second);
    if (F[j] > F[best]) best = j;
  }
  v.a = s[best].first;
  v.b = s[best].second;
  v.best_value = F[best];
  // Golden-section refinement of the lower value around the best grid angle.
  const double h = std::numbers::pi / 2 / static_cast<double>(grid_n);
  double lo = std::max(0.0, h * (static_cast<double>(best) - 1)), hi = std::min(std::numbers::pi / 2, h * (static_cast<double>(best) + 1));
  const double g = (std::sqrt(5.0) - 1) / 2;
  auto val = [&](double th) {
    const auto p = N.sphere_point(th);
    return detail::oct_value(N, p.first, p.second);
  };
  for (int it = 0; it < 80; ++it) {
    const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    if (val(m1) < val(m2)) lo = m1;
    else hi = m2;
  }
  const double th = 0.5 * (lo + hi);
  if (val(th) > v.best_value) {
    v.best_value = val(th);
    std::tie(v.a, v.b) = N.sphere_point(th);
  }
  v.upper_bound = F[best] + detail::grid_chord(N, s);
  v.gap = 2 - v.best_value;
  if (N.kind() == NormKind::Polygonal) {
    v.verdict = Tri::False;
    v.exact = true;
    v.upper_bound = std::min(v.upper_bound, 2.0);
    v.method = "exact_vertices";
  } else if (v.best_value >= 2 - tol) {
    v.verdict = Tri::True;
    v.method = "grid";
  } else if (v.upper_bound < 2 - tol) {
    v.verdict = Tri::False;
    v.method = "grid_lipschitz";
  } else {
    v.method = "grid";
  }
  return v;
}

// ---------------------------------------------------------------------------
// Property (alpha)

/// For (c, d) on the sphere: every (a, b) >= 0 with N(a, b) <= 1 and
/// N((a,b) + (c,d)) >= 2 - eps lies in W, and the chosen coordinate stays
/// <= sup_coordinate = 1 - delta on W.
struct AlphaRecord {
  double c = 0, d = 0;
  int coordinate = 0;      // 0: a < 1 on W, 1: b < 1 on W
  std::string w_shape;     // "norm_ball" (N(p - (c,d)) < radius) or "half_plane" (coordinate < radius)
  double radius = 0;
  double sup_coordinate = 0;
  double delta = 0;
  double eps = 0;
  bool valid = false;
};

/// Strictly convex norms: W = norm ball of radius (1 - min(c,d))/2. eps
/// comes from a grid of rays with a chord margin, so it is a rigorous
/// lower bound up to floating-point rounding.
inline AlphaRecord alpha_record_ball(const AbsoluteNorm& N, double c, double d, std::size_t grid_n = 4096) {
  AlphaRecord r;
  r.c = c;
  r.d = d;
  r.w_shape = "norm_ball";
  r.coordinate = c <= d ? 0 : 1;
  const double cmin = std::min(c, d);
  r.radius = (1 - cmin) / 2;
  r.sup_coordinate = cmin + r.radius;
  r.delta = 1 - r.sup_coordinate;
  const auto s = detail::sphere_grid(N, grid_n);
  const double D = detail::grid_chord(N, s);
  const double thr = r.radius - D;
  double G = 0;
  for (const auto& [sa, sb] : s) {
    auto far = [&](double rho) { return N(rho * sa - c, rho * sb - d) >= thr; };
    double rho = 1;
    if (!far(1)) {
      double lo = 0, hi = 1;
      for (int it = 0; it < 60; ++it) {
        const double m = 0.5 * (lo + hi);
        (far(m) ? lo : hi) = m;
      }
      rho = hi;
    }
    G = std::max(G, N(rho * sa + c, rho * sb + d));
  }
  r.eps = 2 - G - D - 1e-12;
  r.valid = r.eps > 0 && r.delta > 0;
  return r;
}

/// Polygonal norms, exact: the far set near (c,d) is its star (the closed
/// faces through it). W is a half-plane cutting off the coordinate the star
/// keeps below 1.
inline AlphaRecord alpha_record_polygon(const AbsoluteNorm& N, const Vertex& cd) {
  require(N.kind() == NormKind::Polygonal, ErrorCode::InvalidArgument, "polygonal norm expected");
  AlphaRecord r;
  r.c = to_double(cd.first);
  r.d = to_double(cd.second);
  r.w_shape = "half_plane";
  const auto& ch = N.chain();
  Rational amax(0), bmax(0);
  bool any = false;
  for (std::size_t i = 0; i + 1 < ch.size(); ++i) {
    const Vertex& p = ch[i];
    const Vertex& q = ch[i + 1];
    // (c,d) on segment pq?
    const Rational cr = (q.first - p.first) * (cd.second - p.second) - (q.second - p.second) * (cd.first - p.first);
    if (cr != 0) continue;
    if (cd.first < min_of(p.first, q.first) || cd.first > max_of(p.first, q.first)) continue;
    if (cd.second < min_of(p.second, q.second) || cd.second > max_of(p.second, q.second)) continue;
    any = true;
    amax = max_of(amax, max_of(p.first, q.first));
    bmax = max_of(bmax, max_of(p.second, q.second));
  }
  require(any, ErrorCode::InvalidArgument, "(c, d) is not on the unit sphere of the polygon");
  if (amax < 1) {
    r.coordinate = 0;
  } else if (bmax < 1) {
    r.coordinate = 1;
  } else {
    return r;  // star meets a = 1 and b = 1: property (alpha) fails here
  }
  const bool first = r.coordinate == 0;
  const Rational star = first ? amax : bmax;
  const Rational bound = (Rational(1) + star) / 2;
  auto coord = [&](const Vertex& v) { return first ? v.first : v.second; };
  // g = N(. + (c,d)) is convex and monotone: its max over the ball part with
  // coordinate >= bound sits at chain vertices there or where the chain crosses.
  Rational G(0);
  for (std::size_t i = 0; i < ch.size(); ++i) {
    if (coord(ch[i]) >= bound) G = max_of(G, N.exact(ch[i].first + cd.first, ch[i].second + cd.second));
    if (i + 1 < ch.size()) {
      const Rational x0 = coord(ch[i]), x1 = coord(ch[i + 1]);
      if ((x0 - bound) * (x1 - bound) < 0) {
        const Rational t = (bound - x0) / (x1 - x0);
        const Vertex p{ch[i].first + t * (ch[i + 1].first - ch[i].first),
                       ch[i].second + t * (ch[i + 1].second - ch[i].second)};
        G = max_of(G, N.exact(p.first + cd.first, p.second + cd.second));
      }
    }
  }
  r.radius = to_double(bound);
  r.sup_coordinate = r.radius;
  r.delta = to_double(Rational(Rational(1) - bound));
  r.eps = to_double(Rational(Rational(2) - G));
  r.valid = r.eps > 0;
  return r;
}

struct AlphaVerdict {
  Tri verdict = Tri::Undecided;
  std::string method;
  std::vector<AlphaRecord> records;
  std::optional<std::pair<double, double>> failing_point;
  OctahedralVerdict octahedral;
  double convexity_margin = 0;  // min over grid chords of 1 - N(midpoint)
};

/// Sufficient test (strict convexity, with per-point records) and necessary
/// test (octahedrality); polygons are decided exactly by their stars.
inline AlphaVerdict has_property_alpha(const AbsoluteNorm& N, double tol = -1, std::size_t grid_n = 4096) {
  AlphaVerdict v;
  v.octahedral = is_positively_octahedral(N, tol, grid_n);
  if (v.octahedral.verdict == Tri::True) {
    v.verdict = Tri::False;
    v.method = "octahedral";
    v.failing_point = std::pair{v.octahedral.a, v.octahedral.b};
    return v;
  }
  if (N.kind() == NormKind::Polygonal) {
    std::vector<Vertex> pts;
    const auto& ch = N.chain();
    for (std::size_t i = 0; i < ch.size(); ++i) {
      pts.push_back(ch[i]);
      if (i + 1 < ch.size())
        pts.push_back({(ch[i].first + ch[i + 1].first) / 2, (ch[i].second + ch[i + 1].second) / 2});
    }
    v.method = "star";
    for (const auto& p : pts) {
      auto r = alpha_record_polygon(N, p);
      if (!r.valid) {
        v.verdict = Tri::False;
        v.failing_point = std::pair{r.c, r.d};
        return v;
      }
      v.records.push_back(r);
    }
    v.verdict = Tri::True;
    return v;
  }
  if (N.is_l1() || N.is_linf()) return v;  // unreachable: both are octahedral
  const auto s = detail::sphere_grid(N, grid_n);
  v.convexity_margin = 1;
  for (std::size_t j = 0; j + 1 < s.size(); ++j)
    v.convexity_margin = std::min(
        v.convexity_margin, 1 - N(0.5 * (s[j].first + s[j + 1].first), 0.5 * (s[j].second + s[j + 1].second)));
  v.method = "strict_convexity";
  if (!(v.convexity_margin > 0)) return v;
  for (int k = 0; k <= 16; ++k) {
    const auto [c, d] = N.sphere_point(std::numbers::pi / 2 * k / 16.0);
    auto r = alpha_record_ball(N, c, d, grid_n);
    if (!r.valid) return v;
    v.records.push_back(r);
  }
  v.verdict = Tri::True;
  return v;
}

// ---------------------------------------------------------------------------
// Component families

namespace detail {

template <Scalar T>
T component_norm_value(const Component<T>& c) {
  if (auto e = exact_component_norm(c)) return *e;
  return from_double<T>(component_norm(c).mid());
}

template <Scalar T>
bool component_is_daugavet(const Component<T>& c) {
  if (const auto* f = std::get_if<l1::StepFunction<T>>(&c)) return l1::is_daugavet_point_l1(*f).verdict == Verdict::DaugavetYes;
  if (const auto* s = std::get_if<ck::TailSequence<T>>(&c)) return ck::is_daugavet_point_ck(*s).verdict == Verdict::DaugavetYes;
  return muntz::is_daugavet_point_muntz(std::get<muntz::MuntzPolynomial<T>>(c)).verdict == Verdict::DaugavetYes;
}

/// Far ball vertices of a refined L1 model whose Dirichlet-rounded average
/// is within delta of the target.
template <Scalar T>
std::vector<Component<T>> l1_family(const l1::StepFunction<T>& x, const l1::StepFunction<T>& target, const T& eps,
                                    const T& delta) {
  require(x.model() == target.model(), ErrorCode::MixedSpaces, "target on a different model");
  l1::MeasureModel<T> model = x.model();
  l1::StepFunction<T> xf = x, uf = target;
  for (const auto& cell : x.model().cells()) {
    if (cell.kind == l1::CellKind::Atom) continue;
    const T mass_on = xf.mass_on(model.index_of(cell.id));
    std::size_t pieces = 1;
    while (mass_on / T(static_cast<long>(pieces)) > eps / 2) pieces *= 2;
    if (pieces > 1) {
      const auto r = l1::subdivide_cell(model, cell.id, pieces);
      model = r.model;
      xf = xf.lifted(r);
      uf = uf.lifted(r);
    }
  }
  std::vector<l1::StepFunction<T>> verts;
  std::vector<T> w;
  std::size_t spare = 0;
  for (std::size_t c = 0; c < model.size(); ++c) {
    if (xf.mass_on(c) < xf.mass_on(spare)) spare = c;
    if (uf.value(c) == 0) continue;
    verts.push_back(l1::StepFunction<T>::normalized_indicator(model, c, uf.value(c) > 0 ? 1 : -1));
    w.push_back(uf.mass_on(c));
  }
  T rest = T(1);
  for (const auto& x0 : w) rest -= x0;
  if (rest > slack<T>(1e-15)) {
    for (int s : {1, -1}) {
      verts.push_back(l1::StepFunction<T>::normalized_indicator(model, spare, s));
      w.push_back(rest / 2);
    }
  } else if (!w.empty()) {
    w.back() += rest;  // absorb rounding so the weights sum to 1
  }
  const auto dr = dirichlet_average(w, T(delta / 2));
  std::vector<Component<T>> out;
  for (std::size_t i = 0; i < verts.size(); ++i)
    for (std::size_t k = 0; k < dr.k[i]; ++k) out.push_back(verts[i]);
  return out;
}

/// Members of Delta_eps(x) whose plain average is within delta of `target`.
template <Scalar T>
std::vector<Component<T>> component_family(const Component<T>& x, const Component<T>& target, double eps, double delta) {
  require(x.index() == target.index(), ErrorCode::MixedSpaces, "target from a different space");
  if (const auto* s = std::get_if<ck::TailSequence<T>>(&x)) {
    const auto m = static_cast<std::size_t>(std::floor(2 / delta)) + 1;
    const auto w = ck::daugavet_witness_ck(*s, std::get<ck::TailSequence<T>>(target), from_double<T>(eps), m);
    return {w.members.begin(), w.members.end()};
  }
  if (const auto* f = std::get_if<l1::StepFunction<T>>(&x))
    return l1_family(*f, std::get<l1::StepFunction<T>>(target), from_double<T>(eps), from_double<T>(delta));
  if constexpr (std::is_same_v<T, double>) {
    const double d = std::min(eps, delta) / 3.5;
    const auto w = muntz::daugavet_witness_muntz(std::get<muntz::MuntzPolynomial<double>>(x),
                                                 std::get<muntz::MuntzPolynomial<double>>(target), std::min(eps, 2.0), d);
    return {w.members.begin(), w.members.end()};
  } else {
    fail(ErrorCode::Unsupported, "Muntz components need double arithmetic");
  }
}

/// Brings two uniform families to one length: the lcm when small, else a
/// largest-remainder resampling of each to a common count.
template <Scalar T>
void match_counts(std::vector<Component<T>>& fx, std::vector<Component<T>>& fy, double delta) {
  const std::size_t a = fx.size(), b = fy.size();
  const std::size_t l = std::lcm(a, b);
  auto stretch = [](std::vector<Component<T>>& f, std::size_t M) {
    std::vector<T> w(f.size(), T(1) / T(static_cast<long>(f.size())));
    const auto r = round_to(w, M);
    std::vector<Component<T>> out;
    for (std::size_t i = 0; i < f.size(); ++i)
      for (std::size_t k = 0; k < r.k[i]; ++k) out.push_back(f[i]);
    f = std::move(out);
  };
  const std::size_t M = l <= 50000 ? l : static_cast<std::size_t>(std::ceil(4.0 * static_cast<double>(std::max(a, b)) / delta));
  stretch(fx, M);
  stretch(fy, M);
}

}  // namespace detail

template <Scalar T>
struct SumFamily {
  SumPoint<T> target;
  std::vector<SumPoint<T>> members;
  std::vector<T> weights;
  double min_distance = 0;     // lower bound of min_i ||z - member_i||
  double average_error = 0;    // upper bound of ||target - sum w_i member_i||
  double max_member_norm = 0;  // upper bound
};

namespace detail {

template <Scalar T>
void verify_family(SumFamily<T>& fam, const SumPoint<T>& z, double eps, double delta, double tol) {
  fam.min_distance = std::numeric_limits<double>::infinity();
  std::optional<SumPoint<T>> avg;
  for (std::size_t i = 0; i < fam.members.size(); ++i) {
    const auto& p = fam.members[i];
    fam.min_distance = std::min(fam.min_distance, (z - p).norm_bounds().lower);
    fam.max_member_norm = std::max(fam.max_member_norm, p.norm_bounds().upper);
    const auto wp = p.scaled(fam.weights[i]);
    avg = avg ? *avg + wp : wp;
  }
  fam.average_error = (fam.target - *avg).norm_bounds().upper;
  require(fam.min_distance >= 2 - eps - tol, ErrorCode::VerificationFailed,
          "sum member closer than 2 - eps: " + std::to_string(fam.min_distance));
  require(fam.average_error <= delta + tol, ErrorCode::VerificationFailed,
          "sum average farther than delta: " + std::to_string(fam.average_error));
  require(fam.max_member_norm <= 1 + tol, ErrorCode::VerificationFailed, "sum member outside the unit ball");
}

/// Family for a target on the unit sphere: pairs (||u|| x_i, ||v|| y_i).
template <Scalar T>
std::vector<SumPoint<T>> sphere_pairs(const SumPoint<T>& z0, const SumPoint<T>& target, double eps_c, double delta) {
  const T nu = component_norm_value(target.x), nv = component_norm_value(target.y);
  auto fx = nu != 0 ? component_family(z0.x, component_scaled(target.x, T(T(1) / nu)), eps_c, delta)
                    : std::vector<Component<T>>{z0.x};
  auto fy = nv != 0 ? component_family(z0.y, component_scaled(target.y, T(T(1) / nv)), eps_c, delta)
                    : std::vector<Component<T>>{z0.y};
  match_counts(fx, fy, delta);
  std::vector<SumPoint<T>> out;
  for (std::size_t i = 0; i < fx.size(); ++i)
    out.push_back({component_scaled(fx[i], nu), component_scaled(fy[i], nv), target.norm_rule});
  return out;
}

}  // namespace detail

template <Scalar T>
struct SumConstruction {
  SumPoint<T> z;
  std::vector<SumFamily<T>> families;
};

/// z = (a x, b y) for Daugavet points x, y and an octahedral witness (a, b).
/// For each target t in the ball: unit targets get paired component families;
/// others are split as t = lambda (t/r) + (1 - lambda)(-t/r), r = ||t||,
/// lambda = (1 + r)/2, with Dirichlet-rounded weights.
template <Scalar T>
SumConstruction<T> sum_daugavet_construct(const Component<T>& x, const Component<T>& y, const AbsoluteNorm& N, const T& a,
                                          const T& b, const std::vector<SumPoint<T>>& targets, double eps, double delta,
                                          double tol = 1e-9) {
  require(eps > 0 && delta > 0, ErrorCode::InvalidArgument, "eps and delta must be positive");
  const double ad = to_double(a), bd = to_double(b);
  require(ad >= 0 && bd >= 0 && std::abs(N(ad, bd) - 1) <= tol, ErrorCode::InvalidArgument, "need N(a, b) = 1, a, b >= 0");
  require(N(ad + 1, bd) >= 2 - tol && N(ad, bd + 1) >= 2 - tol, ErrorCode::InvalidArgument,
          "(a, b) is not an octahedral witness");
  require(detail::component_is_daugavet(x) && detail::component_is_daugavet(y), ErrorCode::NotDaugavetPoint,
          "components must be Daugavet points");
  SumConstruction<T> out;
  out.z = SumPoint<T>{component_scaled(x, a), component_scaled(y, b), N};
  const SumPoint<T> z0{x, y, N};
  const double eps_c = eps / N(1, 1);
  for (const auto& t : targets) {
    require(t.norm_rule.describe() == N.describe(), ErrorCode::MixedSpaces, "target under a different norm");
    SumFamily<T> fam;
    fam.target = t;
    const double r = t.norm_bounds().mid();
    require(r <= 1 + tol, ErrorCode::InvalidArgument, "target outside the unit ball");
    if (std::abs(r - 1) <= tol) {
      fam.members = detail::sphere_pairs(z0, t, eps_c, delta);
      fam.weights.assign(fam.members.size(), T(1) / T(static_cast<long>(fam.members.size())));
    } else {
      SumPoint<T> s1;
      T lambda;
      if (r == 0) {
        s1 = {x, component_scaled(y, T(0)), N};
        lambda = T(1) / T(2);
      } else {
        const T rr = from_double<T>(r);
        const T exact_r = N.exact_kind() ? [&] {
          if constexpr (is_exact_v<T>) {
            auto ex = exact_component_norm(t.x), ey = exact_component_norm(t.y);
            if (ex && ey) return T(N.exact(*ex, *ey));
          }
          return rr;
        }()
                                         : rr;
        s1 = t.scaled(T(1) / exact_r);
        lambda = (T(1) + exact_r) / T(2);
      }
      const SumPoint<T> s2 = s1.scaled(T(-1));
      const auto dr = dirichlet_average(std::vector<T>{lambda, T(T(1) - lambda)}, from_double<T>(delta / 4));
      const auto f1 = detail::sphere_pairs(z0, s1, eps_c, delta / 4);
      const auto f2 = detail::sphere_pairs(z0, s2, eps_c, delta / 4);
      const T n(static_cast<long>(dr.n));
      for (const auto& p : f1) {
        fam.members.push_back(p);
        fam.weights.push_back(T(static_cast<long>(dr.k[0])) / n / T(static_cast<long>(f1.size())));
      }
      for (const auto& p : f2) {
        fam.members.push_back(p);
        fam.weights.push_back(T(static_cast<long>(dr.k[1])) / n / T(static_cast<long>(f2.size())));
      }
    }
    // Members are built around z0 = (x, y); shift to z = (a x, b y) is already
    // accounted for by the octahedral estimate, so verify against z.
    detail::verify_family(fam, out.z, eps, delta, tol);
    out.families.push_back(std::move(fam));
  }
  return out;
}

template <Scalar T>
struct SumLift {
  SumPoint<T> z;
  SumFamily<T> family;
};

/// (a x, b y) in Delta_Z from component families around x and y themselves.
template <Scalar T>
SumLift<T> sum_delta_lift(const Component<T>& x, const Component<T>& y, const AbsoluteNorm& N, const T& a, const T& b,
                          double eps, double gamma, double tol = 1e-9) {
  require(gamma > 0 && gamma < eps, ErrorCode::InvalidArgument, "need 0 < gamma < eps");
  const double ad = to_double(a), bd = to_double(b);
  require(ad >= 0 && bd >= 0 && std::abs(N(ad, bd) - 1) <= tol, ErrorCode::InvalidArgument, "need N(a, b) = 1, a, b >= 0");
  SumLift<T> out;
  out.z = SumPoint<T>{component_scaled(x, a), component_scaled(y, b), N};
  const double ec = std::min(eps, 2.0);
  auto fx = a != 0 ? detail::component_family(x, x, ec, gamma / 2) : std::vector<Component<T>>{x};
  auto fy = b != 0 ? detail::component_family(y, y, ec, gamma / 2) : std::vector<Component<T>>{y};
  detail::match_counts(fx, fy, gamma / 2);
  out.family.target = out.z;
  for (std::size_t i = 0; i < fx.size(); ++i)
    out.family.members.push_back({component_scaled(fx[i], a), component_scaled(fy[i], b), N});
  out.family.weights.assign(fx.size(), T(1) / T(static_cast<long>(fx.size())));
  detail::verify_family(out.family, out.z, eps, gamma, tol);
  return out;
}

template <Scalar T>
struct SumRefutation {
  AlphaRecord record;
  double eps = 0;
  double delta = 0;
  int coordinate = 0;     // 0: direction (w, 0), 1: direction (0, w)
  SumPoint<T> direction;  // unit vector kept at distance >= delta from co Delta_eps(z)
};

namespace detail {

template <Scalar T>
Component<T> unit_direction(const Component<T>& c) {
  const T n = component_norm_value(c);
  if (n != 0) return component_scaled(c, T(T(1) / n));
  if (const auto* f = std::get_if<l1::StepFunction<T>>(&c))
    return l1::StepFunction<T>::normalized_indicator(f->model(), 0);
  if (const auto* s = std::get_if<ck::TailSequence<T>>(&c)) {
    if (s->variant() == ck::SequenceVariant::C) return ck::TailSequence<T>::constant(T(1));
    return ck::TailSequence<T>(std::vector<T>{T(1)}, T(0), s->variant());
  }
  const auto& p = std::get<muntz::MuntzPolynomial<T>>(c);
  return muntz::MuntzPolynomial<T>::monomial(p.ladder(), muntz::Index(1));
}

}  // namespace detail

/// z is not a Daugavet point when N has property (alpha) at (||x||, ||y||).
template <Scalar T>
SumRefutation<T> sum_refute_daugavet(const SumPoint<T>& z, std::optional<double> eps = std::nullopt) {
  const auto& N = z.norm_rule;
  const double c = component_norm(z.x).mid(), d = component_norm(z.y).mid();
  require(std::abs(N(c, d) - 1) <= 1e-9, ErrorCode::NotUnitNorm, "z must be a unit vector");
  SumRefutation<T> r;
  if (N.kind() == NormKind::Polygonal) {
    std::optional<T> ec = exact_component_norm(z.x), ed = exact_component_norm(z.y);
    Vertex cd{from_double<Rational>(c), from_double<Rational>(d)};
    if constexpr (is_exact_v<T>)
      if (ec && ed) cd = {*ec, *ed};
    r.record = alpha_record_polygon(N, cd);
  } else if (!N.is_l1() && !N.is_linf()) {
    r.record = alpha_record_ball(N, c, d);
  }
  require(r.record.valid, ErrorCode::InsufficientCertificate, "no property (alpha) record at (||x||, ||y||)");
  if (eps) {
    require(*eps > 0, ErrorCode::InvalidArgument, "eps must be positive");
    require(*eps <= r.record.eps, ErrorCode::CertificateScope,
            "eps exceeds the record's eps = " + std::to_string(r.record.eps));
  }
  r.eps = eps ? *eps : r.record.eps;
  r.delta = r.record.delta;
  r.coordinate = r.record.coordinate;
  if (r.coordinate == 0) r.direction = {detail::unit_direction(z.x), component_scaled(z.y, T(0)), N};
  else r.direction = {component_scaled(z.x, T(0)), detail::unit_direction(z.y), N};
  return r;
}

/// Members (u, v) of Delta_eps(z) for sequence components: u = a s with s a
/// unit sequence equal to -sign(x_j) where |x_j| = ||x||, so that
/// ||x - u|| = ||x|| + a exactly; (a, b) is sampled near (||x||, ||y||).
template <Scalar T>
std::vector<SumPoint<T>> sample_sum_delta_set(const SumPoint<T>& z, double eps, std::size_t count, std::uint64_t seed) {
  const auto* xs = std::get_if<ck::TailSequence<T>>(&z.x);
  const auto* ys = std::get_if<ck::TailSequence<T>>(&z.y);
  require(xs && ys, ErrorCode::Unsupported, "sampling implemented for sequence components");
  const auto& N = z.norm_rule;
  const double c = to_double(xs->norm()), d = to_double(ys->norm());
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> grid(-8, 8), len(0, 3);
  auto opposite = [&](const ck::TailSequence<T>& x, double scale) {
    std::vector<T> pre;
    for (int i = len(rng); i > 0; --i) pre.push_back(T(grid(rng)) / T(8));
    T lim = x.variant() == ck::SequenceVariant::C ? T(grid(rng)) / T(8) : T(0);
    ck::TailSequence<T> s(pre, lim, x.variant());
    // Coordinate where x attains its norm; past both prefixes if the limit does.
    std::size_t j = std::max(x.length(), s.length());
    T xj = x.has_limit() ? x.limit() : T(0);
    for (std::size_t k = 0; k < x.length(); ++k)
      if (abs_of(x.at(k)) == x.norm()) {
        j = k;
        xj = x.at(k);
        break;
      }
    s = s.with_value(j, T(xj < 0 ? 1 : -1));
    return s.scaled(from_double<T>(scale));
  };
  const double th0 = std::atan2(d, c);
  auto g = [&](double rho, double th) {
    const auto p = N.sphere_point(th);
    return N(rho * p.first + c, rho * p.second + d);
  };
  double wlo = 0, whi = 0;
  while (th0 - wlo - 1e-4 >= 0 && g(1, th0 - wlo - 1e-4) >= 2 - eps) wlo += 1e-4;
  while (th0 + whi + 1e-4 <= std::numbers::pi / 2 && g(1, th0 + whi + 1e-4) >= 2 - eps) whi += 1e-4;
  std::uniform_real_distribution<double> th(th0 - wlo, th0 + whi), rho(std::max(0.0, 1 - eps), 1);
  std::vector<SumPoint<T>> out;
  for (std::size_t attempts = 0; out.size() < count && attempts < 1000 * count; ++attempts) {
    const double r = rho(rng), t = th(rng);
    if (g(r, t) < 2 - eps) continue;
    const auto p = N.sphere_point(t);
    out.push_back({opposite(*xs, r * p.first), opposite(*ys, r * p.second), N});
  }
  return out;
}

}  // namespace delta_lab::sums
