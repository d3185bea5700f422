#pragma once

// Daugavet and Delta points of L1(mu) on finite cell models.

#include "delta_lab/core/hull.hpp"
#include "delta_lab/core/operator_norm.hpp"
#include "delta_lab/core/slice.hpp"
#include "delta_lab/core/space_point.hpp"
#include "delta_lab/l1/measure.hpp"
#include "delta_lab/lp.hpp"

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace delta_lab::l1 {

template <Scalar T>
void require_unit(const StepFunction<T>& f) {
  require(abs_of(T(f.norm() - T(1))) <= slack<T>(), ErrorCode::NotUnitNorm,
          "||f|| = " + std::to_string(to_double(f.norm())) + " is not 1");
}

/// Smallest ||Id - x* (x) f|| over x* with x*(f) = 1, by LP. Step
/// functionals on the cells suffice: averaging x* over a cell keeps x*(f)
/// and does not increase any cell's row.
template <Scalar T>
struct ProjectionMin {
  T value{};
  DualStep<T> functional;
};

template <Scalar T>
ProjectionMin<T> min_projection_norm(const StepFunction<T>& f) {
  const auto& model = f.model();
  const std::size_t n = model.size();
  const T xn = f.norm();
  LinearProgram<T> lp;
  const std::size_t gamma = lp.add_variable(T(1));
  std::vector<std::size_t> a(n), p(n), q(n);
  for (std::size_t c = 0; c < n; ++c) {
    a[c] = lp.add_variable(T(0), true);
    p[c] = lp.add_variable();
    q[c] = lp.add_variable();
  }
  std::vector<std::pair<std::size_t, T>> norming;
  for (std::size_t c = 0; c < n; ++c) {
    const T fm = f.value(c) * model.cell(c).mass;
    if (fm != 0) norming.emplace_back(a[c], fm);
    lp.add_row({{p[c], T(1)}, {a[c], T(-1)}}, RowSense::GreaterEqual, T(0));
    lp.add_row({{p[c], T(1)}, {a[c], T(1)}}, RowSense::GreaterEqual, T(0));
    if (model.cell(c).kind == CellKind::Nonatomic) {
      lp.add_row({{gamma, T(1)}, {p[c], T(-xn)}}, RowSense::GreaterEqual, T(1));
    } else {
      // q >= |1 - a fm|, gamma >= q + p (||f|| - |f_c| m_c)
      lp.add_row({{q[c], T(1)}, {a[c], fm}}, RowSense::GreaterEqual, T(1));
      lp.add_row({{q[c], T(1)}, {a[c], T(-fm)}}, RowSense::GreaterEqual, T(-1));
      lp.add_row({{gamma, T(1)}, {q[c], T(-1)}, {p[c], T(-(xn - abs_of(fm)))}}, RowSense::GreaterEqual, T(0));
    }
  }
  require(!norming.empty(), ErrorCode::InvalidArgument, "f = 0 admits no norming functional");
  lp.add_row(norming, RowSense::Equal, T(1));
  const auto sol = lp.minimize();
  require(sol.optimal(), ErrorCode::VerificationFailed, "projection LP did not reach an optimum");
  ProjectionMin<T> out{sol.objective, {model, std::vector<T>(n)}};
  for (std::size_t c = 0; c < n; ++c) out.functional.coefficients[c] = sol.values[a[c]];
  return out;
}

/// A projection with ||Id - P|| < 2. Exact types take the functional from
/// the floating-point LP, renormalize it exactly and evaluate it exactly;
/// the exact LP runs only if that fails.
template <Scalar T>
ProjectionMin<T> refuting_projection(const StepFunction<T>& f) {
  if constexpr (is_exact_v<T>) {
    std::vector<Cell<double>> cells;
    for (const auto& c : f.model().cells()) cells.push_back({c.id, to_double(c.mass), c.kind});
    std::vector<double> v;
    for (const auto& x : f.values()) v.push_back(to_double(x));
    const auto approx = min_projection_norm(StepFunction<double>(MeasureModel<double>(cells), v));
    DualStep<T> a{f.model(), std::vector<T>(f.model().size())};
    T norming(0);
    for (std::size_t c = 0; c < a.coefficients.size(); ++c) {
      a.coefficients[c] = from_double<T>(approx.functional.coefficients[c]);
      norming += a.coefficients[c] * f.value(c) * f.model().cell(c).mass;
    }
    if (norming != 0) {
      for (auto& x : a.coefficients) x /= norming;
      const T value = id_minus_rank1_norm(a, f);
      if (value < T(2)) return {value, a};
    }
  }
  return min_projection_norm(f);
}

/// Daugavet point iff no atom meets the support (Delta points coincide).
template <Scalar T>
Certificate<T> is_daugavet_point_l1(const StepFunction<T>& f) {
  require_unit(f);
  Certificate<T> cert;
  std::optional<std::size_t> atom;
  for (std::size_t c = 0; c < f.model().size() && !atom; ++c)
    if (f.in_support(c) && f.model().cell(c).kind == CellKind::Atom) atom = c;
  if (!atom) {
    cert.verdict = Verdict::DaugavetYes;
    cert.log.push_back({{"check", "support_atoms"}, {"count", 0}});
    return cert;
  }
  cert.verdict = Verdict::DaugavetNo;
  const auto proj = refuting_projection(f);
  Refutation<T> r;
  r.projection = Rank1Operator<T>{proj.functional, f};
  r.exact_norm = id_minus_rank1_norm(proj.functional, f);
  r.bound = T(2);
  r.note = "support meets atom id " + std::to_string(f.model().cell(*atom).id) +
           "; ||Id - P|| < 2 so f is not a Delta point either";
  require(*r.exact_norm < T(2), ErrorCode::VerificationFailed, "atom-supported f admits no projection below 2");
  cert.refutation = r;
  cert.log.push_back({{"check", "support_atoms"},
                      {"atom_id", f.model().cell(*atom).id},
                      {"projection_norm", to_double(*r.exact_norm)}});
  return cert;
}

template <Scalar T>
struct L1Witness {
  MeasureModel<T> model;   // refined model all outputs live on
  StepFunction<T> f;       // f lifted
  DualStep<T> functional;  // x0* lifted
  StepFunction<T> g;
  int cell_id = 0;         // id of A
  T mass{};                // mu(A)
  T distance{};            // ||f - g||
  T value{};               // x0*(g)
};

/// g = sign(a_c) chi_A / mu(A) on a piece A of the cell with the largest
/// |coefficient|. Nonatomic cells are halved until int_A |f| < eps/2, unless
/// `mass_target` fixes mu(A) with a single split.
template <Scalar T>
L1Witness<T> daugavet_witness_l1(const StepFunction<T>& f, const DualStep<T>& x0, const T& eps, const T& delta,
                                 std::optional<T> mass_target = std::nullopt) {
  require_unit(f);
  require(x0.model == f.model(), ErrorCode::MixedSpaces, "functional and point on different models");
  require(abs_of(T(x0.dual_norm() - T(1))) <= slack<T>(), ErrorCode::NotUnitNorm, "x0* must have dual norm 1");
  require(eps > 0 && delta > 0, ErrorCode::InvalidArgument, "eps and delta must be positive");
  require(is_daugavet_point_l1(f).verdict == Verdict::DaugavetYes, ErrorCode::NotDaugavetPoint,
          "f is not a Daugavet point");
  std::size_t c = 0;
  for (std::size_t i = 1; i < x0.coefficients.size(); ++i)
    if (abs_of(x0.coefficients[i]) > abs_of(x0.coefficients[c])) c = i;
  const int sign = x0.coefficients[c] < 0 ? -1 : 1;
  MeasureModel<T> model = f.model();
  StepFunction<T> fl = f;
  DualStep<T> xl = x0;
  const int id = model.cell(c).id;
  if (model.cell(c).kind == CellKind::Atom) {
    require(f.value(c) == 0, ErrorCode::VerificationFailed, "atom in the support of a Daugavet point");
  } else if (mass_target) {
    const T frac = *mass_target / model.cell(c).mass;
    if (frac < 1) {
      const auto r = split_cell(model, id, frac);
      model = r.model;
      fl = fl.lifted(r);
      xl = xl.lifted(r);
    }
  } else {
    while (abs_of(fl.value(model.index_of(id))) * model.cell(model.index_of(id)).mass >= eps / 2) {
      const auto r = split_cell(model, id, T(1) / T(2));
      model = r.model;
      fl = fl.lifted(r);
      xl = xl.lifted(r);
    }
  }
  const std::size_t ia = model.index_of(id);
  L1Witness<T> w{model, fl, xl, StepFunction<T>::normalized_indicator(model, ia, sign), id, model.cell(ia).mass, T(0), T(0)};
  require(abs_of(fl.value(ia)) * w.mass < eps / 2 || model.cell(ia).kind == CellKind::Atom, ErrorCode::InvalidArgument,
          "mass target too large: int_A |f| must stay below eps/2");
  w.distance = (fl - w.g).norm();
  w.value = xl(w.g);
  require(w.distance >= T(2) - eps, ErrorCode::VerificationFailed, "witness is not eps-far from f");
  require(w.value > T(1) - delta, ErrorCode::VerificationFailed, "witness misses the slice");
  require(w.g.norm() == T(1) || !is_exact_v<T>, ErrorCode::VerificationFailed, "witness is not a unit vector");
  return w;
}

template <Scalar T>
struct AtomRefutation {
  T eps{};
  T bound{};
};

/// Every convex combination of Delta_eps(f) stays (c - eps/(2 mu(A))) mu(A)
/// away from f, where c = |f| on the atom A.
template <Scalar T>
AtomRefutation<T> refute_delta_atom(const StepFunction<T>& f, int atom_id, std::optional<T> eps = std::nullopt) {
  const std::size_t i = f.model().index_of(atom_id);
  require(f.model().cell(i).kind == CellKind::Atom, ErrorCode::InvalidArgument, "cell is not an atom");
  const T c = abs_of(f.value(i));
  require(c > 0, ErrorCode::InvalidArgument, "atom is not in the support of f");
  const T mu = f.model().cell(i).mass;
  const T e = eps ? *eps : c * mu;
  require(e > 0, ErrorCode::InvalidArgument, "eps must be positive");
  require(e < T(2) * c * mu, ErrorCode::BoundVoid, "eps >= 2 c mu(A) leaves no positive bound");
  return {e, (c - e / (T(2) * mu)) * mu};
}

template <Scalar T>
struct AtomSlice {
  Slice<T> slice;
  T diameter{};
  T bound{};  // 3 eps
};

template <Scalar T>
AtomSlice<T> atom_slice(const MeasureModel<T>& model, int atom_id, const T& eps) {
  const std::size_t i = model.index_of(atom_id);
  require(model.cell(i).kind == CellKind::Atom, ErrorCode::InvalidArgument, "cell is not an atom");
  std::vector<T> a(model.size(), T(0));
  a[i] = T(1);
  AtomSlice<T> out{{DualStep<T>{model, a}, eps}, T(0), T(3) * eps};
  out.diameter = slice_diameter(out.slice, true);
  require(out.diameter <= out.bound + slack<T>(1e-12), ErrorCode::VerificationFailed, "atom slice wider than 3 eps");
  return out;
}

/// Members of Delta_eps(f) on f's model refined 4-fold: far ball vertices,
/// -f, and random convex mixes and scalings kept only when still far.
template <Scalar T>
std::vector<StepFunction<T>> sample_delta_set(const StepFunction<T>& f, const T& eps, std::size_t count,
                                              std::uint64_t seed, std::vector<std::size_t>* parent = nullptr) {
  std::vector<std::size_t> par;
  const auto model = refine_all_nonatomic(f.model(), 4, &par);
  if (parent) *parent = par;
  const auto fl = lift_to(f, model, par);
  const T far = T(2) - eps;
  std::vector<StepFunction<T>> base;
  for (std::size_t c = 0; c < model.size(); ++c)
    for (int s : {1, -1}) {
      auto v = StepFunction<T>::normalized_indicator(model, c, s);
      if ((fl - v).norm() >= far) base.push_back(std::move(v));
    }
  base.push_back(fl.scaled(T(-1)));
  std::vector<StepFunction<T>> out;
  for (std::size_t i = 0; i < base.size() && out.size() < count; ++i) out.push_back(base[i]);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> grid(0, 64);
  std::uniform_int_distribution<std::size_t> pick(0, base.size() - 1);
  std::size_t attempts = 0;
  while (out.size() < count && attempts < 200 * count) {
    ++attempts;
    const T t = T(grid(rng)) / T(64);
    const auto& p = base[pick(rng)];
    const auto& q = out[std::uniform_int_distribution<std::size_t>(0, out.size() - 1)(rng)];
    auto cand = p.scaled(t) + q.scaled(T(1) - t);
    if (grid(rng) % 4 == 0) cand = cand.scaled(T(48 + grid(rng) / 4) / T(64));
    if (cand.norm() <= T(1) && (fl - cand).norm() >= far) out.push_back(std::move(cand));
  }
  return out;
}

}  // namespace delta_lab::l1
