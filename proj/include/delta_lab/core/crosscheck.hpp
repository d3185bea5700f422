#pragma once

// Three routes to the same verdict on polyhedral models: the space's theorem,
// hull tests against the far vertices Delta_eps(x) of a refined ball, and the
// minimal ||Id - P|| over projections onto x.

#include "delta_lab/ck/ck.hpp"
#include "delta_lab/core/hull.hpp"
#include "delta_lab/core/space_point.hpp"
#include "delta_lab/l1/l1.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace delta_lab {

enum class Prediction { In, Out, Undetermined };

constexpr std::string_view to_string(Prediction p) {
  switch (p) {
    case Prediction::In: return "IN";
    case Prediction::Out: return "OUT";
    case Prediction::Undetermined: return "UNDETERMINED";
  }
  return "?";
}

struct CrosscheckRow {
  double eps = 0;
  std::size_t far_vertices = 0;
  double delta_distance = 0;     // hull distance from x to the far vertices
  double daugavet_distance = 0;  // max over probes of the same
  bool brute_delta = false;
  bool brute_daugavet = false;
  Prediction predicted_delta = Prediction::Undetermined;
  Prediction predicted_daugavet = Prediction::Undetermined;
  bool agree = true;
};

struct CrosscheckReport {
  bool theorem_delta = false;
  bool theorem_daugavet = false;
  double projection_min = 0;
  bool projection_delta = false;
  double resolution = 0;  // hull distances up to this count as membership
  std::vector<CrosscheckRow> rows;
  std::size_t disagreements = 0;

  bool agree() const { return disagreements == 0; }
};

namespace detail {

inline bool matches(Prediction p, bool brute) {
  return p == Prediction::Undetermined || (p == Prediction::In) == brute;
}

inline void finish_row(CrosscheckReport& rep, CrosscheckRow& row, double tol) {
  const double cut = rep.resolution + tol;
  row.brute_delta = row.delta_distance <= cut;
  row.brute_daugavet = row.daugavet_distance <= cut;
  row.agree = matches(row.predicted_delta, row.brute_delta) && matches(row.predicted_daugavet, row.brute_daugavet);
  if (!row.agree) ++rep.disagreements;
}

template <Scalar T>
double max_probe_distance(const std::vector<SpacePoint<T>>& probes, const std::vector<SpacePoint<T>>& far,
                          const std::vector<bool>& probe_is_far, double tol) {
  double worst = 0;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (probe_is_far[i]) continue;  // a member of the far set has distance 0
    worst = std::max(worst, hull_distance(probes[i], far, tol).upper);
  }
  return worst;
}

}  // namespace detail

/// L1: nonatomic cells are refined until int_Q |x| <= eps/2 so that every
/// refined vertex off the atoms of the support is eps-far from x.
template <Scalar T>
CrosscheckReport crosscheck_characterizations(const l1::StepFunction<T>& x, const std::vector<double>& eps_grid,
                                              double tol = 1e-9) {
  l1::require_unit(x);
  CrosscheckReport rep;
  rep.theorem_daugavet = l1::is_daugavet_point_l1(x).verdict == Verdict::DaugavetYes;
  rep.theorem_delta = rep.theorem_daugavet;
  const auto proj = l1::min_projection_norm(x);
  rep.projection_min = to_double(proj.value);
  rep.projection_delta = proj.value >= T(2) - slack<T>(tol);
  if (rep.projection_delta != rep.theorem_delta) ++rep.disagreements;

  for (double e : eps_grid) {
    const T eps = from_double<T>(e);
    CrosscheckRow row;
    row.eps = e;
    // Refine.
    l1::MeasureModel<T> model = x.model();
    l1::StepFunction<T> xf = x;
    for (const auto& cell : x.model().cells()) {
      if (cell.kind == l1::CellKind::Atom) continue;
      const std::size_t i = model.index_of(cell.id);
      const T mass_on = xf.mass_on(i);
      std::size_t pieces = 1;
      while (mass_on / T(static_cast<long>(pieces)) > eps / 2) pieces *= 2;
      if (pieces > 1) {
        const auto r = l1::subdivide_cell(model, cell.id, pieces);
        model = r.model;
        xf = xf.lifted(r);
      }
    }
    std::vector<SpacePoint<T>> far, probes;
    std::vector<bool> probe_is_far;
    for (std::size_t c = 0; c < model.size(); ++c)
      for (int s : {1, -1}) {
        auto v = l1::StepFunction<T>::normalized_indicator(model, c, s);
        const bool is_far = (xf - v).norm() >= T(2) - eps;
        if (is_far) far.push_back(v);
        probes.push_back(v);
        probe_is_far.push_back(is_far);
      }
    row.far_vertices = far.size();
    if (far.empty()) {
      row.delta_distance = row.daugavet_distance = std::numeric_limits<double>::infinity();
    } else {
      const SpacePoint<T> xp = xf;
      row.delta_distance = hull_distance(xp, far, tol).upper;
      row.daugavet_distance = std::max(row.delta_distance, detail::max_probe_distance(probes, far, probe_is_far, tol));
    }
    // Theorem side: no atom in the support => in the hull at every eps; an
    // atom A with eps < 2 |x_A| mu(A) forces a positive distance.
    if (rep.theorem_delta) {
      row.predicted_delta = row.predicted_daugavet = Prediction::In;
    } else {
      bool resolved = false;
      for (std::size_t c = 0; c < x.model().size(); ++c)
        if (x.model().cell(c).kind == l1::CellKind::Atom && x.in_support(c) && eps < T(2) * x.mass_on(c))
          resolved = true;
      if (resolved) row.predicted_delta = row.predicted_daugavet = Prediction::Out;
    }
    detail::finish_row(rep, row, tol);
    rep.rows.push_back(row);
  }
  return rep;
}

/// c-model: the frame carries `fresh` extra coordinates past the prefix on
/// which x equals its limit; membership is read up to the resolution 2/fresh.
template <Scalar T>
CrosscheckReport crosscheck_characterizations(const ck::TailSequence<T>& x, const std::vector<double>& eps_grid,
                                              double tol = 1e-9, std::size_t fresh = 8) {
  ck::require_unit(x);
  CrosscheckReport rep;
  rep.theorem_daugavet = ck::is_daugavet_point_ck(x).verdict == Verdict::DaugavetYes;
  rep.theorem_delta = rep.theorem_daugavet;
  const auto proj = ck::min_projection_norm(x);
  rep.projection_min = to_double(proj.value);
  rep.projection_delta = proj.value >= T(2) - slack<T>(tol);
  if (rep.projection_delta != rep.theorem_delta) ++rep.disagreements;

  const bool linf = x.variant() == ck::SequenceVariant::LinfN;
  const bool lim = x.variant() == ck::SequenceVariant::C;
  const std::size_t extra = linf ? 0 : fresh;
  const std::size_t L = x.length();
  const std::size_t d = L + extra + (lim ? 1 : 0);
  require(d <= 16, ErrorCode::SearchCapReached, "crosscheck frame limited to 16 coordinates");
  rep.resolution = extra > 0 ? 2.0 / static_cast<double>(extra) : 0.0;

  auto make = [&](const std::vector<T>& g) {
    std::vector<T> prefix(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(L + extra));
    if (linf) return ck::TailSequence<T>::linf(std::move(prefix));
    if (!lim) return ck::TailSequence<T>::c0(std::move(prefix));
    return ck::TailSequence<T>(std::move(prefix), g[d - 1]);
  };
  const auto xf = x.has_limit() ? x.extended(L + extra) : x;
  std::vector<ck::TailSequence<T>> verts;
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << d); ++mask) {
    std::vector<T> g(d);
    for (std::size_t k = 0; k < d; ++k) g[k] = (mask >> k) & 1 ? T(-1) : T(1);
    verts.push_back(make(g));
  }

  std::size_t h = 0;
  T rest = x.has_limit() ? abs_of(x.limit()) : T(0);
  for (std::size_t k = 0; k < L; ++k) {
    if (has_unit_magnitude(x.at(k))) {
      ++h;
    } else {
      rest = max_of(rest, abs_of(x.at(k)));
    }
  }
  const double delta = 1.0 - to_double(rest);

  for (double e : eps_grid) {
    const T eps = from_double<T>(e);
    CrosscheckRow row;
    row.eps = e;
    std::vector<SpacePoint<T>> far, probes;
    std::vector<bool> probe_is_far;
    for (const auto& v : verts) {
      const bool is_far = ck::distance(xf, v) >= T(2) - eps;
      if (is_far) far.push_back(v);
      probes.push_back(v);
      probe_is_far.push_back(is_far);
    }
    row.far_vertices = far.size();
    if (far.empty()) {
      row.delta_distance = row.daugavet_distance = std::numeric_limits<double>::infinity();
    } else {
      const SpacePoint<T> xp = xf;
      row.delta_distance = hull_distance(xp, far, tol).upper;
      row.daugavet_distance = std::max(row.delta_distance, detail::max_probe_distance(probes, far, probe_is_far, tol));
    }
    // Theorem side: |lim x| = 1 => in the hull up to 2/fresh. Otherwise, for
    // eps < delta every far vertex flips an H-coordinate, which keeps the hull
    // at distance >= (2 - eps)/|H|.
    if (rep.theorem_delta) {
      row.predicted_delta = row.predicted_daugavet = Prediction::In;
    } else if (h > 0 && e < delta && (2.0 - e) / static_cast<double>(h) > rep.resolution + tol) {
      row.predicted_delta = row.predicted_daugavet = Prediction::Out;
    }
    detail::finish_row(rep, row, tol);
    rep.rows.push_back(row);
  }
  return rep;
}

template <Scalar T>
CrosscheckReport crosscheck_characterizations(const SpacePoint<T>& x, const std::vector<double>& eps_grid,
                                              double tol = 1e-9) {
  if (const auto* f = std::get_if<l1::StepFunction<T>>(&x)) return crosscheck_characterizations(*f, eps_grid, tol);
  if (const auto* s = std::get_if<ck::TailSequence<T>>(&x)) return crosscheck_characterizations(*s, eps_grid, tol);
  fail(ErrorCode::NotPolyhedral, "crosscheck needs a polyhedral model");
}

}  // namespace delta_lab
