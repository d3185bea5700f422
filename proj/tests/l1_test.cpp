#include "delta_lab/l1/l1.hpp"

#include <gtest/gtest.h>

#include <random>

namespace dl = delta_lab;
using R = dl::Rational;
using Step = dl::l1::StepFunction<R>;
using Model = dl::l1::MeasureModel<R>;
using Dual = dl::l1::DualStep<R>;
using dl::l1::CellKind;

namespace {

Model one_cell(CellKind kind) { return Model::uniform(1, kind); }

Model mixed() { return Model({{0, R(1, 2), CellKind::Atom}, {1, R(1, 2), CellKind::Nonatomic}}); }

}  // namespace

TEST(SplitCell, MassesAndLift) {
  const auto m = one_cell(CellKind::Nonatomic);
  const auto r = dl::l1::split_cell(m, 0, R(1, 5));
  ASSERT_EQ(r.model.size(), 2u);
  EXPECT_EQ(r.model.cell(0).mass, R(1, 5));
  EXPECT_EQ(r.model.cell(1).mass, R(4, 5));
  const Step f(m, {R(3)});
  EXPECT_EQ(f.lifted(r).norm(), f.norm());
}

TEST(SplitCell, RepeatedHalvingStaysExact) {
  Model m = one_cell(CellKind::Nonatomic);
  for (int i = 0; i < 20; ++i) m = dl::l1::split_cell(m, 0, R(1, 2)).model;
  EXPECT_EQ(m.total_mass(), R(1));
  EXPECT_EQ(m.cell(m.index_of(0)).mass, R(1, 1 << 20));
}

TEST(SplitCell, AtomsAreIndivisible) {
  try {
    dl::l1::split_cell(one_cell(CellKind::Atom), 0, R(1, 2));
    FAIL();
  } catch (const dl::Error& e) {
    EXPECT_EQ(e.code(), dl::ErrorCode::AtomIndivisible);
  }
}

TEST(SplitCell, NormsFunctionalsAndVerdictsSurvive) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> val(-3, 3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = mixed();
    Step f(m, {R(val(rng), 2), R(val(rng), 2)});
    if (f.norm() == 0) continue;
    f = f.scaled(R(1) / f.norm());
    const Dual a{m, {R(val(rng), 3), R(val(rng), 3)}};
    const auto r = dl::l1::split_cell(m, 1, R(1, 3));
    const auto fl = f.lifted(r);
    EXPECT_EQ(fl.norm(), f.norm());
    EXPECT_EQ(a.lifted(r)(fl), a(f));
    EXPECT_EQ(dl::l1::is_daugavet_point_l1(fl).verdict, dl::l1::is_daugavet_point_l1(f).verdict);
  }
}

TEST(DaugavetL1, AtomIndicatorIsNot) {
  const auto c = dl::l1::is_daugavet_point_l1(Step(one_cell(CellKind::Atom), {1}));
  EXPECT_EQ(c.verdict, dl::Verdict::DaugavetNo);
  ASSERT_TRUE(c.refutation);
  EXPECT_LT(*c.refutation->exact_norm, R(2));
}

TEST(DaugavetL1, NonatomicIndicatorIs) {
  EXPECT_EQ(dl::l1::is_daugavet_point_l1(Step(one_cell(CellKind::Nonatomic), {1})).verdict, dl::Verdict::DaugavetYes);
}

TEST(DaugavetL1, HalfAtomHalfNonatomicIsNot) {
  EXPECT_EQ(dl::l1::is_daugavet_point_l1(Step(mixed(), {1, 1})).verdict, dl::Verdict::DaugavetNo);
}

TEST(DaugavetL1, RequiresUnitNorm) {
  EXPECT_THROW(dl::l1::is_daugavet_point_l1(Step(mixed(), {1, 0})), dl::Error);
}

TEST(WitnessL1, MassTargetFifth) {
  const auto m = one_cell(CellKind::Nonatomic);
  const Step f(m, {1});
  const auto w = dl::l1::daugavet_witness_l1(f, Dual{m, {1}}, R(1, 2), R(1, 10), std::optional<R>(R(1, 5)));
  EXPECT_EQ(w.mass, R(1, 5));
  EXPECT_EQ(w.g.value(w.model.index_of(w.cell_id)), R(5));
  EXPECT_EQ(w.distance, R(8, 5));
  EXPECT_EQ(w.value, R(1));
}

TEST(WitnessL1, NegativeFunctional) {
  const auto m = one_cell(CellKind::Nonatomic);
  const Step f(m, {1});
  const auto w = dl::l1::daugavet_witness_l1(f, Dual{m, {-1}}, R(1, 2), R(1, 10), std::optional<R>(R(1, 5)));
  EXPECT_EQ(w.g.value(w.model.index_of(w.cell_id)), R(-5));
  EXPECT_EQ(w.value, R(1));
  EXPECT_EQ(w.distance, R(2));
}

TEST(WitnessL1, DyadicDefaultAndVacuousEps) {
  const auto m = one_cell(CellKind::Nonatomic);
  const Step f(m, {1});
  const auto w = dl::l1::daugavet_witness_l1(f, Dual{m, {1}}, R(1, 2), R(1, 10));
  EXPECT_EQ(w.mass, R(1, 8));  // first halving with int_A |f| < 1/4
  EXPECT_GE(w.distance, R(3, 2));
  EXPECT_EQ(w.g.norm(), R(1));
  const auto v = dl::l1::daugavet_witness_l1(f, Dual{m, {1}}, R(2), R(1, 10));
  EXPECT_GT(v.value, R(9, 10));
}

TEST(WitnessL1, RandomPostconditionsReevaluated) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> val(-3, 3), e(1, 10);
  const Model m({{0, R(1, 3), CellKind::Nonatomic}, {1, R(2, 3), CellKind::Nonatomic}, {2, R(1), CellKind::Atom}});
  for (int trial = 0; trial < 40; ++trial) {
    Step f(m, {R(val(rng)), R(val(rng)), 0});
    if (f.norm() == 0) continue;
    f = f.scaled(R(1) / f.norm());
    Dual a{m, {R(val(rng)), R(val(rng)), R(val(rng))}};
    R top(0);
    for (const auto& c : a.coefficients) top = dl::max_of(top, dl::abs_of(c));
    if (top == 0) continue;
    for (auto& c : a.coefficients) c /= top;
    const R eps(e(rng), 10), delta(e(rng), 20);
    const auto w = dl::l1::daugavet_witness_l1(f, a, eps, delta);
    EXPECT_EQ(w.g.norm(), R(1));
    EXPECT_GE((w.f - w.g).norm(), R(2) - eps);
    EXPECT_GT(w.functional(w.g), R(1) - delta);
  }
}

TEST(RefuteAtom, UnitAtom) {
  const auto r = dl::l1::refute_delta_atom(Step(one_cell(CellKind::Atom), {1}), 0, std::optional<R>(R(1)));
  EXPECT_EQ(r.bound, R(1, 2));
}

TEST(RefuteAtom, HalfMassAtom) {
  const auto r = dl::l1::refute_delta_atom(Step(mixed(), {2, 0}), 0, std::optional<R>(R(1)));
  EXPECT_EQ(r.bound, R(1, 2));
}

TEST(RefuteAtom, SmallEpsApproachesAtomMass) {
  const Step f(mixed(), {2, 0});
  const auto r = dl::l1::refute_delta_atom(f, 0, std::optional<R>(R(1, 1000000)));
  EXPECT_LT(R(1) - r.bound, R(1, 1000));
}

TEST(RefuteAtom, SampledHullStaysAway) {
  const Step f(mixed(), {1, 1});  // c = 1 on the atom, mass 1/2
  const auto r = dl::l1::refute_delta_atom(f, 0);
  EXPECT_EQ(r.eps, R(1, 2));
  std::vector<std::size_t> parent;
  const auto pts = dl::l1::sample_delta_set(f, r.eps, 200, 3, &parent);
  const auto fl = dl::l1::lift_to(f, pts.front().model(), parent);
  for (const auto& p : pts) EXPECT_GE((fl - p).norm(), R(2) - r.eps);
  EXPECT_GE(dl::hull_distance(fl, pts).distance, r.bound);
}

TEST(RefuteAtom, VoidBound) {
  EXPECT_THROW(dl::l1::refute_delta_atom(Step(one_cell(CellKind::Atom), {1}), 0, std::optional<R>(R(2))), dl::Error);
}

TEST(AtomSlice, SingleAtom) {
  const auto s = dl::l1::atom_slice(one_cell(CellKind::Atom), 0, R(1, 10));
  EXPECT_LE(s.diameter, R(3, 10));
}

TEST(AtomSlice, TwoAtoms) {
  const auto s = dl::l1::atom_slice(Model::uniform(2, CellKind::Atom), 0, R(1, 10));
  EXPECT_LE(s.diameter, R(3, 10));
}

TEST(AtomSlice, VacuousBound) {
  const auto s = dl::l1::atom_slice(one_cell(CellKind::Atom), 0, R(2, 3));
  EXPECT_EQ(s.bound, R(2));
  EXPECT_LE(s.diameter, R(2));
}

TEST(ProjectionMin, AtomsBelowTwoNonatomicAtTwo) {
  EXPECT_LT(dl::l1::min_projection_norm(Step(mixed(), {1, 1})).value, R(2));
  EXPECT_EQ(dl::l1::min_projection_norm(Step(one_cell(CellKind::Nonatomic), {1})).value, R(2));
}

TEST(ProjectionMin, RefutingProjectionIsExactAndNearMinimal) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> cells(1, 4), coef(-4, 4), kind(0, 1);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<dl::l1::Cell<R>> cs;
    std::vector<R> v;
    const int n = cells(rng);
    for (int i = 0; i < n; ++i) {
      cs.push_back({i, R(1, n), i == 0 || kind(rng) ? CellKind::Atom : CellKind::Nonatomic});
      v.push_back(R(coef(rng), 4));
    }
    v[0] = R(1);
    Step f(Model(cs), v);
    f = f.scaled(R(1) / f.norm());
    const auto exact = dl::l1::min_projection_norm(f);
    const auto fast = dl::l1::refuting_projection(f);
    EXPECT_EQ(dl::id_minus_rank1_norm(fast.functional, f), fast.value);
    EXPECT_GE(fast.value, exact.value);
    EXPECT_LE(dl::to_double(fast.value - exact.value), 1e-9);
    EXPECT_LT(fast.value, R(2));
  }
}
