#include "delta_lab/core/crosscheck.hpp"
#include "delta_lab/core/hull.hpp"
#include "delta_lab/core/operator_norm.hpp"
#include "delta_lab/core/slice.hpp"

#include <gtest/gtest.h>

#include <random>

namespace dl = delta_lab;
using dl::Rational;
using R = Rational;
using Step = dl::l1::StepFunction<R>;
using Seq = dl::ck::TailSequence<R>;
using Model = dl::l1::MeasureModel<R>;
using dl::l1::CellKind;

namespace {

Model atoms(std::size_t n) { return Model::uniform(n, CellKind::Atom, R(static_cast<long>(n))); }

Step step(const Model& m, std::vector<R> v) { return Step(m, std::move(v)); }

// Random unit step function with entries k/4 on a mixed model.
Step random_unit_step(std::mt19937_64& rng, std::size_t n) {
  std::vector<dl::l1::Cell<R>> cells;
  std::uniform_int_distribution<int> kind(0, 1), val(-4, 4), mass(1, 4);
  for (std::size_t i = 0; i < n; ++i)
    cells.push_back({static_cast<int>(i), R(mass(rng), 4), kind(rng) ? CellKind::Atom : CellKind::Nonatomic});
  Model m(cells);
  std::vector<R> v(n);
  do {
    for (auto& x : v) x = R(val(rng), 4);
  } while (Step(m, v).norm() == 0);
  Step f(m, v);
  return f.scaled(R(1) / f.norm());
}

}  // namespace

TEST(HullDistance, MidpointOfOppositeVertices) {
  const auto m = atoms(2);
  const auto h = dl::hull_distance(step(m, {0, 0}), {step(m, {1, 0}), step(m, {-1, 0})});
  EXPECT_EQ(h.distance, R(0));
}

TEST(HullDistance, OrthogonalSegment) {
  const auto m = atoms(2);
  const auto h = dl::hull_distance(step(m, {1, 0}), {step(m, {0, 1}), step(m, {0, -1})});
  EXPECT_EQ(h.distance, R(1));
}

TEST(HullDistance, OneDimensional) {
  const auto m = atoms(1);
  EXPECT_EQ(dl::hull_distance(step(m, {1}), {step(m, {-1}), step(m, {0})}).distance, R(1));
}

TEST(HullDistance, ZeroForMembersAndMonotoneInTheSet) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const auto x = random_unit_step(rng, 3);
    std::vector<Step> pts;
    R last(1000);
    for (int k = 0; k < 5; ++k) {
      auto p = random_unit_step(rng, 3);
      pts.push_back(Step(x.model(), p.values()));
      const R d = dl::hull_distance(x, pts).distance;
      EXPECT_LE(d, last);
      last = d;
    }
    pts.push_back(x);
    EXPECT_EQ(dl::hull_distance(x, pts).distance, R(0));
  }
}

TEST(HullDistance, SequencesMonotone) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> val(-2, 2);
  for (int trial = 0; trial < 30; ++trial) {
    auto rs = [&] { return Seq({R(val(rng), 2), R(val(rng), 2)}, R(val(rng), 2)); };
    const Seq x = rs();
    std::vector<Seq> pts;
    R last(1000);
    for (int k = 0; k < 4; ++k) {
      pts.push_back(rs());
      const R d = dl::hull_distance(x, pts).distance;
      EXPECT_LE(d, last);
      last = d;
    }
  }
}

TEST(OperatorNorm, SignFunctionalOnThreeAtoms) {
  const auto m = atoms(3);
  const auto x = step(m, {R(1, 2), R(3, 10), R(1, 5)});
  EXPECT_EQ(dl::id_minus_rank1_norm(dl::l1::DualStep<R>{m, {1, 1, 1}}, x), R(8, 5));
}

TEST(OperatorNorm, CoordinateFunctionalOnThreeAtoms) {
  const auto m = atoms(3);
  const auto x = step(m, {R(1, 2), R(3, 10), R(1, 5)});
  EXPECT_EQ(dl::id_minus_rank1_norm(dl::l1::DualStep<R>{m, {2, 0, 0}}, x), R(1));
}

TEST(OperatorNorm, ZeroOperatorIsIdentity) {
  const auto m = atoms(3);
  const auto x = step(m, {R(1, 2), R(3, 10), R(1, 5)});
  EXPECT_EQ(dl::id_minus_rank1_norm(dl::l1::DualStep<R>{m, {0, 0, 0}}, x), R(1));
  EXPECT_EQ(dl::id_minus_rank1_norm(dl::ck::SequenceDual<R>{{0, 0}, 0}, Seq({1, R(1, 2)}, 0)), R(1));
}

TEST(OperatorNorm, ProjectionBoundsOnRandomL1) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> val(-4, 4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = random_unit_step(rng, 4);
    std::vector<R> a(4);
    R fx(0);
    for (auto& c : a) c = R(val(rng), 4);
    dl::l1::DualStep<R> w{x.model(), a};
    fx = w(x);
    if (fx == 0) continue;
    for (auto& c : w.coefficients) c /= fx;  // w(x) = 1
    const R n = dl::id_minus_rank1_norm(w, x);
    EXPECT_GE(n, R(1));
    EXPECT_LE(n, R(1) + w.dual_norm() * x.norm());
  }
}

TEST(OperatorNorm, SequenceRowsMatchEnumeration) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> val(-4, 4), len(0, 4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<R> p(len(rng)), w(p.size());
    for (auto& v : p) v = R(val(rng), 4);
    for (auto& v : w) v = R(val(rng), 4);
    const Seq x(p, R(val(rng), 4));
    const dl::ck::SequenceDual<R> mu{w, R(val(rng), 4)};
    EXPECT_EQ(dl::id_minus_rank1_norm_rows(mu, x), dl::id_minus_rank1_norm_enumerated(mu, x));
  }
}

TEST(SliceDiameter, LinfSquareSlice) {
  dl::Slice<R> s{dl::ck::SequenceDual<R>{{1, 0}, 0, dl::ck::SequenceVariant::LinfN}, R(1, 2)};
  EXPECT_EQ(dl::slice_diameter(s, true), R(2));
}

TEST(SliceDiameter, SingleAtomSlice) {
  const auto m = atoms(1);
  dl::Slice<R> s{dl::l1::DualStep<R>{m, {1}}, R(1, 10)};
  EXPECT_LE(dl::slice_diameter(s, true), R(3, 10));
}

TEST(SliceDiameter, EpsTwoIsWholeBall) {
  const auto m = atoms(2);
  dl::Slice<R> s{dl::l1::DualStep<R>{m, {1, 0}}, R(2)};
  EXPECT_EQ(dl::slice_diameter(s, true), R(2));
}

TEST(SliceDiameter, SequenceSlicesHaveDiameterTwo) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> val(-4, 4), len(0, 3), e(1, 8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<R> w(len(rng));
    for (auto& v : w) v = R(val(rng), 4);
    dl::ck::SequenceDual<R> mu{w, R(val(rng), 4)};
    const R n = mu.dual_norm();
    if (n == 0) continue;
    for (auto& v : mu.weights) v /= n;
    mu.limit_weight /= n;
    const R d = dl::slice_diameter(dl::Slice<R>{mu, R(e(rng), 8)}, true);
    EXPECT_EQ(d, R(2));
  }
}

TEST(SliceDiameter, NeverAboveTwo) {
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<int> val(-4, 4), e(1, 16);
  for (int trial = 0; trial < 40; ++trial) {
    const auto x = random_unit_step(rng, 3);
    std::vector<R> a(3);
    for (auto& c : a) c = R(val(rng), 4);
    dl::l1::DualStep<R> w{x.model(), a};
    if (w.dual_norm() == 0) continue;
    const R n = w.dual_norm();
    for (auto& c : w.coefficients) c /= n;
    EXPECT_LE(dl::slice_diameter(dl::Slice<R>{w, R(e(rng), 8)}, true), R(2));
  }
}

TEST(CheckDeltaViaSlices, ConstantSequenceFindsWitnesses) {
  const dl::SpacePoint<R> x = Seq::constant(R(1));
  std::vector<dl::Slice<R>> slices{{dl::ck::SequenceDual<R>{{}, 1}, R(1, 10)},
                                   {dl::ck::SequenceDual<R>{{R(1, 2)}, R(1, 2)}, R(1, 10)},
                                   {dl::ck::SequenceDual<R>{{R(1, 4), R(1, 4)}, R(1, 2)}, R(1, 10)}};
  for (const auto& f : dl::check_delta_via_slices(x, R(1, 10), slices)) {
    EXPECT_EQ(f.status, dl::SliceStatus::Positive);
    ASSERT_TRUE(f.witness);
    EXPECT_GE(*dl::exact_norm(dl::point_difference(x, *f.witness)), R(19, 10));
  }
}

TEST(CheckDeltaViaSlices, AtomVertexIsNegative) {
  const auto m = atoms(3);
  const dl::SpacePoint<R> x = step(m, {1, 0, 0});
  std::vector<dl::Slice<R>> slices{{dl::l1::DualStep<R>{m, {1, 0, 0}}, R(1, 10)}};
  const auto out = dl::check_delta_via_slices(x, R(1, 10), slices);
  EXPECT_EQ(out[0].status, dl::SliceStatus::Negative);
}

TEST(CheckDeltaViaSlices, EpsTwoIsPositive) {
  const auto m = atoms(3);
  const dl::SpacePoint<R> x = step(m, {1, 0, 0});
  std::vector<dl::Slice<R>> slices{{dl::l1::DualStep<R>{m, {1, 0, 0}}, R(1, 10)}};
  EXPECT_EQ(dl::check_delta_via_slices(x, R(2), slices)[0].status, dl::SliceStatus::Positive);
}

TEST(Crosscheck, AtomVertexAgreesAndStaysAway) {
  const auto m = atoms(2);
  const auto rep = dl::crosscheck_characterizations(step(m, {1, 0}), {0.1, 0.5, 1.0});
  EXPECT_TRUE(rep.agree());
  EXPECT_FALSE(rep.theorem_delta);
  for (const auto& r : rep.rows) EXPECT_GT(r.delta_distance, 0.0);
}

TEST(Crosscheck, ConstantLimitSequenceAgrees) {
  const auto rep = dl::crosscheck_characterizations(dl::ck::TailSequence<double>({0}, 1), {0.1, 0.5, 1.0});
  EXPECT_TRUE(rep.agree());
  EXPECT_TRUE(rep.theorem_daugavet);
  for (const auto& r : rep.rows) EXPECT_LE(r.delta_distance, rep.resolution + 1e-9);
}

TEST(Crosscheck, EpsTwoPutsEverythingInTheHull) {
  const auto m = atoms(2);
  const auto rep = dl::crosscheck_characterizations(step(m, {1, 0}), {2.0});
  EXPECT_EQ(rep.rows[0].delta_distance, 0.0);
  EXPECT_EQ(rep.rows[0].daugavet_distance, 0.0);
  const auto rs = dl::crosscheck_characterizations(dl::ck::TailSequence<double>({1, 0.5}, 0), {2.0});
  EXPECT_EQ(rs.rows[0].delta_distance, 0.0);
}

TEST(Crosscheck, RandomSmallInstancesAgree) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const auto x = random_unit_step(rng, 1 + trial % 4);
    std::vector<dl::l1::Cell<double>> cells;
    for (const auto& c : x.model().cells()) cells.push_back({c.id, dl::to_double(c.mass), c.kind});
    std::vector<double> v;
    for (const auto& a : x.values()) v.push_back(dl::to_double(a));
    const dl::l1::StepFunction<double> xd(dl::l1::MeasureModel<double>(cells), v);
    EXPECT_TRUE(dl::crosscheck_characterizations(xd, {0.1, 0.5, 1.0}).agree());
  }
  std::uniform_int_distribution<int> val(-2, 2);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<double> p(1 + trial % 2);
    for (auto& v : p) v = val(rng) / 2.0;
    dl::ck::TailSequence<double> s(p, val(rng) / 2.0);
    if (s.norm() == 0) continue;
    s = s.scaled(1 / s.norm());
    EXPECT_TRUE(dl::crosscheck_characterizations(s, {0.1, 0.5, 1.0}).agree());
  }
}

TEST(Crosscheck, MuntzIsNotPolyhedral) {
  const dl::SpacePoint<double> p =
      dl::muntz::MuntzPolynomial<double>::monomial(dl::muntz::ExponentLadder::squares(), dl::muntz::Index(1));
  EXPECT_THROW(dl::crosscheck_characterizations(p, {0.1}), dl::Error);
}
