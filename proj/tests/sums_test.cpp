#include "delta_lab/core/hull.hpp"
#include "delta_lab/sums/sums.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace dl = delta_lab;
namespace sm = delta_lab::sums;
using R = dl::Rational;
using sm::AbsoluteNorm;
using sm::Tri;

namespace {

template <class T>
dl::Component<T> constant_one() {
  return dl::ck::TailSequence<T>::constant(T(1));
}

template <class T>
dl::Component<T> zero_seq() {
  return dl::ck::TailSequence<T>::constant(T(0));
}

// Exhaustive best error sum |w_i - k_i/n| over k >= 0 with sum k = n, m <= 3.
double best_rounding(const std::vector<double>& w, int n) {
  double best = 1e9;
  const int m = static_cast<int>(w.size());
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= (m > 1 ? n - a : 0); ++b) {
      const int c = n - a - b;
      if (m == 1 && a != n) continue;
      if (m == 2 && c != 0) continue;
      double e = std::abs(w[0] - static_cast<double>(a) / n);
      if (m > 1) e += std::abs(w[1] - static_cast<double>(b) / n);
      if (m > 2) e += std::abs(w[2] - static_cast<double>(c) / n);
      best = std::min(best, e);
    }
  return best;
}

std::vector<AbsoluteNorm> norm_zoo() {
  return {AbsoluteNorm::l1(),
          AbsoluteNorm::l2(),
          AbsoluteNorm::linf(),
          AbsoluteNorm::lp(1.5),
          AbsoluteNorm::lp(3),
          AbsoluteNorm::parse("poly:[(1,0),(9/10,3/5),(3/5,9/10),(0,1)]"),
          AbsoluteNorm::parse("poly:[(1,0),(1,1/2),(1/2,1),(0,1)]")};
}

}  // namespace

TEST(Dirichlet, Examples) {
  const auto a = sm::dirichlet_average<R>({R(1, 2), R(1, 2)}, R(1, 10));
  EXPECT_EQ(a.n, 2u);
  EXPECT_EQ(a.k, (std::vector<std::size_t>{1, 1}));
  const auto b = sm::dirichlet_average<R>({R(1, 3), R(2, 3)}, R(1, 100));
  EXPECT_EQ(b.n, 3u);
  EXPECT_EQ(b.k, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(b.error, R(0));
  const auto c = sm::dirichlet_average<R>({R(2, 5), R(3, 5)}, R(1, 20));
  EXPECT_EQ(c.n, 5u);
  EXPECT_EQ(c.k, (std::vector<std::size_t>{2, 3}));
}

TEST(Dirichlet, RandomMinimalAgainstExhaustiveScan) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.01, 1), e(0.02, 0.3);
  std::uniform_int_distribution<int> mm(1, 3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> w(static_cast<std::size_t>(mm(rng)));
    double s = 0;
    for (auto& x : w) s += (x = u(rng));
    for (auto& x : w) x /= s;
    const double eps = e(rng);
    const auto r = sm::dirichlet_average(w, eps);
    std::size_t total = 0;
    for (auto k : r.k) total += k;
    EXPECT_EQ(total, r.n);
    EXPECT_LT(r.error, eps);
    EXPECT_NEAR(best_rounding(w, static_cast<int>(r.n)), r.error, 1e-12);
    for (int n = 1; n < static_cast<int>(r.n); ++n) EXPECT_GE(best_rounding(w, n), eps - 1e-12);
  }
}

TEST(Dirichlet, RejectsBadWeights) {
  EXPECT_THROW(sm::dirichlet_average<R>({R(1, 2), R(1, 4)}, R(1, 10)), dl::Error);
  EXPECT_THROW(sm::dirichlet_average<R>({R(3, 2), R(-1, 2)}, R(1, 10)), dl::Error);
  EXPECT_THROW(sm::dirichlet_average<R>({R(1)}, R(0)), dl::Error);
}

TEST(Octahedral, L1AndLinfExactWitnesses) {
  const auto l1 = sm::is_positively_octahedral(AbsoluteNorm::l1());
  EXPECT_EQ(l1.verdict, Tri::True);
  ASSERT_TRUE(l1.exact_witness);
  EXPECT_EQ(*l1.exact_witness, sm::Vertex(R(1), R(0)));
  EXPECT_EQ(AbsoluteNorm::l1().exact(2, 0), R(2));
  EXPECT_EQ(AbsoluteNorm::l1().exact(1, 1), R(2));
  const auto li = sm::is_positively_octahedral(AbsoluteNorm::linf());
  EXPECT_EQ(li.verdict, Tri::True);
  ASSERT_TRUE(li.exact_witness);
  EXPECT_EQ(*li.exact_witness, sm::Vertex(R(1), R(1)));
  EXPECT_EQ(AbsoluteNorm::linf().exact(1, 2), R(2));
  EXPECT_EQ(AbsoluteNorm::linf().exact(2, 1), R(2));
}

TEST(Octahedral, L2FailsWithGap) {
  const auto v = sm::is_positively_octahedral(AbsoluteNorm::l2());
  EXPECT_EQ(v.verdict, Tri::False);
  EXPECT_GT(v.gap, 0.1);
  EXPECT_LT(v.upper_bound, 2);
  // The best point on the quarter circle balances the two terms.
  const double t = std::atan2(1.0, 1.0);
  const double a = std::cos(t), b = std::sin(t);
  const double at45 = std::min(std::hypot(a + 1, b), std::hypot(a, b + 1));
  EXPECT_NEAR(v.best_value, at45, 1e-4);
}

TEST(Alpha, Examples) {
  EXPECT_EQ(sm::has_property_alpha(AbsoluteNorm::l2()).verdict, Tri::True);
  EXPECT_EQ(sm::has_property_alpha(AbsoluteNorm::l1()).verdict, Tri::False);
  EXPECT_EQ(sm::has_property_alpha(AbsoluteNorm::linf()).verdict, Tri::False);
}

TEST(Alpha, RecordsAreConsistent) {
  const auto v = sm::has_property_alpha(AbsoluteNorm::l2());
  ASSERT_FALSE(v.records.empty());
  for (const auto& r : v.records) {
    EXPECT_TRUE(r.valid);
    EXPECT_GT(r.eps, 0);
    EXPECT_GT(r.delta, 0);
    EXPECT_NEAR(r.delta, 1 - r.sup_coordinate, 1e-12);
  }
}

TEST(Alpha, NeverTogetherWithOctahedral) {
  for (const auto& N : norm_zoo()) {
    const auto o = sm::is_positively_octahedral(N);
    const auto a = sm::has_property_alpha(N);
    EXPECT_FALSE(o.verdict == Tri::True && a.verdict == Tri::True) << N.describe();
  }
}

TEST(Alpha, PolygonsDecidedExactly) {
  EXPECT_EQ(sm::has_property_alpha(norm_zoo()[5]).verdict, Tri::True);
  EXPECT_EQ(sm::has_property_alpha(norm_zoo()[6]).verdict, Tri::False);
  EXPECT_EQ(sm::is_positively_octahedral(norm_zoo()[6]).verdict, Tri::False);
}

TEST(SumPoint, AbsoluteAndNormalized) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  for (const auto& N : norm_zoo()) {
    EXPECT_NEAR(N(1, 0), 1, 1e-12);
    EXPECT_NEAR(N(0, 1), 1, 1e-12);
    for (int i = 0; i < 50; ++i) {
      const double a = u(rng), b = u(rng);
      EXPECT_NEAR(N(a, b), N(std::abs(a), -std::abs(b)), 1e-12);
      EXPECT_LE(std::max(std::abs(a), std::abs(b)), N(a, b) + 1e-12);
      EXPECT_LE(N(a, b), std::abs(a) + std::abs(b) + 1e-12);
      const dl::ck::TailSequence<double> x({a}, 0), y({0.5 * b}, b);
      const dl::SumPoint<double> z{x, y, N};
      const auto nb = z.norm_bounds();
      EXPECT_NEAR(nb.lower, N(std::abs(a), std::abs(b)), 1e-9);
      const dl::SumPoint<double> flipped{x.scaled(-1), y, N};
      EXPECT_NEAR(flipped.norm_bounds().lower, nb.lower, 1e-12);
    }
  }
}

TEST(Construct, ZeroTargetOnL1Sum) {
  const auto N = AbsoluteNorm::l1();
  const dl::SumPoint<R> target{zero_seq<R>(), zero_seq<R>(), N};
  const auto c = sm::sum_daugavet_construct(constant_one<R>(), constant_one<R>(), N, R(1, 2), R(1, 2), {target}, 0.2, 0.05);
  ASSERT_EQ(c.families.size(), 1u);
  const auto& fam = c.families[0];
  ASSERT_FALSE(fam.members.empty());
  R wsum(0);
  auto avg = c.z.scaled(R(0));
  for (std::size_t i = 0; i < fam.members.size(); ++i) {
    const auto& m = fam.members[i];
    EXPECT_GE((c.z - m).norm_bounds().lower, 2 - 0.2);
    EXPECT_LE(m.norm_bounds().upper, 1 + 1e-9);
    avg = avg + m.scaled(fam.weights[i]);
    wsum += fam.weights[i];
  }
  EXPECT_EQ(wsum, R(1));
  EXPECT_LE((avg - target).norm_bounds().upper, 0.05);
}

TEST(Construct, TargetIsThePointItself) {
  const auto N = AbsoluteNorm::l1();
  const dl::SumPoint<R> xy{constant_one<R>(), constant_one<R>(), N};
  const auto c = sm::sum_daugavet_construct(constant_one<R>(), constant_one<R>(), N, R(1, 2), R(1, 2),
                                            {xy.scaled(R(1, 2))}, 0.2, 0.05);
  for (const auto& m : c.families[0].members) EXPECT_GE((c.z - m).norm_bounds().lower, 2 - 0.2);
}

TEST(Construct, SecondCoordinateZero) {
  const auto N = AbsoluteNorm::l1();
  const dl::SumPoint<R> t{constant_one<R>(), zero_seq<R>(), N};
  const auto c =
      sm::sum_daugavet_construct(constant_one<R>(), constant_one<R>(), N, R(1), R(0), {t, t.scaled(R(-1, 2))}, 0.2, 0.05);
  EXPECT_EQ(std::get<dl::ck::TailSequence<R>>(c.z.y).norm(), R(0));
  for (const auto& fam : c.families)
    for (const auto& m : fam.members) EXPECT_GE((c.z - m).norm_bounds().lower, 2 - 0.2);
}

TEST(Construct, RefusesNonOctahedralOrNonDaugavet) {
  const double r = std::sqrt(0.5);
  EXPECT_THROW(sm::sum_daugavet_construct(constant_one<double>(), constant_one<double>(), AbsoluteNorm::l2(), r, r, {},
                                          0.2, 0.05),
               dl::Error);
  const dl::Component<R> bad = dl::ck::TailSequence<R>({1}, 0);
  EXPECT_THROW(sm::sum_daugavet_construct(bad, constant_one<R>(), AbsoluteNorm::l1(), R(1, 2), R(1, 2), {}, 0.2, 0.05),
               dl::Error);
}

TEST(Refute, DiagonalPointOnL2Sum) {
  const double r = std::sqrt(0.5);
  const auto N = AbsoluteNorm::l2();
  const dl::SumPoint<double> z{dl::ck::TailSequence<double>::constant(r), dl::ck::TailSequence<double>::constant(r), N};
  const auto ref = sm::sum_refute_daugavet(z);
  EXPECT_GT(ref.delta, 0);
  EXPECT_GT(ref.eps, 0);
  const auto pts = sm::sample_sum_delta_set(z, ref.eps, 300, 11);
  for (const auto& p : pts) EXPECT_GE((z - p).norm_bounds().lower, 2 - ref.eps - 1e-9);
  std::vector<dl::SpacePoint<double>> sp(pts.begin(), pts.end());
  EXPECT_GE(dl::hull_distance(dl::SpacePoint<double>(ref.direction), sp).lower, ref.delta - 1e-6);
}

TEST(Refute, FirstCoordinatePointBoundsSecond) {
  const auto N = AbsoluteNorm::l2();
  const dl::SumPoint<double> z{constant_one<double>(), zero_seq<double>(), N};
  const auto ref = sm::sum_refute_daugavet(z);
  EXPECT_EQ(ref.coordinate, 1);
  EXPECT_EQ(std::get<dl::ck::TailSequence<double>>(ref.direction.x).norm(), 0);
  EXPECT_EQ(std::get<dl::ck::TailSequence<double>>(ref.direction.y).norm(), 1);
}

TEST(Refute, ScopeAndMissingRecord) {
  const dl::SumPoint<double> z{constant_one<double>(), zero_seq<double>(), AbsoluteNorm::l2()};
  try {
    sm::sum_refute_daugavet(z, 0.5);
    FAIL();
  } catch (const dl::Error& e) {
    EXPECT_EQ(e.code(), dl::ErrorCode::CertificateScope);
  }
  try {
    sm::sum_refute_daugavet(dl::SumPoint<double>{constant_one<double>(), zero_seq<double>(), AbsoluteNorm::l1()});
    FAIL();
  } catch (const dl::Error& e) {
    EXPECT_EQ(e.code(), dl::ErrorCode::InsufficientCertificate);
  }
}

TEST(Lift, DiagonalOnL2Sum) {
  const double r = std::sqrt(0.5);
  const auto N = AbsoluteNorm::l2();
  for (double eps : {0.5, 0.1}) {
    const auto lift = sm::sum_delta_lift(constant_one<double>(), constant_one<double>(), N, r, r, eps, eps / 2);
    for (const auto& m : lift.family.members) EXPECT_GE((lift.z - m).norm_bounds().lower, 2 - eps - 1e-9);
    EXPECT_LE(lift.family.average_error, eps / 2);
  }
}

TEST(Lift, FirstCoordinateOnly) {
  const auto lift = sm::sum_delta_lift(constant_one<R>(), constant_one<R>(), AbsoluteNorm::l2(), R(1), R(0), 0.2, 0.1);
  for (const auto& m : lift.family.members) {
    EXPECT_EQ(std::get<dl::ck::TailSequence<R>>(m.y).norm(), R(0));
    EXPECT_GE((lift.z - m).norm_bounds().lower, 2 - 0.2 - 1e-9);
  }
}

TEST(Lift, VacuousEps) {
  const double r = std::sqrt(0.5);
  const auto lift = sm::sum_delta_lift(constant_one<double>(), constant_one<double>(), AbsoluteNorm::l2(), r, r, 2.0, 0.5);
  EXPECT_FALSE(lift.family.members.empty());
}

TEST(Dichotomy, LpSumsRefuseConstructionButRefute) {
  for (double p : {1.5, 2.0, 3.0}) {
    const auto N = AbsoluteNorm::lp(p);
    const double a = std::pow(0.5, 1 / p);
    EXPECT_NE(sm::is_positively_octahedral(N).verdict, Tri::True);
    EXPECT_THROW(
        sm::sum_daugavet_construct(constant_one<double>(), constant_one<double>(), N, a, a, {}, 0.2, 0.05), dl::Error);
    const dl::SumPoint<double> z{dl::ck::TailSequence<double>::constant(a), dl::ck::TailSequence<double>::constant(a), N};
    EXPECT_GT(sm::sum_refute_daugavet(z).delta, 0);
  }
}
