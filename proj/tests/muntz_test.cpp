#include "delta_lab/muntz/muntz.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace dl = delta_lab;
namespace mz = delta_lab::muntz;
using R = dl::Rational;
using P = mz::MuntzPolynomial<double>;

namespace {

const mz::ExponentLadder kSquares = mz::ExponentLadder::squares();

P poly(const char* text) { return mz::parse_polynomial<double>(text, kSquares); }

P normalized(const P& p) { return p.scaled(1 / p.sup_norm().upper); }

// sum a_k exp(-lambda_k u), i.e. p(t) at t = exp(-u) without rounding t to 1.
double at_u(const P& p, double u) {
  double s = 0;
  for (const auto& [k, a] : p.terms()) s += a * std::exp(-p.ladder().lambda(k) * u);
  return s;
}

// Dense log-spaced grid in u, independent of the enclosure code.
double grid_norm(const P& p, int n = 200000) {
  double m = std::abs(at_u(p, 0));
  for (int i = 0; i <= n; ++i) m = std::max(m, std::abs(at_u(p, std::pow(10.0, -300.0 + 302.0 * i / n))));
  return m;
}

const double kPeak = std::cbrt(0.25) - std::pow(0.25, 4.0 / 3.0);

}  // namespace

TEST(SupNorm, Monomial) {
  const auto n = poly("t").sup_norm();
  EXPECT_NEAR(n.lower, 1, 1e-12);
  EXPECT_NEAR(n.arg_t, 1, 1e-12);
}

TEST(SupNorm, InteriorPeakMatchesClosedForm) {
  const auto n = poly("t - t^4").sup_norm();
  EXPECT_NEAR(kPeak, 0.47247, 1e-5);
  EXPECT_LE(n.lower, kPeak + 1e-12);
  EXPECT_GE(n.upper, kPeak - 1e-12);
  EXPECT_LE(n.width(), 1e-10);
  EXPECT_NEAR(n.arg_t, std::cbrt(0.25), 1e-6);
  EXPECT_NEAR(poly("t^4 - t").sup_norm().lower, n.lower, 1e-12);
}

TEST(SupNorm, EnclosureContainsGridMaximum) {
  for (const char* text : {"t - 2t^4 + t^9", "0.3t + 0.7t^16 - t^25", "-t^4 + 3t^9 - 2t^36", "5t^49 - 4t"}) {
    const P p = poly(text);
    const auto n = p.sup_norm();
    const double g = grid_norm(p);
    EXPECT_GE(n.upper, g - 1e-12) << text;
    EXPECT_LE(n.lower, g + 1e-6) << text;
  }
}

TEST(SupNorm, ZeroPolynomial) { EXPECT_EQ(P(kSquares, {}).sup_norm().upper, 0); }

TEST(Descartes, SignChanges) {
  EXPECT_EQ(poly("t - t^4").descartes_bound(), 1);
  EXPECT_EQ(poly("t - 2t^4 + t^9").descartes_bound(), 2);
  EXPECT_EQ(poly("t + t^4 + 3t^9").descartes_bound(), 0);
}

TEST(Spike, SquaresHalfHalf) {
  const auto s = mz::spike_search(kSquares, 0.5, 0.5);
  EXPECT_EQ(s.k, mz::Index(2));
  EXPECT_GT(s.norm, 0.5);
  EXPECT_LT(s.tail_max, 0.5);
  EXPECT_GE(s.min_value, -0.5 - 1e-12);
  EXPECT_NEAR(grid_norm(s.f), 1, 1e-6);
}

TEST(Spike, EpsNearOneUsesFirstTerm) {
  EXPECT_EQ(mz::spike_search(kSquares, 0.999999, 0.5).k, mz::Index(1));
}

TEST(DaugavetMuntz, Examples) {
  EXPECT_EQ(mz::is_daugavet_point_muntz(poly("t")).verdict, dl::Verdict::DaugavetYes);
  EXPECT_EQ(mz::is_daugavet_point_muntz(normalized(poly("t - t^4"))).verdict, dl::Verdict::DaugavetNo);
  EXPECT_EQ(mz::is_daugavet_point_muntz(poly("-t")).verdict, dl::Verdict::DaugavetYes);
}

TEST(DaugavetMuntz, ExactCoefficients) {
  const auto f = mz::parse_polynomial<R>("3/4t + 1/4t^4", kSquares);
  EXPECT_EQ(f.value_at_one(), R(1));
  EXPECT_EQ(mz::is_daugavet_point_muntz(f).verdict, dl::Verdict::DaugavetYes);
}

TEST(DaugavetMuntz, ConstantTermLaddersAreRefused) {
  const auto ladder = mz::ExponentLadder::parse("squares+const");
  EXPECT_THROW(mz::is_daugavet_point_muntz(P::monomial(ladder, 1)), dl::Error);
}

TEST(WitnessMuntz, SelfTarget) {
  const P f = poly("t");
  const auto w = mz::daugavet_witness_muntz(f, f, 0.7, 0.2);
  EXPECT_EQ(w.m, 10u);
  ASSERT_EQ(w.members.size(), 10u);
  for (const auto& g : w.members) {
    EXPECT_GE(grid_norm(f - g), 2 - 0.7);
    EXPECT_LE(grid_norm(g), 1 + 1e-9);
  }
  P sum(kSquares, {});
  for (const auto& g : w.members) sum = sum + g;
  EXPECT_LE(grid_norm(f - sum.scaled(0.1)), 3 * 0.2);
}

TEST(WitnessMuntz, AntipodalTargetIsKept) {
  const P f = poly("t"), g = poly("-t");
  const auto w = mz::daugavet_witness_muntz(f, g, 0.7, 0.2);
  for (const auto& gi : w.members) EXPECT_NEAR(grid_norm(f - gi), 1 + 1 / 1.2, 1e-9);
  EXPECT_GE(w.min_distance, 2 - 0.7);
}

TEST(WitnessMuntz, AverageErrorShrinksWithDelta) {
  const P f = poly("t"), g = poly("0.5t^4 - 0.25t^9");
  double last = 1e9;
  for (double delta : {0.2, 0.15, 0.1}) {
    const auto w = mz::daugavet_witness_muntz(f, g, 0.7, delta);
    EXPECT_LE(w.average_error, 3 * delta);
    EXPECT_LE(w.average_error, last + 1e-12);
    last = w.average_error;
  }
}

TEST(WitnessMuntz, RequiresThreeDeltaBelowEps) {
  EXPECT_THROW(mz::daugavet_witness_muntz(poly("t"), poly("t"), 0.5, 0.2), dl::Error);
}

TEST(Bernstein, SingleTermIsOne) {
  for (double s : {0.2, 0.5, 0.9}) EXPECT_NEAR(mz::bernstein_estimate(kSquares, 1, s).lower, 1, 1e-9);
}

TEST(Bernstein, ThreeTermsExceedOneAndGrowWithS) {
  const auto ladder = mz::ExponentLadder::parse("explicit:1,4,9");
  const auto half = mz::bernstein_estimate(ladder, 3, 0.5);
  EXPECT_GT(half.lower, 1);
  double last = 0;
  for (double s : {0.3, 0.5, 0.7, 0.9}) {
    const double v = mz::bernstein_estimate(ladder, 3, s, 50).lower;
    EXPECT_GE(v, last - 1e-9);
    last = v;
  }
}

TEST(Separation, AntipodeIsSeparated) {
  const P f = normalized(poly("t - t^4"));
  const auto peaks = mz::peak_set(f);
  ASSERT_EQ(peaks.peaks_t.size(), 1u);
  const double eps = peaks.eps_threshold / 2;
  const auto rep = mz::separation_check_muntz(f, {f.scaled(-1)}, eps);
  ASSERT_EQ(rep.candidates.size(), 1u);
  EXPECT_NEAR(rep.candidates[0].far_distance, 2, 1e-9);
  EXPECT_NEAR(rep.candidates[0].gap, 2, 1e-9);
  EXPECT_TRUE(rep.candidates[0].separated);
}

TEST(Separation, NearPointsAreSkipped) {
  const P f = normalized(poly("t - t^4"));
  const double eps = mz::peak_set(f).eps_threshold / 2;
  const auto rep = mz::separation_check_muntz(f, {f.scaled(0.5)}, eps);
  EXPECT_TRUE(rep.candidates[0].skipped);
  EXPECT_EQ(rep.kept, 0u);
}

TEST(Separation, BatchHullStaysAway) {
  const P f = normalized(poly("t - t^4"));
  const double eps = mz::peak_set(f).eps_threshold / 2;
  const auto rep = mz::separation_check_muntz(f, mz::far_candidates_muntz(f, eps, 20, 5), eps);
  EXPECT_GT(rep.kept, 10u);
  EXPECT_TRUE(rep.all_separated);
  EXPECT_TRUE(rep.hull_exceeds_eps);
}

TEST(DecomposeMuntz, HalfT) {
  const auto f = mz::parse_polynomial<R>("1/2t", kSquares);
  const auto d = mz::convex_dld2p_decompose_muntz(f);
  EXPECT_EQ(d.mu, R(3, 4));
  EXPECT_EQ(d.plus.value_at_one(), R(1));
  EXPECT_EQ(d.minus.value_at_one(), R(-1));
  EXPECT_EQ(d.plus.scaled(d.mu) + d.minus.scaled(R(1) - d.mu), f);
  EXPECT_LE(d.plus_norm.upper, 1 + 1e-9);
  EXPECT_LE(d.minus_norm.upper, 1 + 1e-9);
  EXPECT_NEAR(grid_norm(mz::parse_polynomial<double>("0.5t + 0.5t^4", kSquares)), 1, 1e-12);
  EXPECT_NEAR(grid_norm(mz::parse_polynomial<double>("0.5t - 1.5t^4", kSquares)), 1, 1e-12);
}

TEST(DecomposeMuntz, ZeroPolynomial) {
  const auto d = mz::convex_dld2p_decompose_muntz(mz::MuntzPolynomial<R>(kSquares, {}));
  EXPECT_EQ(d.plus, d.minus.scaled(R(-1)));
  EXPECT_EQ(d.plus.terms().size(), 1u);
}

TEST(DecomposeMuntz, ScaledInteriorPeak) {
  const P f = normalized(poly("t - t^4")).scaled(0.9);
  const auto d = mz::convex_dld2p_decompose_muntz(f);
  EXPECT_NEAR(d.mu, 0.5, 1e-12);
  for (const auto& [k, a] : f.terms())
    EXPECT_EQ(d.plus.coefficient(k) * d.mu + d.minus.coefficient(k) * (1 - d.mu), a);
  EXPECT_LE(grid_norm(d.plus), 1 + 1e-9);
  EXPECT_LE(grid_norm(d.minus), 1 + 1e-9);
  EXPECT_EQ(mz::is_daugavet_point_muntz(d.plus.scaled(1 / d.plus.sup_norm().lower)).verdict,
            dl::Verdict::DaugavetYes);
}
