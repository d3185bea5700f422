#include "delta_lab/lp.hpp"

#include <gtest/gtest.h>

#include <random>

using delta_lab::LinearProgram;
using delta_lab::LpStatus;
using delta_lab::Rational;
using delta_lab::RowSense;

namespace {

template <class T>
LinearProgram<T> textbook() {
  // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  -> (2, 6), 36
  LinearProgram<T> lp;
  auto x = lp.add_variable(T(3));
  auto y = lp.add_variable(T(5));
  lp.add_row({{x, T(1)}}, RowSense::LessEqual, T(4));
  lp.add_row({{y, T(2)}}, RowSense::LessEqual, T(12));
  lp.add_row({{x, T(3)}, {y, T(2)}}, RowSense::LessEqual, T(18));
  return lp;
}

}  // namespace

TEST(LinearProgram, TextbookMaximumDouble) {
  auto sol = textbook<double>().maximize();
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.objective, 36.0, 1e-12);
  EXPECT_NEAR(sol.values[0], 2.0, 1e-12);
  EXPECT_NEAR(sol.values[1], 6.0, 1e-12);
}

TEST(LinearProgram, TextbookMaximumExact) {
  auto sol = textbook<Rational>().maximize();
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_EQ(sol.objective, Rational(36));
  EXPECT_EQ(sol.values[0], Rational(2));
}

TEST(LinearProgram, EqualityAndFreeVariables) {
  // min |z| written as t >= z, t >= -z with z = x - 1/3, x free
  LinearProgram<Rational> lp;
  auto x = lp.add_variable(Rational(0), true);
  auto t = lp.add_variable(Rational(1));
  lp.add_row({{t, 1}, {x, -1}}, RowSense::GreaterEqual, Rational(-1, 3));
  lp.add_row({{t, 1}, {x, 1}}, RowSense::GreaterEqual, Rational(1, 3));
  auto sol = lp.minimize();
  ASSERT_TRUE(sol.optimal());
  EXPECT_EQ(sol.objective, 0);
  EXPECT_EQ(sol.values[x], Rational(1, 3));
}

TEST(LinearProgram, DetectsInfeasible) {
  LinearProgram<double> lp;
  auto x = lp.add_variable(1.0);
  lp.add_row({{x, 1.0}}, RowSense::GreaterEqual, 2.0);
  lp.add_row({{x, 1.0}}, RowSense::LessEqual, 1.0);
  EXPECT_EQ(lp.minimize().status, LpStatus::Infeasible);
}

TEST(LinearProgram, DetectsUnbounded) {
  LinearProgram<Rational> lp;
  auto x = lp.add_variable(Rational(1));
  lp.add_row({{x, 1}}, RowSense::GreaterEqual, 1);
  EXPECT_EQ(lp.maximize().status, LpStatus::Unbounded);
}

TEST(LinearProgram, DegenerateRedundantEqualities) {
  LinearProgram<Rational> lp;
  auto a = lp.add_variable(Rational(1));
  auto b = lp.add_variable(Rational(2));
  lp.add_row({{a, 1}, {b, 1}}, RowSense::Equal, 1);
  lp.add_row({{a, 2}, {b, 2}}, RowSense::Equal, 2);
  lp.add_row({{a, 1}}, RowSense::LessEqual, 1);
  auto sol = lp.minimize();
  ASSERT_TRUE(sol.optimal());
  EXPECT_EQ(sol.objective, 1);
}

// Random small problems: double and exact solvers agree, and the optimum is
// no worse than any random feasible point.
TEST(LinearProgram, RandomAgreementDoubleVsExact) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coef(-4, 4);
  for (int trial = 0; trial < 60; ++trial) {
    LinearProgram<double> ld;
    LinearProgram<Rational> lr;
    const int n = 3, m = 4;
    for (int j = 0; j < n; ++j) {
      int c = coef(rng);
      ld.add_variable(c);
      lr.add_variable(c);
    }
    for (int i = 0; i < m; ++i) {
      std::vector<std::pair<std::size_t, double>> rd;
      std::vector<std::pair<std::size_t, Rational>> rr;
      for (int j = 0; j < n; ++j) {
        int a = coef(rng);
        rd.emplace_back(j, a);
        rr.emplace_back(j, a);
      }
      int rhs = 1 + std::abs(coef(rng));
      ld.add_row(rd, RowSense::LessEqual, rhs);
      lr.add_row(rr, RowSense::LessEqual, rhs);
    }
    for (int j = 0; j < n; ++j) {
      ld.add_row({{static_cast<std::size_t>(j), 1.0}}, RowSense::LessEqual, 5.0);
      lr.add_row({{static_cast<std::size_t>(j), Rational(1)}}, RowSense::LessEqual, 5);
    }
    auto sd = ld.maximize();
    auto sr = lr.maximize();
    ASSERT_EQ(sd.status, sr.status);
    ASSERT_TRUE(sr.optimal());
    EXPECT_NEAR(sd.objective, sr.objective.convert_to<double>(), 1e-9);
  }
}
