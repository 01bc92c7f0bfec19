#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "bernpop/bernstein.hpp"
#include "bernpop/lp_solver.hpp"
#include "support.hpp"

using namespace bernpop;
using namespace bernpop::testing;

namespace {

// Fractional knapsack: fill cheapest coefficients up to u until the mass reaches 1.
double knapsack_oracle(std::vector<double> b, std::vector<double> u) {
  std::vector<std::size_t> order(b.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return b[i] < b[j]; });
  double mass = 0, value = 0;
  for (auto i : order) {
    const double take = std::min(u[i], 1.0 - mass);
    value += take * b[i];
    mass += take;
    if (mass >= 1.0) break;
  }
  return value;
}

template <class T>
LinearProgram<T> random_lp(std::mt19937& rng, std::size_t m, std::size_t n) {
  std::uniform_int_distribution<int> c(-5, 5), a(-4, 6), up(1, 4);
  auto lp = LinearProgram<T>::with_variables(n);
  for (auto& v : lp.objective) v = ScalarTraits<T>::from_int(c(rng));
  for (std::size_t j = 0; j < n; ++j) lp.upper[j] = ScalarTraits<T>::from_int(up(rng));
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<T> row(n);
    for (auto& v : row) v = ScalarTraits<T>::from_int(a(rng));
    lp.add_inequality(row, ScalarTraits<T>::from_int(std::uniform_int_distribution<int>(0, 8)(rng)));
  }
  std::vector<T> ones(n, T(1));
  lp.add_equality(ones, ScalarTraits<T>::from_int(std::uniform_int_distribution<int>(1, 3)(rng)));
  return lp;
}

}  // namespace

template <class T>
class LpTyped : public ::testing::Test {};
using Scalars = ::testing::Types<double, Rational>;
TYPED_TEST_SUITE(LpTyped, Scalars);

TYPED_TEST(LpTyped, SingleBoundedVariable) {
  using T = TypeParam;
  auto lp = LinearProgram<T>::with_variables(1);
  lp.objective = {T(1)};
  lp.upper[0] = T(1);
  const auto sol = solve(lp);
  ASSERT_EQ(sol.status, LPStatus::Optimal);
  EXPECT_EQ(sol.value, T(0));
}

TYPED_TEST(LpTyped, LevelOneShellForUnitSquare) {
  using T = TypeParam;
  const auto [q, map] = to_unit_box(poly<T>(2, {{{2, 0}, 1}, {{0, 2}, 1}}), cube<T>(2, -1, 1));
  const Degree d{2, 2};
  const auto bf = to_bernstein(q, d);
  const auto u = upper_bounds<T>(d);
  auto lp = LinearProgram<T>::with_variables(bf.size());
  lp.objective = bf.coeffs;
  for (std::size_t k = 0; k < bf.size(); ++k) lp.upper[k] = u.values[k];
  lp.add_equality(std::vector<T>(bf.size(), T(1)), T(1));
  const auto sol = solve(lp);
  ASSERT_EQ(sol.status, LPStatus::Optimal);
  EXPECT_NEAR(to_double(sol.value), -0.5, 1e-12);
  if constexpr (ScalarTraits<T>::exact) EXPECT_EQ(sol.value, Rational(-1, 2));
}

TYPED_TEST(LpTyped, InfeasibleAndUnbounded) {
  using T = TypeParam;
  auto lp = LinearProgram<T>::with_variables(2);
  lp.upper = {T(1), T(1)};
  lp.add_equality({T(1), T(1)}, T(3));
  EXPECT_EQ(solve(lp).status, LPStatus::Infeasible);
  if constexpr (!ScalarTraits<T>::exact) {
    auto open = LinearProgram<T>::with_variables(1);
    open.objective = {T(-1)};
    EXPECT_EQ(solve(open).status, LPStatus::Unbounded);
  }
}

TEST(LpSolver, RationalModeRejectsInfiniteBounds) {
  auto lp = LinearProgram<Rational>::with_variables(1);
  EXPECT_THROW(solve(lp), std::invalid_argument);
}

TEST(LpSolver, ValidateRowWidths) {
  auto lp = LinearProgram<double>::with_variables(2);
  EXPECT_THROW(lp.add_inequality({1.0}, 1.0), std::invalid_argument);
  lp.ineq_rows.push_back({1.0});
  lp.ineq_rhs.push_back(1.0);
  EXPECT_THROW(lp.validate(), std::invalid_argument);
}

TEST(LpSolver, DegenerateCyclingExample) {
  // Beale's classic cycling instance; Bland's rule must terminate.
  auto lp = LinearProgram<Rational>::with_variables(4);
  lp.objective = {Rational(-3, 4), 150, Rational(-1, 50), 6};
  lp.upper = {Rational(100), Rational(100), Rational(1), Rational(100)};
  lp.add_inequality({Rational(1, 4), -60, Rational(-1, 25), 9}, 0);
  lp.add_inequality({Rational(1, 2), -90, Rational(-1, 50), 3}, 0);
  const auto sol = solve(lp);
  ASSERT_EQ(sol.status, LPStatus::Optimal);
  EXPECT_EQ(sol.value, Rational(-1, 20));
}

TEST(LpSolver, KnapsackMatchesGreedyOracle) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const Degree d = random_degree(rng, 3, 4);
    const auto u = upper_bounds<double>(d);
    std::vector<double> b(u.values.size());
    for (auto& v : b) v = std::uniform_int_distribution<int>(-20, 20)(rng);
    auto lp = LinearProgram<double>::with_variables(b.size());
    lp.objective = b;
    for (std::size_t k = 0; k < b.size(); ++k) lp.upper[k] = u.values[k];
    lp.add_equality(std::vector<double>(b.size(), 1.0), 1.0);
    const auto sol = solve(lp);
    ASSERT_EQ(sol.status, LPStatus::Optimal);
    EXPECT_NEAR(sol.value, knapsack_oracle(b, u.values), 1e-9);
  }
}

TEST(LpSolverProperty, OptimalSolutionsAreFeasible) {
  std::mt19937 rng(32);
  int optimal = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto lp = random_lp<double>(rng, 4, 6);
    const auto sol = solve(lp);
    if (sol.status != LPStatus::Optimal) continue;
    ++optimal;
    EXPECT_LE(max_violation(lp, std::span<const double>(sol.primal)), 1e-8);
    const auto ex = random_lp<Rational>(rng, 3, 5);
    const auto es = solve(ex);
    if (es.status == LPStatus::Optimal) EXPECT_EQ(max_violation(ex, std::span<const Rational>(es.primal)), 0);
  }
  EXPECT_GT(optimal, 30);
}

TEST(LpSolverProperty, WeakDuality) {
  std::mt19937 rng(33);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto lp = random_lp<double>(rng, 4, 6);
    const auto sol = solve(lp);
    if (sol.status != LPStatus::Optimal) continue;
    const auto at_opt = lagrangian_bound(lp, std::span<const double>(sol.ineq_duals), std::span<const double>(sol.eq_duals));
    ASSERT_TRUE(at_opt.has_value());
    EXPECT_NEAR(*at_opt, sol.value, 1e-7);
    // Perturbed multipliers stay dual feasible after clamping and give weaker bounds.
    std::vector<double> y = sol.ineq_duals, w = sol.eq_duals;
    for (auto& v : y) v += std::uniform_real_distribution<double>(-1, 1)(rng);
    for (auto& v : w) v += std::uniform_real_distribution<double>(-1, 1)(rng);
    const auto perturbed = lagrangian_bound(lp, std::span<const double>(y), std::span<const double>(w));
    if (perturbed) EXPECT_LE(*perturbed, sol.value + 1e-9);
    ++checked;
  }
  EXPECT_GT(checked, 30);
}

TEST(LpSolverProperty, RationalMatchesFloat) {
  std::mt19937 rng(34), twin(34);
  int compared = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto fl = random_lp<double>(rng, 3, 5);
    const auto ex = random_lp<Rational>(twin, 3, 5);
    const auto fs = solve(fl);
    const auto es = solve(ex);
    ASSERT_EQ(fs.status, es.status);
    if (fs.status != LPStatus::Optimal) continue;
    EXPECT_NEAR(fs.value, to_double(es.value), 1e-6);
    ++compared;
  }
  EXPECT_GT(compared, 20);
}
