#include <gtest/gtest.h>

#include <random>

#include "bernpop/relax.hpp"
#include "support.hpp"

using namespace bernpop;
using namespace bernpop::testing;

namespace {

template <class T>
struct Fixture {
  BernsteinForm<T> form;
  AffineMap<T> map;
};

template <class T>
Fixture<T> unit_form(const Polynomial<T>& p, const Box<T>& box, const Degree& d) {
  auto [q, map] = to_unit_box(p, box);
  return {to_bernstein(q, d), map};
}

}  // namespace

template <class T>
class RelaxTyped : public ::testing::Test {};
using Scalars = ::testing::Types<double, Rational>;
TYPED_TEST_SUITE(RelaxTyped, Scalars);

TYPED_TEST(RelaxTyped, UnivariateSquareChain) {
  using T = TypeParam;
  const auto f = unit_form(poly<T>(1, {{{2}, 1}}), cube<T>(1, -1, 1), Degree{2});
  const auto u = upper_bounds<T>(Degree{2});
  EXPECT_EQ(relax0(f.form, f.map).bound, T(-1));
  const auto r1 = relax1(f.form, u, f.map);
  EXPECT_EQ(r1.bound, T(0));
  ASSERT_TRUE(r1.z.has_value());
  EXPECT_EQ(*r1.z, (std::vector<T>{num<T>(0.25), num<T>(0.5), num<T>(0.25)}));
  ASSERT_TRUE(r1.exact);
  EXPECT_EQ((*r1.witness)[0], T(0));
}

TYPED_TEST(RelaxTyped, UnitSquareChain) {
  using T = TypeParam;
  const Degree d{2, 2};
  const auto f = unit_form(poly<T>(2, {{{2, 0}, 1}, {{0, 2}, 1}}), cube<T>(2, -1, 1), d);
  const auto u = upper_bounds<T>(d);
  EXPECT_EQ(relax0(f.form, f.map).bound, T(-2));
  EXPECT_EQ(first_lp_bound(f.form, u), num<T>(-0.5));
  EXPECT_EQ(relax1(f.form, u, f.map).bound, num<T>(-0.5));
  const auto r2 = relax2_iterative(f.form, u, build_cut_matrix<T>(d), f.map);
  EXPECT_NEAR(to_double(r2.bound), 0.0, 1e-12);
  if constexpr (ScalarTraits<T>::exact) EXPECT_EQ(r2.bound, T(0));
}

TYPED_TEST(RelaxTyped, ConstantPolynomial) {
  using T = TypeParam;
  const auto f = unit_form(constant<T>(2, 1), cube<T>(2, 0, 1), Degree{2, 2});
  const auto r0 = relax0(f.form, f.map);
  EXPECT_EQ(r0.bound, T(1));
  EXPECT_TRUE(r0.exact);
  const auto r2 = relax2_iterative(f.form, upper_bounds<T>(Degree{2, 2}), build_cut_matrix<T>(Degree{2, 2}), f.map);
  EXPECT_EQ(r2.bound, T(1));
  EXPECT_TRUE(r2.activated_rows.empty());
}

TYPED_TEST(RelaxTyped, HimmelblauTableRow) {
  using T = TypeParam;
  const Degree d{4, 4};
  const auto f = unit_form(himmelblau<T>(), cube<T>(2, -5, 5), d);
  const auto u = upper_bounds<T>(d);
  EXPECT_EQ(relax0(f.form, f.map).bound, T(-1170));
  EXPECT_NEAR(to_double(relax1(f.form, u, f.map).bound), -911.47, 0.01);
  const auto cuts = build_cut_matrix<T>(d);
  EXPECT_EQ(cuts.rows.size(), 200u);
  const auto r2 = relax2_iterative(f.form, u, cuts, f.map);
  EXPECT_NEAR(to_double(r2.bound), -856.42, 0.01);
  EXPECT_LE(r2.activated_rows.size(), 10u);
}

TYPED_TEST(RelaxTyped, FirstLpAllNonnegative) {
  using T = TypeParam;
  const auto f = unit_form(poly<T>(1, {{{1}, 1}, {{0}, 2}}), cube<T>(1, 0, 1), Degree{3});
  EXPECT_EQ(first_lp_bound(f.form, upper_bounds<T>(Degree{3})), T(2));
}

TEST(CutMatrix, RowCounts) {
  EXPECT_EQ(build_cut_matrix<double>(Degree{2, 2}).rows.size(), 27u);
  EXPECT_EQ(cut_row_count(Degree{4, 4}), 200u);
  const auto uni = build_cut_matrix<Rational>(Degree{1});
  ASSERT_EQ(uni.rows.size(), 1u);
  EXPECT_EQ(uni.rows[0].dense(2), (std::vector<Rational>{1, 1}));
  EXPECT_EQ(uni.rows[0].rhs, 1);
}

TEST(CutMatrix, EntriesAndOrder) {
  const Degree d{3, 2};
  const auto cuts = build_cut_matrix<Rational>(d);
  EXPECT_EQ(cuts.rows.size(), cut_row_count(d));
  for (std::size_t r = 0; r < cuts.rows.size(); ++r) {
    const auto& row = cuts.rows[r];
    EXPECT_GT(row.rhs, 0);
    EXPECT_LE(row.rhs, 1);
    for (const auto& [c, v] : row.entries) EXPECT_GE(v, 0);
    EXPECT_NE(row.from, d);
    if (r > 0) {
      const auto& prev = cuts.rows[r - 1];
      EXPECT_LE(prev.from.total(), row.from.total());
    }
  }
}

TEST(Exactness, ReproducesGridPoint) {
  const std::vector<Rational> z{Rational(1, 4), Rational(1, 2), Rational(1, 4)};
  const auto unit = exactness_check(std::span<const Rational>(z), Degree{2}, AffineMap<Rational>::identity(1));
  ASSERT_TRUE(unit.has_value());
  EXPECT_EQ((*unit)[0], Rational(1, 2));
  const auto mapped = exactness_check(std::span<const Rational>(z), Degree{2}, AffineMap<Rational>::from_box(cube<Rational>(1, -1, 1)));
  ASSERT_TRUE(mapped.has_value());
  EXPECT_EQ((*mapped)[0], 0);
}

TEST(Exactness, CornerIndicator) {
  const Degree d{2, 3};
  std::vector<double> z(12, 0.0);
  z.back() = 1.0;
  const auto w = exactness_check(std::span<const double>(z), d, AffineMap<double>::identity(2));
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(*w, (std::vector<double>{1.0, 1.0}));
}

TEST(Exactness, RejectsBivariateUnitSquareOptimum) {
  const Degree d{2, 2};
  const auto f = unit_form(poly<double>(2, {{{2, 0}, 1}, {{0, 2}, 1}}), cube<double>(2, -1, 1), d);
  const auto r1 = relax1(f.form, upper_bounds<double>(d), f.map);
  ASSERT_TRUE(r1.z.has_value());
  EXPECT_FALSE(exactness_check(std::span<const double>(*r1.z), d, f.map).has_value());
}

TEST(ExtraCuts, Polyhedral) {
  const Degree d{1, 1};
  const auto cuts = polyhedral_cuts<Rational>({{1, 1}}, {1}, d);
  ASSERT_EQ(cuts.size(), 1u);
  EXPECT_EQ(cuts[0].coeffs, (std::vector<Rational>{0, 1, 1, 2}));
  EXPECT_EQ(cuts[0].rhs, 1);
  EXPECT_TRUE(polyhedral_cuts<Rational>({}, {}, d).empty());
  const auto redundant = polyhedral_cuts<Rational>({{1, 0}}, {1}, d);
  const auto f = unit_form(poly<Rational>(2, {{{1, 1}, 1}}), cube<Rational>(2, 0, 1), d);
  const auto base = relax1_lp(f.form, upper_bounds<Rational>(d), f.map);
  const auto with = relax1_lp(f.form, upper_bounds<Rational>(d), f.map, std::span<const LinearCut<Rational>>(redundant));
  EXPECT_EQ(base.bound, with.bound);
}

TEST(ExtraCuts, Semialgebraic) {
  const Degree d{2, 2};
  const std::vector<Polynomial<Rational>> always{constant<Rational>(2, -1)};
  const auto neg = semialgebraic_cuts<Rational>(always, d);
  ASSERT_EQ(neg.size(), 1u);
  for (const auto& v : neg[0].coeffs) EXPECT_EQ(v, -1);

  const std::vector<Polynomial<Rational>> g{var<Rational>(2, 0) - constant<Rational>(2, 1)};
  const auto row = semialgebraic_cuts<Rational>(g, d);
  auto expected = monomial_bernstein_row<Rational>(MultiIndex{1, 0}, d);
  for (auto& v : expected) v -= 1;
  EXPECT_EQ(row[0].coeffs, expected);
  EXPECT_EQ(row[0].rhs, 0);

  const auto f = unit_form(himmelblau<Rational>(), cube<Rational>(2, -5, 5), Degree{4, 4});
  const auto [h, map] = to_unit_box(himmelblau<Rational>(), cube<Rational>(2, -5, 5));
  const Rational c = max_coefficient(f.form) + 1;
  const std::vector<Polynomial<Rational>> slack{h - constant<Rational>(2, 0) - Polynomial<Rational>::constant(2, c)};
  const auto extra = semialgebraic_cuts<Rational>(slack, Degree{4, 4});
  const auto u = upper_bounds<Rational>(Degree{4, 4});
  EXPECT_EQ(relax1_lp(f.form, u, f.map, std::span<const LinearCut<Rational>>(extra)).bound, relax1(f.form, u, f.map).bound);
}

TEST(ExtraCuts, Dsos) {
  EXPECT_TRUE(dsos_cuts<Rational>(Degree{4}, 1).empty());
  const Degree d{2, 2};
  const auto rows = dsos_cuts<Rational>(d, 1);
  ASSERT_EQ(rows.size(), 2u);
  const auto x = var<Rational>(2, 0), y = var<Rational>(2, 1);
  const auto diff = to_bernstein((x - y) * (x - y), d);
  for (std::size_t k = 0; k < diff.size(); ++k) EXPECT_EQ(rows[0].coeffs[k], -diff.coeffs[k]);
  EXPECT_EQ(diff.at(MultiIndex{1, 1}), Rational(-1, 2));
  const std::vector<Rational> pt{Rational(1, 3), Rational(3, 4)};
  const auto z = basis_vector<Rational>(d, std::span<const Rational>(pt));
  for (const auto& r : rows) {
    Rational lhs = 0;
    for (std::size_t k = 0; k < z.size(); ++k) lhs += r.coeffs[k] * z[k];
    EXPECT_LE(lhs, r.rhs);
  }
  EXPECT_THROW(dsos_cuts<Rational>(Degree{2, 1}, 1), std::invalid_argument);
}

// Properties on random instances.

TEST(RelaxProperty, OrderingUpToGridMinimum) {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const Degree d = random_degree(rng, 3, 4);
    const auto p = random_polynomial<double>(rng, d, 7);
    const auto box = cube<double>(d.size(), -1, 1);
    const auto f = unit_form(p, box, d);
    const auto u = upper_bounds<double>(d);
    const double b0 = relax0(f.form, f.map).bound;
    const double bf = first_lp_bound(f.form, u);
    const double b1 = relax1(f.form, u, f.map).bound;
    const double b2 = relax2_iterative(f.form, u, *cached_cut_matrix<double>(d), f.map).bound;
    const double gm = grid_min(p, box, 9);
    const double tol = 1e-8 * std::max(1.0, std::fabs(gm));
    EXPECT_LE(b0, bf + tol);
    EXPECT_LE(bf, b1 + tol);
    EXPECT_LE(b1, b2 + tol);
    EXPECT_LE(b2, gm + tol);
  }
}

TEST(RelaxProperty, GreedyEqualsSimplex) {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const Degree d = random_degree(rng, 3, 4);
    const auto f = unit_form(random_polynomial<double>(rng, d, 7), cube<double>(d.size(), -1, 2), d);
    const auto u = upper_bounds<double>(d);
    EXPECT_NEAR(relax1(f.form, u, f.map).bound, relax1_lp(f.form, u, f.map).bound, 1e-8);
  }
}

TEST(RelaxProperty, IterativeEqualsMonolithic) {
  std::mt19937 rng(43);
  for (int trial = 0; trial < 25; ++trial) {
    const Degree d = random_degree(rng, 2, 4);
    const auto f = unit_form(random_polynomial<double>(rng, d, 6), cube<double>(d.size(), -1, 1), d);
    const auto u = upper_bounds<double>(d);
    const auto cuts = cached_cut_matrix<double>(d);
    EXPECT_NEAR(relax2_iterative(f.form, u, *cuts, f.map).bound, relax2_monolithic(f.form, u, *cuts, f.map).bound, 1e-8);
  }
}

TEST(RelaxProperty, TrueBasisVectorsAreFeasible) {
  std::mt19937 rng(44);
  for (const Degree& d : {Degree{4, 4}, Degree{2, 3, 2}, Degree{5}}) {
    const auto cuts = build_cut_matrix<double>(d);
    const auto u = upper_bounds<double>(d);
    for (int k = 0; k < 100; ++k) {
      std::vector<double> x(d.size());
      for (auto& v : x) v = std::uniform_real_distribution<double>(0, 1)(rng);
      const auto z = basis_vector<double>(d, std::span<const double>(x));
      double mass = 0;
      for (std::size_t i = 0; i < z.size(); ++i) {
        EXPECT_GE(z[i], -1e-15);
        EXPECT_LE(z[i], u.values[i] + 1e-12);
        mass += z[i];
      }
      EXPECT_NEAR(mass, 1.0, 1e-12);
      for (const auto& row : cuts.rows) EXPECT_LE(row.dot(std::span<const double>(z)), row.rhs + 1e-12);
    }
  }
}

TEST(RelaxProperty, ElevationNeverWeakensLevelTwo) {
  const auto [h, map] = to_unit_box(himmelblau<double>(), cube<double>(2, -5, 5));
  double prev = -1e300;
  for (const Degree& d : {Degree{4, 4}, Degree{5, 4}, Degree{6, 6}, Degree{10, 10}}) {
    const auto bf = to_bernstein(h, d);
    const double b = relax2_iterative(bf, upper_bounds<double>(d), *cached_cut_matrix<double>(d), map).bound;
    EXPECT_GE(b, prev - 1e-8);
    prev = b;
  }
}

TEST(RelaxProperty, ExactOutcomesCarryWitnesses) {
  std::mt19937 rng(45);
  int exact = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Degree d = random_degree(rng, 2, 3);
    const auto p = random_polynomial<double>(rng, d, 4);
    const auto f = unit_form(p, cube<double>(d.size(), -1, 1), d);
    for (Level level : {Level::Zero, Level::One, Level::Two}) {
      const auto r = relax(level, f.form, f.map);
      if (!r.exact) continue;
      ++exact;
      ASSERT_TRUE(r.witness.has_value());
      EXPECT_NEAR(p.evaluate(*r.witness), r.bound, 1e-8 * std::max(1.0, std::fabs(r.bound)));
    }
  }
  EXPECT_GT(exact, 0);
}

TEST(Levels, ParseAndPrint) {
  EXPECT_EQ(parse_level("first"), Level::FirstLP);
  EXPECT_EQ(parse_level("2"), Level::Two);
  EXPECT_EQ(to_string(Level::FirstLP), "first");
  EXPECT_THROW(parse_level("3"), std::invalid_argument);
}
