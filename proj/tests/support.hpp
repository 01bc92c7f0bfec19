#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

#include "bernpop/bernstein.hpp"
#include "bernpop/polynomial.hpp"

namespace bernpop::testing {

template <class T>
T num(double v) {
  return scalar_cast<T>(v);
}

/// Canonical n/d (gmpxx does not reduce on construction).
inline Rational frac(long n, long d) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

template <class T>
Polynomial<T> poly(std::size_t dim, std::initializer_list<std::pair<std::vector<std::uint32_t>, double>> terms) {
  Polynomial<T> p(dim);
  for (const auto& [e, c] : terms) p.add_term(MultiIndex(e), num<T>(c));
  return p;
}

template <class T>
Polynomial<T> var(std::size_t dim, std::size_t j) {
  return Polynomial<T>::variable(dim, j);
}

template <class T>
Polynomial<T> constant(std::size_t dim, double c) {
  return Polynomial<T>::constant(dim, num<T>(c));
}

/// (x^2 + y - 11)^2 + (x + y^2 - 7)^2
template <class T>
Polynomial<T> himmelblau() {
  const auto x = var<T>(2, 0), y = var<T>(2, 1);
  const auto a = x * x + y - constant<T>(2, 11);
  const auto b = x + y * y - constant<T>(2, 7);
  return a * a + b * b;
}

template <class T>
Box<T> cube(std::size_t dim, double lo, double hi) {
  return Box<T>(std::vector<T>(dim, num<T>(lo)), std::vector<T>(dim, num<T>(hi)));
}

/// Random polynomial with small integer coefficients and degree <= degree.
template <class T>
Polynomial<T> random_polynomial(std::mt19937& rng, const Degree& degree, std::size_t terms) {
  std::uniform_int_distribution<int> coeff(-9, 9);
  Polynomial<T> p(degree.size());
  for (std::size_t t = 0; t < terms; ++t) {
    MultiIndex e(degree.size());
    for (std::size_t j = 0; j < degree.size(); ++j)
      e[j] = std::uniform_int_distribution<std::uint32_t>(0, degree[j])(rng);
    p.add_term(e, ScalarTraits<T>::from_int(coeff(rng)));
  }
  return p;
}

/// Random degree with 1 <= n <= max_dim and entries in [1, max_deg].
inline Degree random_degree(std::mt19937& rng, std::size_t max_dim, std::uint32_t max_deg) {
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_dim)(rng);
  Degree d(n);
  for (std::size_t j = 0; j < n; ++j) d[j] = std::uniform_int_distribution<std::uint32_t>(1, max_deg)(rng);
  return d;
}

/// Minimum of p over a uniform grid with `per_axis` points per axis.
template <class T>
double grid_min(const Polynomial<T>& p, const Box<T>& box, std::uint32_t per_axis) {
  const std::size_t n = p.dimension();
  Degree bound(n);
  for (std::size_t j = 0; j < n; ++j) bound[j] = per_axis - 1;
  MultiIndex i(n);
  double best = 1e300;
  std::vector<double> x(n);
  const auto pd = convert<double>(p);
  do {
    for (std::size_t j = 0; j < n; ++j) {
      const double lo = to_double(box.lower()[j]), hi = to_double(box.upper()[j]);
      x[j] = lo + (hi - lo) * i[j] / (per_axis - 1);
    }
    best = std::min(best, pd.evaluate(x));
  } while (DenseIndexer::next(i, bound));
  return best;
}

}  // namespace bernpop::testing
