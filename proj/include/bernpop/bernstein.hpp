#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bernpop/multi_index.hpp"
#include "bernpop/polynomial.hpp"

namespace bernpop {

/// Bernstein coefficients b_{I,delta} of a polynomial over [0,1]^n, stored as
/// a dense tensor in DenseIndexer order.
template <class T>
struct BernsteinForm {
  Degree degree;
  std::vector<T> coeffs;
  /// Degree of the polynomial the form was computed from (<= degree).
  Degree source_degree;

  std::size_t dimension() const { return degree.size(); }
  std::size_t size() const { return coeffs.size(); }
  const T& at(const MultiIndex& index) const { return coeffs[DenseIndexer(degree).linear(index)]; }
};

/// Tensor of maxima u_I = B_{I,delta}(I/delta) of the Bernstein basis.
template <class T>
struct UpperBoundVector {
  Degree degree;
  std::vector<T> values;
};

template <class T>
struct MinCoefficient {
  T value;
  MultiIndex index;
};

/// b_{I,delta} = sum_{J <= I} C(I,J)/C(delta,J) p_J. Throws std::invalid_argument
/// when delta is below the polynomial's own degree.
template <class T>
BernsteinForm<T> to_bernstein(const Polynomial<T>& p, const Degree& degree);

/// Back to the monomial basis (inverse of to_bernstein).
template <class T>
Polynomial<T> to_monomial(const BernsteinForm<T>& form);

/// Tensor de Casteljau evaluation at x in [0,1]^n (rejects points outside).
template <class T>
T bernstein_eval(const BernsteinForm<T>& form, std::span<const T> x);

/// Value B_{I,delta}(x) of a single basis polynomial.
template <class T>
T bernstein_basis(const MultiIndex& index, const Degree& degree, std::span<const T> x);

/// All basis values B_{I,delta}(x) in DenseIndexer order.
template <class T>
std::vector<T> basis_vector(const Degree& degree, std::span<const T> x);

/// u_I = prod_j C(d_j,i_j) (i_j/d_j)^i_j (1 - i_j/d_j)^(d_j-i_j), with 0^0 = 1
/// and a unit factor on axes where d_j = 0.
template <class T>
UpperBoundVector<T> upper_bounds(const Degree& degree);

/// Bernstein coefficients at degree delta of the basis polynomial B_{I,K}.
template <class T>
std::vector<T> elevation_row(const MultiIndex& index, const Degree& from, const Degree& to);

/// Coefficients C(J,I)/C(delta,I) of the monomial x^I in the degree-delta basis.
template <class T>
std::vector<T> monomial_bernstein_row(const MultiIndex& index, const Degree& degree);

/// Smallest coefficient; ties go to the lexicographically smallest index.
template <class T>
MinCoefficient<T> min_coefficient(const BernsteinForm<T>& form);

template <class T>
T max_coefficient(const BernsteinForm<T>& form);

/// True iff every coordinate of `index` is 0 or delta_j.
bool is_vertex_index(const MultiIndex& index, const Degree& degree);

/// Vertex condition for the argmin: when it holds the minimum coefficient is
/// the minimum of the polynomial over the unit box.
template <class T>
bool vertex_condition(const BernsteinForm<T>& form, const MultiIndex& argmin);

/// Like vertex_condition, but accepts any vertex index attaining the minimum.
/// Returns that index, if one exists.
template <class T>
std::optional<MultiIndex> vertex_minimizer(const BernsteinForm<T>& form);

/// The grid point I/delta (0/0 := 0).
template <class T>
std::vector<T> grid_point(const MultiIndex& index, const Degree& degree);

}  // namespace bernpop
