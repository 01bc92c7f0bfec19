#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bernpop/multi_index.hpp"
#include "bernpop/scalar.hpp"

namespace bernpop {

/// Sparse multivariate polynomial p(x) = sum_I p_I x^I in the monomial basis.
/// Zero coefficients are never stored.
template <class T>
class Polynomial {
 public:
  using Terms = std::map<MultiIndex, T>;

  Polynomial() = default;
  explicit Polynomial(std::size_t dim) : dim_(dim) {}
  Polynomial(std::size_t dim, Terms terms);

  static Polynomial constant(std::size_t dim, const T& c);
  /// The coordinate polynomial x_j.
  static Polynomial variable(std::size_t dim, std::size_t j);
  static Polynomial monomial(const MultiIndex& index, const T& c);

  std::size_t dimension() const { return dim_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Componentwise maximum of the stored exponents.
  Degree degree() const;
  T coefficient(const MultiIndex& index) const;

  /// Adds c * x^index, dropping the term if it cancels.
  void add_term(const MultiIndex& index, const T& c);

  /// Evaluates by summing each monomial directly.
  T evaluate(std::span<const T> x) const;
  T operator()(std::span<const T> x) const { return evaluate(x); }

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator-() const;
  Polynomial scaled(const T& c) const;

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.dim_ == b.dim_ && a.terms_ == b.terms_;
  }

  /// Human readable form, e.g. "4*x1^3 - 14".
  std::string to_string() const;

 private:
  std::size_t dim_ = 0;
  Terms terms_;
};

template <class T>
Polynomial<T> operator*(const T& c, const Polynomial<T>& p) {
  return p.scaled(c);
}

/// Axis-aligned box [lower_1, upper_1] x ... x [lower_n, upper_n].
template <class T>
class Box {
 public:
  Box() = default;
  /// Throws std::invalid_argument unless lower_j < upper_j and all are finite.
  Box(std::vector<T> lower, std::vector<T> upper);
  static Box unit(std::size_t dim);

  std::size_t dimension() const { return lower_.size(); }
  const std::vector<T>& lower() const { return lower_; }
  const std::vector<T>& upper() const { return upper_; }
  T width(std::size_t j) const { return upper_[j] - lower_[j]; }
  std::size_t widest_axis() const;
  std::vector<T> center() const;
  bool contains(std::span<const T> x) const;

  friend bool operator==(const Box&, const Box&) = default;

 private:
  std::vector<T> lower_, upper_;
};

/// x_j = offset_j + scale_j * z_j, mapping the unit box onto a box.
template <class T>
struct AffineMap {
  std::vector<T> offset;
  std::vector<T> scale;

  static AffineMap identity(std::size_t dim);
  static AffineMap from_box(const Box<T>& box);

  std::size_t dimension() const { return offset.size(); }
  std::vector<T> apply(std::span<const T> z) const;
};

/// Formal partial derivative with respect to x_axis.
template <class T>
Polynomial<T> partial_derivative(const Polynomial<T>& p, std::size_t axis);

/// Lie derivative sum_r dV/dx_r * f_r along dx/dt = f(x).
template <class T>
Polynomial<T> lie_derivative(const Polynomial<T>& v, std::span<const Polynomial<T>> field);

/// q(z) = p(offset + scale * z): same range over [0,1]^n as p over `box`.
template <class T>
std::pair<Polynomial<T>, AffineMap<T>> to_unit_box(const Polynomial<T>& p, const Box<T>& box);

/// Composition with an arbitrary affine map, expanded variable by variable.
template <class T>
Polynomial<T> compose_affine(const Polynomial<T>& p, const AffineMap<T>& map);

/// Substitutes x_axis = value and removes that variable (dimension n-1).
template <class T>
Polynomial<T> restrict_facet(const Polynomial<T>& p, std::size_t axis, const T& value);

/// Converts coefficients (e.g. rational -> float).
template <class To, class From>
Polynomial<To> convert(const Polynomial<From>& p);

}  // namespace bernpop
