#include "bernpop/polynomial.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bernpop {

namespace {

void require_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

template <class T>
T power(const T& base, std::uint32_t e) {
  T r = ScalarTraits<T>::from_int(1);
  for (std::uint32_t k = 0; k < e; ++k) r *= base;
  return r;
}

}  // namespace

template <class T>
Polynomial<T>::Polynomial(std::size_t dim, Terms terms) : dim_(dim) {
  for (auto& [index, c] : terms) add_term(index, c);
}

template <class T>
Polynomial<T> Polynomial<T>::constant(std::size_t dim, const T& c) {
  Polynomial p(dim);
  p.add_term(MultiIndex(dim), c);
  return p;
}

template <class T>
Polynomial<T> Polynomial<T>::variable(std::size_t dim, std::size_t j) {
  if (j >= dim) throw std::out_of_range("variable index out of range");
  MultiIndex index(dim);
  index[j] = 1;
  return monomial(index, ScalarTraits<T>::from_int(1));
}

template <class T>
Polynomial<T> Polynomial<T>::monomial(const MultiIndex& index, const T& c) {
  Polynomial p(index.size());
  p.add_term(index, c);
  return p;
}

template <class T>
Degree Polynomial<T>::degree() const {
  Degree d(dim_);
  for (const auto& [index, c] : terms_) d = d.max(index);
  return d;
}

template <class T>
T Polynomial<T>::coefficient(const MultiIndex& index) const {
  auto it = terms_.find(index);
  return it == terms_.end() ? ScalarTraits<T>::from_int(0) : it->second;
}

template <class T>
void Polynomial<T>::add_term(const MultiIndex& index, const T& c) {
  require_dim(index.size(), dim_, "add_term");
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(index, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

template <class T>
T Polynomial<T>::evaluate(std::span<const T> x) const {
  require_dim(x.size(), dim_, "poly_eval");
  T sum = ScalarTraits<T>::from_int(0);
  for (const auto& [index, c] : terms_) {
    T term = c;
    for (std::size_t j = 0; j < dim_; ++j)
      for (std::uint32_t k = 0; k < index[j]; ++k) term *= x[j];
    sum += term;
  }
  return sum;
}

template <class T>
Polynomial<T> Polynomial<T>::operator+(const Polynomial& other) const {
  require_dim(dim_, other.dim_, "poly_add");
  Polynomial r(*this);
  for (const auto& [index, c] : other.terms_) r.add_term(index, c);
  return r;
}

template <class T>
Polynomial<T> Polynomial<T>::operator-(const Polynomial& other) const {
  return *this + (-other);
}

template <class T>
Polynomial<T> Polynomial<T>::operator-() const {
  Polynomial r(dim_);
  for (const auto& [index, c] : terms_) r.terms_.emplace(index, -c);
  return r;
}

template <class T>
Polynomial<T> Polynomial<T>::operator*(const Polynomial& other) const {
  require_dim(dim_, other.dim_, "poly_mul");
  Polynomial r(dim_);
  for (const auto& [a, ca] : terms_)
    for (const auto& [b, cb] : other.terms_) r.add_term(a + b, T(ca * cb));
  return r;
}

template <class T>
Polynomial<T> Polynomial<T>::scaled(const T& c) const {
  Polynomial r(dim_);
  if (c == 0) return r;
  for (const auto& [index, v] : terms_) r.terms_.emplace(index, T(v * c));
  return r;
}

template <class T>
std::string Polynomial<T>::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Highest total degree first reads more naturally.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [index, c] = *it;
    std::string coeff = ScalarTraits<T>::to_string(c);
    const bool negative = !coeff.empty() && coeff[0] == '-';
    if (negative) coeff.erase(0, 1);
    if (first)
      os << (negative ? "-" : "");
    else
      os << (negative ? " - " : " + ");
    first = false;
    const bool unit = coeff == "1" && !index.is_zero();
    if (!unit) os << coeff;
    bool need_star = !unit;
    for (std::size_t j = 0; j < dim_; ++j) {
      if (index[j] == 0) continue;
      os << (need_star ? "*" : "") << 'x' << (j + 1);
      if (index[j] > 1) os << '^' << index[j];
      need_star = true;
    }
  }
  return os.str();
}

template <class T>
Box<T>::Box(std::vector<T> lower, std::vector<T> upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) throw std::invalid_argument("box: bound vectors differ in length");
  for (std::size_t j = 0; j < lower_.size(); ++j) {
    if (!std::isfinite(to_double(lower_[j])) || !std::isfinite(to_double(upper_[j])))
      throw std::invalid_argument("box: bounds must be finite");
    if (!(lower_[j] < upper_[j]))
      throw std::invalid_argument("box: degenerate interval on axis " + std::to_string(j + 1));
  }
}

template <class T>
Box<T> Box<T>::unit(std::size_t dim) {
  return Box(std::vector<T>(dim, ScalarTraits<T>::from_int(0)), std::vector<T>(dim, ScalarTraits<T>::from_int(1)));
}

template <class T>
std::size_t Box<T>::widest_axis() const {
  std::size_t best = 0;
  for (std::size_t j = 1; j < dimension(); ++j)
    if (width(j) > width(best)) best = j;
  return best;
}

template <class T>
std::vector<T> Box<T>::center() const {
  std::vector<T> c(dimension());
  for (std::size_t j = 0; j < dimension(); ++j) c[j] = (lower_[j] + upper_[j]) / ScalarTraits<T>::from_int(2);
  return c;
}

template <class T>
bool Box<T>::contains(std::span<const T> x) const {
  if (x.size() != dimension()) return false;
  for (std::size_t j = 0; j < dimension(); ++j)
    if (x[j] < lower_[j] || x[j] > upper_[j]) return false;
  return true;
}

template <class T>
AffineMap<T> AffineMap<T>::identity(std::size_t dim) {
  return {std::vector<T>(dim, ScalarTraits<T>::from_int(0)), std::vector<T>(dim, ScalarTraits<T>::from_int(1))};
}

template <class T>
AffineMap<T> AffineMap<T>::from_box(const Box<T>& box) {
  AffineMap m{box.lower(), std::vector<T>(box.dimension())};
  for (std::size_t j = 0; j < box.dimension(); ++j) m.scale[j] = box.width(j);
  return m;
}

template <class T>
std::vector<T> AffineMap<T>::apply(std::span<const T> z) const {
  require_dim(z.size(), offset.size(), "affine map");
  std::vector<T> x(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) x[j] = offset[j] + scale[j] * z[j];
  return x;
}

template <class T>
Polynomial<T> partial_derivative(const Polynomial<T>& p, std::size_t axis) {
  if (axis >= p.dimension()) throw std::out_of_range("partial_derivative: axis out of range");
  Polynomial<T> d(p.dimension());
  for (const auto& [index, c] : p.terms()) {
    if (index[axis] == 0) continue;
    d.add_term(index.shifted(axis, -1), T(c * ScalarTraits<T>::from_int(index[axis])));
  }
  return d;
}

template <class T>
Polynomial<T> lie_derivative(const Polynomial<T>& v, std::span<const Polynomial<T>> field) {
  require_dim(field.size(), v.dimension(), "lie_derivative");
  Polynomial<T> out(v.dimension());
  for (std::size_t r = 0; r < field.size(); ++r) {
    require_dim(field[r].dimension(), v.dimension(), "lie_derivative");
    out = out + partial_derivative(v, r) * field[r];
  }
  return out;
}

template <class T>
Polynomial<T> compose_affine(const Polynomial<T>& p, const AffineMap<T>& map) {
  require_dim(map.dimension(), p.dimension(), "compose_affine");
  const std::size_t n = p.dimension();
  // Substitute one variable at a time: (o + s z)^i = sum_k C(i,k) o^(i-k) s^k z^k.
  Polynomial<T> current = p;
  for (std::size_t j = 0; j < n; ++j) {
    const T& o = map.offset[j];
    const T& s = map.scale[j];
    if (o == 0 && s == 1) continue;
    Polynomial<T> next(n);
    for (const auto& [index, c] : current.terms()) {
      const std::uint32_t i = index[j];
      MultiIndex out = index;
      for (std::uint32_t k = 0; k <= i; ++k) {
        out[j] = k;
        T term = c * ScalarTraits<T>::from_int(static_cast<std::int64_t>(binomial(i, k)));
        term *= power(o, i - k);
        term *= power(s, k);
        next.add_term(out, term);
      }
    }
    current = std::move(next);
  }
  return current;
}

template <class T>
std::pair<Polynomial<T>, AffineMap<T>> to_unit_box(const Polynomial<T>& p, const Box<T>& box) {
  require_dim(box.dimension(), p.dimension(), "to_unit_box");
  AffineMap<T> map = AffineMap<T>::from_box(box);
  return {compose_affine(p, map), std::move(map)};
}

template <class T>
Polynomial<T> restrict_facet(const Polynomial<T>& p, std::size_t axis, const T& value) {
  if (axis >= p.dimension()) throw std::out_of_range("restrict_facet: axis out of range");
  Polynomial<T> out(p.dimension() - 1);
  for (const auto& [index, c] : p.terms()) out.add_term(index.without(axis), T(c * power(value, index[axis])));
  return out;
}

template <class To, class From>
Polynomial<To> convert(const Polynomial<From>& p) {
  Polynomial<To> out(p.dimension());
  for (const auto& [index, c] : p.terms()) out.add_term(index, scalar_cast<To>(c));
  return out;
}

#define BERNPOP_INSTANTIATE(T)                                                                  \
  template class Polynomial<T>;                                                                 \
  template class Box<T>;                                                                        \
  template struct AffineMap<T>;                                                                 \
  template Polynomial<T> partial_derivative(const Polynomial<T>&, std::size_t);                 \
  template Polynomial<T> lie_derivative(const Polynomial<T>&, std::span<const Polynomial<T>>);  \
  template Polynomial<T> compose_affine(const Polynomial<T>&, const AffineMap<T>&);             \
  template std::pair<Polynomial<T>, AffineMap<T>> to_unit_box(const Polynomial<T>&, const Box<T>&); \
  template Polynomial<T> restrict_facet(const Polynomial<T>&, std::size_t, const T&);

BERNPOP_INSTANTIATE(double)
BERNPOP_INSTANTIATE(Rational)
#undef BERNPOP_INSTANTIATE

template Polynomial<double> convert<double, double>(const Polynomial<double>&);
template Polynomial<double> convert<double, Rational>(const Polynomial<Rational>&);
template Polynomial<Rational> convert<Rational, double>(const Polynomial<double>&);
template Polynomial<Rational> convert<Rational, Rational>(const Polynomial<Rational>&);

}  // namespace bernpop
