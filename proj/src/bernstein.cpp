#include "bernpop/bernstein.hpp"

#include <stdexcept>
#include <string>

namespace bernpop {

namespace {

template <class T>
T one() {
  return ScalarTraits<T>::from_int(1);
}

template <class T>
T zero() {
  return ScalarTraits<T>::from_int(0);
}

template <class T>
T ratio(std::uint64_t num, std::uint64_t den) {
  return ScalarTraits<T>::from_ratio(num, den);
}

template <class T>
T power(const T& base, std::uint32_t e) {
  T r = one<T>();
  for (std::uint32_t k = 0; k < e; ++k) r *= base;
  return r;
}

// beta_{i,d}(i/d), the maximum of a univariate Bernstein basis polynomial.
template <class T>
T univariate_peak(std::uint32_t i, std::uint32_t d) {
  if (d == 0) return one<T>();
  const T t = ratio<T>(i, d);
  const T s = ratio<T>(d - i, d);
  return ScalarTraits<T>::from_int(static_cast<std::int64_t>(binomial(d, i))) * power(t, i) * power(s, d - i);
}

void require_leq(const MultiIndex& a, const MultiIndex& b, const char* what) {
  if (a.size() != b.size()) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  if (!a.leq(b)) throw std::invalid_argument(std::string(what) + ": " + a.to_string() + " exceeds " + b.to_string());
}

}  // namespace

template <class T>
BernsteinForm<T> to_bernstein(const Polynomial<T>& p, const Degree& degree) {
  if (p.dimension() != degree.size()) throw std::invalid_argument("to_bernstein: dimension mismatch");
  const Degree own = p.degree();
  if (!own.leq(degree))
    throw std::invalid_argument("to_bernstein: degree " + degree.to_string() + " is below polynomial degree " +
                                own.to_string());
  const DenseIndexer indexer(degree);
  const std::size_t n = degree.size();
  BernsteinForm<T> form{degree, std::vector<T>(indexer.size(), zero<T>()), own};

  // Each monomial p_J x^J contributes p_J * prod_j C(i_j,J_j)/C(d_j,J_j) to every I >= J.
  std::vector<std::vector<T>> factors(n);
  for (const auto& [J, c] : p.terms()) {
    for (std::size_t j = 0; j < n; ++j) {
      factors[j].assign(degree[j] + 1, zero<T>());
      const std::uint64_t den = binomial(degree[j], J[j]);
      for (std::uint32_t i = J[j]; i <= degree[j]; ++i) factors[j][i] = ratio<T>(binomial(i, J[j]), den);
    }
    MultiIndex span_bound(n), offset(n);
    for (std::size_t j = 0; j < n; ++j) span_bound[j] = degree[j] - J[j];
    do {
      T v = c;
      std::size_t k = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const std::uint32_t i = J[j] + offset[j];
        v *= factors[j][i];
        k += indexer.stride(j) * i;
      }
      form.coeffs[k] += v;
    } while (DenseIndexer::next(offset, span_bound));
  }
  return form;
}

template <class T>
Polynomial<T> to_monomial(const BernsteinForm<T>& form) {
  const Degree& degree = form.degree;
  const std::size_t n = degree.size();
  const DenseIndexer indexer(degree);
  std::vector<T> data = form.coeffs;
  // Univariate change of basis applied along each axis:
  //   mono_k = sum_{i<=k} C(d,i) C(d-i,k-i) (-1)^(k-i) b_i.
  for (std::size_t axis = 0; axis < n; ++axis) {
    const std::uint32_t d = degree[axis];
    const std::size_t stride = indexer.stride(axis);
    std::vector<T> next(data.size(), zero<T>());
    for (std::size_t base = 0; base < data.size(); ++base) {
      if ((base / stride) % (d + 1) != 0) continue;  // base is the start of a fiber
      for (std::uint32_t k = 0; k <= d; ++k) {
        T acc = zero<T>();
        for (std::uint32_t i = 0; i <= k; ++i) {
          const auto mag = static_cast<std::int64_t>(binomial(d, i) * binomial(d - i, k - i));
          acc += ScalarTraits<T>::from_int((k - i) % 2 ? -mag : mag) * data[base + i * stride];
        }
        next[base + k * stride] = acc;
      }
    }
    data = std::move(next);
  }
  Polynomial<T> p(n);
  for (std::size_t k = 0; k < data.size(); ++k) p.add_term(indexer.multi(k), data[k]);
  return p;
}

template <class T>
T bernstein_eval(const BernsteinForm<T>& form, std::span<const T> x) {
  const std::size_t n = form.dimension();
  if (x.size() != n) throw std::invalid_argument("bernstein_eval: dimension mismatch");
  for (std::size_t j = 0; j < n; ++j)
    if (x[j] < zero<T>() || x[j] > one<T>()) throw std::invalid_argument("bernstein_eval: point outside unit box");
  // Contract the trailing (contiguous) axis first with de Casteljau.
  std::vector<T> data = form.coeffs;
  for (std::size_t axis = n; axis-- > 0;) {
    const std::uint32_t d = form.degree[axis];
    const std::size_t fiber = d + 1;
    const std::size_t count = data.size() / fiber;
    const T t = x[axis];
    const T s = one<T>() - t;
    std::vector<T> next(count);
    std::vector<T> work(fiber);
    for (std::size_t f = 0; f < count; ++f) {
      for (std::size_t i = 0; i < fiber; ++i) work[i] = data[f * fiber + i];
      for (std::uint32_t r = 1; r <= d; ++r)
        for (std::uint32_t i = 0; i + r <= d; ++i) work[i] = s * work[i] + t * work[i + 1];
      next[f] = work[0];
    }
    data = std::move(next);
  }
  return data.empty() ? zero<T>() : data[0];
}

template <class T>
T bernstein_basis(const MultiIndex& index, const Degree& degree, std::span<const T> x) {
  require_leq(index, degree, "bernstein_basis");
  if (x.size() != degree.size()) throw std::invalid_argument("bernstein_basis: dimension mismatch");
  T v = one<T>();
  for (std::size_t j = 0; j < degree.size(); ++j) {
    const std::uint32_t i = index[j], d = degree[j];
    v *= ScalarTraits<T>::from_int(static_cast<std::int64_t>(binomial(d, i)));
    v *= power(x[j], i);
    v *= power(T(one<T>() - x[j]), d - i);
  }
  return v;
}

template <class T>
std::vector<T> basis_vector(const Degree& degree, std::span<const T> x) {
  const std::size_t n = degree.size();
  if (x.size() != n) throw std::invalid_argument("basis_vector: dimension mismatch");
  std::vector<std::vector<T>> axis(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::uint32_t d = degree[j];
    const T s = one<T>() - x[j];
    for (std::uint32_t i = 0; i <= d; ++i)
      axis[j].push_back(ScalarTraits<T>::from_int(static_cast<std::int64_t>(binomial(d, i))) * power(x[j], i) *
                        power(s, d - i));
  }
  std::vector<T> out;
  out.reserve(DenseIndexer(degree).size());
  MultiIndex index(n);
  do {
    T v = one<T>();
    for (std::size_t j = 0; j < n; ++j) v *= axis[j][index[j]];
    out.push_back(v);
  } while (DenseIndexer::next(index, degree));
  return out;
}

template <class T>
UpperBoundVector<T> upper_bounds(const Degree& degree) {
  const DenseIndexer indexer(degree);
  const std::size_t n = degree.size();
  std::vector<std::vector<T>> peaks(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::uint32_t i = 0; i <= degree[j]; ++i) peaks[j].push_back(univariate_peak<T>(i, degree[j]));
  UpperBoundVector<T> u{degree, std::vector<T>(indexer.size())};
  MultiIndex index(n);
  std::size_t k = 0;
  do {
    T v = one<T>();
    for (std::size_t j = 0; j < n; ++j) v *= peaks[j][index[j]];
    u.values[k++] = v;
  } while (DenseIndexer::next(index, degree));
  return u;
}

template <class T>
std::vector<T> elevation_row(const MultiIndex& index, const Degree& from, const Degree& to) {
  require_leq(index, from, "elevation_row");
  require_leq(from, to, "elevation_row");
  const std::size_t n = to.size();
  // Expand B_{I,K}(x) = prod_j C(k_j,i_j) x_j^i_j (1-x_j)^(k_j-i_j) in monomials.
  Polynomial<T> basis = Polynomial<T>::constant(n, one<T>());
  for (std::size_t j = 0; j < n; ++j) {
    const std::uint32_t i = index[j], k = from[j];
    Polynomial<T> factor(n);
    for (std::uint32_t m = 0; m <= k - i; ++m) {
      MultiIndex e(n);
      e[j] = i + m;
      const auto mag = static_cast<std::int64_t>(binomial(k, i) * binomial(k - i, m));
      factor.add_term(e, ScalarTraits<T>::from_int(m % 2 ? -mag : mag));
    }
    basis = basis * factor;
  }
  return to_bernstein(basis, to).coeffs;
}

template <class T>
std::vector<T> monomial_bernstein_row(const MultiIndex& index, const Degree& degree) {
  require_leq(index, degree, "monomial_bernstein_row");
  const DenseIndexer indexer(degree);
  std::vector<T> row(indexer.size(), zero<T>());
  const std::uint64_t den = binomial(degree, index);
  MultiIndex J(degree.size());
  std::size_t k = 0;
  do {
    if (index.leq(J)) row[k] = ratio<T>(binomial(J, index), den);
    ++k;
  } while (DenseIndexer::next(J, degree));
  return row;
}

template <class T>
MinCoefficient<T> min_coefficient(const BernsteinForm<T>& form) {
  if (form.coeffs.empty()) throw std::invalid_argument("min_coefficient: empty form");
  std::size_t best = 0;
  for (std::size_t k = 1; k < form.coeffs.size(); ++k)
    if (form.coeffs[k] < form.coeffs[best]) best = k;
  return {form.coeffs[best], DenseIndexer(form.degree).multi(best)};
}

template <class T>
T max_coefficient(const BernsteinForm<T>& form) {
  if (form.coeffs.empty()) throw std::invalid_argument("max_coefficient: empty form");
  T best = form.coeffs[0];
  for (const auto& c : form.coeffs)
    if (c > best) best = c;
  return best;
}

bool is_vertex_index(const MultiIndex& index, const Degree& degree) {
  require_leq(index, degree, "vertex_condition");
  for (std::size_t j = 0; j < degree.size(); ++j)
    if (index[j] != 0 && index[j] != degree[j]) return false;
  return true;
}

template <class T>
bool vertex_condition(const BernsteinForm<T>&form, const MultiIndex& argmin) {
  return is_vertex_index(argmin, form.degree);
}

template <class T>
std::optional<MultiIndex> vertex_minimizer(const BernsteinForm<T>& form) {
  const T lowest = min_coefficient(form).value;
  const DenseIndexer indexer(form.degree);
  const std::size_t n = form.dimension();
  // Enumerate the 2^n corners only.
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    MultiIndex corner(n);
    for (std::size_t j = 0; j < n; ++j) corner[j] = (mask >> (n - 1 - j)) & 1 ? form.degree[j] : 0;
    if (form.coeffs[indexer.linear(corner)] == lowest) return corner;
  }
  return std::nullopt;
}

template <class T>
std::vector<T> grid_point(const MultiIndex& index, const Degree& degree) {
  require_leq(index, degree, "grid_point");
  std::vector<T> x(degree.size(), zero<T>());
  for (std::size_t j = 0; j < degree.size(); ++j)
    if (degree[j] != 0) x[j] = ratio<T>(index[j], degree[j]);
  return x;
}

#define BERNPOP_INSTANTIATE(T)                                                                      \
  template BernsteinForm<T> to_bernstein(const Polynomial<T>&, const Degree&);                      \
  template Polynomial<T> to_monomial(const BernsteinForm<T>&);                                      \
  template T bernstein_eval(const BernsteinForm<T>&, std::span<const T>);                           \
  template T bernstein_basis(const MultiIndex&, const Degree&, std::span<const T>);                 \
  template std::vector<T> basis_vector(const Degree&, std::span<const T>);                         \
  template UpperBoundVector<T> upper_bounds(const Degree&);                                         \
  template std::vector<T> elevation_row(const MultiIndex&, const Degree&, const Degree&);           \
  template std::vector<T> monomial_bernstein_row(const MultiIndex&, const Degree&);                 \
  template MinCoefficient<T> min_coefficient(const BernsteinForm<T>&);                              \
  template T max_coefficient(const BernsteinForm<T>&);                                              \
  template bool vertex_condition(const BernsteinForm<T>&, const MultiIndex&);                       \
  template std::optional<MultiIndex> vertex_minimizer(const BernsteinForm<T>&);                     \
  template std::vector<T> grid_point(const MultiIndex&, const Degree&);

BERNPOP_INSTANTIATE(double)
BERNPOP_INSTANTIATE(Rational)
#undef BERNPOP_INSTANTIATE

}  // namespace bernpop
