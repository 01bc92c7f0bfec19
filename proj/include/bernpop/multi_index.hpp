#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace bernpop {

/// A multi-index I = (i_1, ..., i_n) of naturals. Ordering via operator<=>
/// is lexicographic (used for map keys and tie breaking); the componentwise
/// partial order I <= J is `leq`.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t dim) : e_(dim, 0) {}
  MultiIndex(std::initializer_list<std::uint32_t> v) : e_(v) {}
  explicit MultiIndex(std::vector<std::uint32_t> v) : e_(std::move(v)) {}

  std::size_t size() const { return e_.size(); }
  std::uint32_t operator[](std::size_t j) const { return e_[j]; }
  std::uint32_t& operator[](std::size_t j) { return e_[j]; }
  const std::vector<std::uint32_t>& entries() const { return e_; }
  auto begin() const { return e_.begin(); }
  auto end() const { return e_.end(); }

  /// |I| = i_1 + ... + i_n.
  std::uint64_t total() const;
  bool is_zero() const;

  /// Componentwise I <= J. Throws on dimension mismatch.
  bool leq(const MultiIndex& other) const;

  MultiIndex operator+(const MultiIndex& other) const;
  /// Componentwise max.
  MultiIndex max(const MultiIndex& other) const;
  /// I_{r,k}: shift coordinate r by k (must stay nonnegative).
  MultiIndex shifted(std::size_t r, int k) const;
  /// Drops coordinate r.
  MultiIndex without(std::size_t r) const;

  std::string to_string() const;

  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<std::uint32_t> e_;
};

/// Maximal degree vector delta; same shape as a multi-index.
using Degree = MultiIndex;

/// Exact binomial coefficient C(n, k) (0 when k > n). Throws std::overflow_error
/// past the internal Pascal table (n <= 66).
std::uint64_t binomial(std::uint32_t n, std::uint32_t k);

/// Product of binomials C(I, J) = prod_j C(i_j, j_j).
std::uint64_t binomial(const MultiIndex& top, const MultiIndex& bottom);

/// Row-major mixed-radix linearisation of all I <= delta.
/// The last coordinate varies fastest (stride_j = prod_{l>j}(delta_l+1)), so
/// linear order coincides with lexicographic order of the multi-indices.
class DenseIndexer {
 public:
  explicit DenseIndexer(const Degree& degree);

  const Degree& degree() const { return degree_; }
  std::size_t dimension() const { return degree_.size(); }
  std::size_t size() const { return size_; }
  std::size_t stride(std::size_t j) const { return strides_[j]; }

  std::size_t linear(const MultiIndex& index) const;
  MultiIndex multi(std::size_t linear) const;

  /// Advances `index` to the lexicographic successor within the box
  /// 0 <= index <= bound. Returns false after the last element.
  static bool next(MultiIndex& index, const MultiIndex& bound);

 private:
  Degree degree_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

}  // namespace bernpop
