#include "bernpop/multi_index.hpp"

#include <array>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bernpop {

namespace {

constexpr std::uint32_t kPascalRows = 67;

using PascalTable = std::array<std::array<std::uint64_t, kPascalRows>, kPascalRows>;

PascalTable make_pascal() {
  PascalTable t{};
  for (std::uint32_t n = 0; n < kPascalRows; ++n) {
    t[n][0] = 1;
    for (std::uint32_t k = 1; k <= n; ++k) t[n][k] = t[n - 1][k - 1] + (k < n ? t[n - 1][k] : 0);
  }
  return t;
}

const PascalTable& pascal() {
  static const PascalTable table = make_pascal();
  return table;
}

void check_same_dim(const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size()) throw std::invalid_argument("multi-index dimension mismatch");
}

}  // namespace

std::uint64_t MultiIndex::total() const {
  return std::accumulate(e_.begin(), e_.end(), std::uint64_t{0});
}

bool MultiIndex::is_zero() const {
  for (auto v : e_)
    if (v != 0) return false;
  return true;
}

bool MultiIndex::leq(const MultiIndex& other) const {
  check_same_dim(*this, other);
  for (std::size_t j = 0; j < e_.size(); ++j)
    if (e_[j] > other.e_[j]) return false;
  return true;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  check_same_dim(*this, other);
  MultiIndex r(*this);
  for (std::size_t j = 0; j < e_.size(); ++j) r.e_[j] += other.e_[j];
  return r;
}

MultiIndex MultiIndex::max(const MultiIndex& other) const {
  check_same_dim(*this, other);
  MultiIndex r(*this);
  for (std::size_t j = 0; j < e_.size(); ++j) r.e_[j] = std::max(e_[j], other.e_[j]);
  return r;
}

MultiIndex MultiIndex::shifted(std::size_t r, int k) const {
  if (r >= e_.size()) throw std::out_of_range("axis out of range");
  const std::int64_t v = static_cast<std::int64_t>(e_[r]) + k;
  if (v < 0) throw std::out_of_range("shifted multi-index would be negative");
  MultiIndex out(*this);
  out.e_[r] = static_cast<std::uint32_t>(v);
  return out;
}

MultiIndex MultiIndex::without(std::size_t r) const {
  if (r >= e_.size()) throw std::out_of_range("axis out of range");
  std::vector<std::uint32_t> v;
  v.reserve(e_.size() - 1);
  for (std::size_t j = 0; j < e_.size(); ++j)
    if (j != r) v.push_back(e_[j]);
  return MultiIndex(std::move(v));
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t j = 0; j < e_.size(); ++j) os << (j ? "," : "") << e_[j];
  os << ')';
  return os.str();
}

std::uint64_t binomial(std::uint32_t n, std::uint32_t k) {
  if (k > n) return 0;
  if (n >= kPascalRows) throw std::overflow_error("binomial coefficient table exceeded");
  return pascal()[n][k];
}

std::uint64_t binomial(const MultiIndex& top, const MultiIndex& bottom) {
  check_same_dim(top, bottom);
  std::uint64_t r = 1;
  for (std::size_t j = 0; j < top.size(); ++j) r *= binomial(top[j], bottom[j]);
  return r;
}

DenseIndexer::DenseIndexer(const Degree& degree) : degree_(degree), strides_(degree.size(), 1) {
  for (std::size_t j = degree.size(); j-- > 0;) {
    strides_[j] = size_;
    size_ *= static_cast<std::size_t>(degree[j]) + 1;
  }
}

std::size_t DenseIndexer::linear(const MultiIndex& index) const {
  if (index.size() != degree_.size()) throw std::invalid_argument("multi-index dimension mismatch");
  std::size_t k = 0;
  for (std::size_t j = 0; j < index.size(); ++j) {
    if (index[j] > degree_[j]) throw std::out_of_range("multi-index exceeds degree " + degree_.to_string());
    k += strides_[j] * index[j];
  }
  return k;
}

MultiIndex DenseIndexer::multi(std::size_t linear) const {
  MultiIndex index(degree_.size());
  for (std::size_t j = 0; j < degree_.size(); ++j) {
    index[j] = static_cast<std::uint32_t>(linear / strides_[j]);
    linear %= strides_[j];
  }
  return index;
}

bool DenseIndexer::next(MultiIndex& index, const MultiIndex& bound) {
  for (std::size_t j = index.size(); j-- > 0;) {
    if (index[j] < bound[j]) {
      ++index[j];
      return true;
    }
    index[j] = 0;
  }
  return false;
}

}  // namespace bernpop
