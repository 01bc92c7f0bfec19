#include "bernpop/relax.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace bernpop {

std::string to_string(Level level) {
  switch (level) {
    case Level::Zero: return "0";
    case Level::FirstLP: return "first";
    case Level::One: return "1";
    case Level::Two: return "2";
  }
  return "?";
}

Level parse_level(const std::string& text) {
  if (text == "0") return Level::Zero;
  if (text == "first" || text == "first_lp" || text == "first-lp") return Level::FirstLP;
  if (text == "1") return Level::One;
  if (text == "2") return Level::Two;
  throw std::invalid_argument("unknown relaxation level '" + text + "' (expected 0, first, 1 or 2)");
}

std::size_t cut_row_count(const Degree& degree) {
  std::size_t sum = 1, full = 1;
  for (std::uint32_t d : degree) {
    sum *= static_cast<std::size_t>(d + 1) * (d + 2) / 2;
    full *= d + 1;
  }
  return sum - full;
}

template <class T>
T CutRow<T>::dot(std::span<const T> z) const {
  T s = ScalarTraits<T>::from_int(0);
  for (const auto& [k, v] : entries) s += v * z[k];
  return s;
}

template <class T>
std::vector<T> CutRow<T>::dense(std::size_t width) const {
  std::vector<T> row(width, ScalarTraits<T>::from_int(0));
  for (const auto& [k, v] : entries) row[k] = v;
  return row;
}

template <class T>
CutMatrix<T> build_cut_matrix(const Degree& degree) {
  const std::size_t n = degree.size();
  const DenseIndexer indexer(degree);

  // Univariate pieces: elev[j][k][i] lists (J, coefficient) of B_{i,k} at degree delta_j.
  std::vector<std::vector<std::vector<std::vector<std::pair<std::uint32_t, T>>>>> elev(n);
  std::vector<std::vector<UpperBoundVector<T>>> peaks(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::uint32_t d = degree[j];
    elev[j].resize(d + 1);
    for (std::uint32_t k = 0; k <= d; ++k) {
      peaks[j].push_back(upper_bounds<T>(Degree{k}));
      for (std::uint32_t i = 0; i <= k; ++i) {
        const auto full = elevation_row<T>(MultiIndex{i}, Degree{k}, Degree{d});
        std::vector<std::pair<std::uint32_t, T>> sparse;
        for (std::uint32_t c = 0; c <= d; ++c)
          if (full[c] != 0) sparse.emplace_back(c, full[c]);
        elev[j][k].push_back(std::move(sparse));
      }
    }
  }

  std::vector<Degree> orders;
  Degree K(n);
  do {
    if (K != degree) orders.push_back(K);
  } while (DenseIndexer::next(K, degree));
  std::stable_sort(orders.begin(), orders.end(),
                   [](const Degree& a, const Degree& b) { return a.total() < b.total(); });

  CutMatrix<T> cuts{degree, indexer.size(), {}};
  cuts.rows.reserve(cut_row_count(degree));
  for (const Degree& k : orders) {
    MultiIndex I(n);
    do {
      CutRow<T> row;
      row.index = I;
      row.from = k;
      row.rhs = ScalarTraits<T>::from_int(1);
      for (std::size_t j = 0; j < n; ++j) row.rhs *= peaks[j][k[j]].values[I[j]];
      // Tensor product of the per-axis sparse rows.
      std::vector<std::size_t> pos(n, 0);
      while (true) {
        T v = ScalarTraits<T>::from_int(1);
        std::size_t lin = 0;
        for (std::size_t j = 0; j < n; ++j) {
          const auto& [c, coeff] = elev[j][k[j]][I[j]][pos[j]];
          v *= coeff;
          lin += indexer.stride(j) * c;
        }
        row.entries.emplace_back(lin, v);
        std::size_t axis = n;
        while (axis-- > 0) {
          if (++pos[axis] < elev[axis][k[axis]][I[axis]].size()) break;
          pos[axis] = 0;
        }
        if (axis == static_cast<std::size_t>(-1)) break;
      }
      std::sort(row.entries.begin(), row.entries.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      cuts.rows.push_back(std::move(row));
    } while (DenseIndexer::next(I, k));
  }
  return cuts;
}

template <class T>
std::shared_ptr<const CutMatrix<T>> cached_cut_matrix(const Degree& degree) {
  static std::mutex mutex;
  static std::map<Degree, std::shared_ptr<const CutMatrix<T>>> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(degree); it != cache.end()) return it->second;
  }
  auto built = std::make_shared<const CutMatrix<T>>(build_cut_matrix<T>(degree));
  std::lock_guard lock(mutex);
  return cache.try_emplace(degree, std::move(built)).first->second;
}

namespace {

template <class T>
std::shared_ptr<const UpperBoundVector<T>> cached_upper_bounds(const Degree& degree) {
  static std::mutex mutex;
  static std::map<Degree, std::shared_ptr<const UpperBoundVector<T>>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(degree);
  if (it == cache.end()) it = cache.emplace(degree, std::make_shared<UpperBoundVector<T>>(upper_bounds<T>(degree))).first;
  return it->second;
}

template <class T>
void require_matching(const BernsteinForm<T>& form, const UpperBoundVector<T>& upper) {
  if (form.degree != upper.degree) throw std::invalid_argument("relaxation: form and upper bounds differ in degree");
}

template <class T>
std::vector<std::size_t> ascending_order(const std::vector<T>& b) {
  std::vector<std::size_t> order(b.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return b[x] < b[y]; });
  return order;
}

template <class T>
RelaxationOutcome<T> finish_lp(const LPSolution<T>& sol, const Degree& degree, const AffineMap<T>& map) {
  RelaxationOutcome<T> out;
  if (sol.status == LPStatus::Infeasible) {
    out.infeasible = true;
    return out;
  }
  if (sol.status != LPStatus::Optimal)
    throw std::runtime_error("relaxation LP failed: " + to_string(sol.status));
  out.bound = sol.value;
  out.z = sol.primal;
  out.witness = exactness_check<T>(sol.primal, degree, map);
  out.exact = out.witness.has_value();
  return out;
}

}  // namespace

template <class T>
RelaxationOutcome<T> relax0(const BernsteinForm<T>& form, const AffineMap<T>& map) {
  RelaxationOutcome<T> out;
  out.bound = min_coefficient(form).value;
  if (auto vertex = vertex_minimizer(form)) {
    const auto x = grid_point<T>(*vertex, form.degree);
    out.witness = map.apply(x);
    out.exact = true;
  }
  return out;
}

template <class T>
RelaxationOutcome<T> relax1(const BernsteinForm<T>& form, const UpperBoundVector<T>& upper, const AffineMap<T>& map) {
  require_matching(form, upper);
  const auto& b = form.coeffs;
  const auto& u = upper.values;
  const T zero = ScalarTraits<T>::from_int(0);
  const auto order = ascending_order(b);
  std::vector<T> z(b.size(), zero);
  T remaining = ScalarTraits<T>::from_int(1);
  for (std::size_t g = 0; g < order.size() && remaining > zero;) {
    std::size_t end = g;
    T group_u = zero;
    while (end < order.size() && b[order[end]] == b[order[g]]) group_u += u[order[end++]];
    if (group_u <= remaining) {
      for (std::size_t k = g; k < end; ++k) z[order[k]] = u[order[k]];
      remaining -= group_u;
    } else {
      const T share = remaining / group_u;
      for (std::size_t k = g; k < end; ++k) z[order[k]] = u[order[k]] * share;
      remaining = zero;
    }
    g = end;
  }
  if (remaining > ScalarTraits<T>::feasibility_tol())
    throw std::logic_error("relax1: upper bounds sum below one");
  RelaxationOutcome<T> out;
  out.bound = zero;
  for (std::size_t k = 0; k < b.size(); ++k) out.bound += b[k] * z[k];
  out.witness = exactness_check<T>(z, form.degree, map);
  out.exact = out.witness.has_value();
  out.z = std::move(z);
  return out;
}

template <class T>
LinearProgram<T> base_program(const BernsteinForm<T>& form, const UpperBoundVector<T>& upper) {
  require_matching(form, upper);
  const std::size_t n = form.size();
  LinearProgram<T> lp = LinearProgram<T>::with_variables(n);
  lp.objective = form.coeffs;
  for (std::size_t k = 0; k < n; ++k) lp.upper[k] = upper.values[k];
  lp.add_equality(std::vector<T>(n, ScalarTraits<T>::from_int(1)), ScalarTraits<T>::from_int(1));
  return lp;
}

template <class T>
RelaxationOutcome<T> relax1_lp(const BernsteinForm<T>& form, const UpperBoundVector<T>& upper, const AffineMap<T>& map,
                               std::span<const LinearCut<T>> extra) {
  LinearProgram<T> lp = base_program(form, upper);
  for (const auto& c : extra) lp.add_inequality(c.coeffs, c.rhs);
  auto out = finish_lp(solve(lp), form.degree, map);
  out.iterations = 1;
  return out;
}

template <class T>
T first_lp_bound(const BernsteinForm<T>& form, const UpperBoundVector<T>& upper) {
  require_matching(form, upper);
  const auto& b = form.coeffs;
  const auto order = ascending_order(b);
  const T zero = ScalarTraits<T>::from_int(0);
  const T b1 = b[order[0]];
  if (b1 >= zero) return b1;
  // l: last (1-based) position with b_l <= 0.
  std::size_t l = 0;
  for (std::size_t k = 0; k < order.size(); ++k)
    if (b[order[k]] <= zero) l = k + 1;
  // q: largest i in [1, l-1] with u_1 + ... + u_i <= 1.
  std::size_t q = 0;
  T usum = zero;
  T weighted = zero;
  T weighted_at_q = zero;
  for (std::size_t i = 1; i + 1 <= l; ++i) {
    usum += upper.values[order[i - 1]];
    weighted += b[order[i - 1]] * upper.values[order[i - 1]];
    if (usum > ScalarTraits<T>::from_int(1)) break;
    q = i;
    weighted_at_q = weighted;
  }
  const T candidate = b[order[q]] + weighted_at_q;
  return candidate > b1 ? candidate : b1;
}

template <class T>
RelaxationOutcome<T> relax2_iterative(const BernsteinForm<T>& form, const UpperBoundVector<T>& upper,
                                      const CutMatrix<T>& cuts, const AffineMap<T>& map,
                                      std::span<const LinearCut<T>> extra) {
  if (cuts.degree != form.degree) throw std::invalid_argument("relax2: cut matrix degree differs from form");
  LinearProgram<T> lp = base_program(form, upper);
  for (const auto& c : extra) lp.add_inequality(c.coeffs, c.rhs);
  std::vector<bool> active(cuts.rows.size(), false);
  std::vector<std::size_t> activated;
  const T tol = ScalarTraits<T>::cut_tol();
  std::size_t rounds = 0;
  while (true) {
    const LPSolution<T> sol = solve(lp);
    ++rounds;
    if (sol.status != LPStatus::Optimal) {
      auto out = finish_lp(sol, form.degree, map);
      out.activated_rows = activated;
      out.iterations = rounds;
      return out;
    }
    std::size_t added = 0;
    for (std::size_t r = 0; r < cuts.rows.size(); ++r) {
      if (active[r]) continue;
      const auto& row = cuts.rows[r];
      if (row.dot(sol.primal) - row.rhs > tol) {
        active[r] = true;
        activated.push_back(r);
        lp.add_inequality(row.dense(cuts.columns), row.rhs);
        ++added;
      }
    }
    if (added == 0) {
      auto out = finish_lp(sol, form.degree, map);
      out.activated_rows = std::move(activated);
      out.iterations = rounds;
      return out;
    }
  }
}

template <class T>
RelaxationOutcome<T> relax2_monolithic(const BernsteinForm<T>& form, const UpperBoundVector<T>& upper,
                                       const CutMatrix<T>& cuts, const AffineMap<T>& map,
                                       std::span<const LinearCut<T>> extra) {
  if (cuts.degree != form.degree) throw std::invalid_argument("relax2: cut matrix degree differs from form");
  LinearProgram<T> lp = base_program(form, upper);
  for (const auto& c : extra) lp.add_inequality(c.coeffs, c.rhs);
  for (const auto& row : cuts.rows) lp.add_inequality(row.dense(cuts.columns), row.rhs);
  auto out = finish_lp(solve(lp), form.degree, map);
  out.activated_rows.resize(cuts.rows.size());
  std::iota(out.activated_rows.begin(), out.activated_rows.end(), std::size_t{0});
  out.iterations = 1;
  return out;
}

template <class T>
RelaxationOutcome<T> relax(Level level, const BernsteinForm<T>& form, const AffineMap<T>& map,
                           std::span<const LinearCut<T>> extra) {
  switch (level) {
    case Level::Zero:
      return relax0(form, map);
    case Level::FirstLP: {
      RelaxationOutcome<T> out;
      out.bound = first_lp_bound(form, *cached_upper_bounds<T>(form.degree));
      return out;
    }
    case Level::One: {
      const auto upper = cached_upper_bounds<T>(form.degree);
      return extra.empty() ? relax1(form, *upper, map) : relax1_lp(form, *upper, map, extra);
    }
    case Level::Two:
      return relax2_iterative(form, *cached_upper_bounds<T>(form.degree), *cached_cut_matrix<T>(form.degree), map,
                              extra);
  }
  throw std::invalid_argument("relax: unknown level");
}

template <class T>
std::optional<std::vector<T>> exactness_check(std::span<const T> z, const Degree& degree, const AffineMap<T>& map) {
  const DenseIndexer indexer(degree);
  if (z.size() != indexer.size()) throw std::invalid_argument("exactness_check: z has wrong length");
  const std::size_t n = degree.size();
  std::vector<T> x(n, ScalarTraits<T>::from_int(0));
  MultiIndex I(n);
  std::size_t k = 0;
  do {
    if (z[k] != 0) {
      for (std::size_t j = 0; j < n; ++j)
        if (degree[j] != 0 && I[j] != 0) x[j] += ScalarTraits<T>::from_ratio(I[j], degree[j]) * z[k];
    }
    ++k;
  } while (DenseIndexer::next(I, degree));
  for (auto& v : x) {
    if (v < 0) v = ScalarTraits<T>::from_int(0);
    if (v > 1) v = ScalarTraits<T>::from_int(1);
  }
  const auto basis = basis_vector<T>(degree, x);
  const T tol = ScalarTraits<T>::exactness_tol();
  for (std::size_t m = 0; m < basis.size(); ++m)
    if (!ScalarTraits<T>::near(z[m], basis[m], tol)) return std::nullopt;
  return map.apply(x);
}

template <class T>
std::vector<LinearCut<T>> polyhedral_cuts(const std::vector<std::vector<T>>& a0, const std::vector<T>& b0,
                                          const Degree& degree) {
  if (a0.size() != b0.size()) throw std::invalid_argument("polyhedral_cuts: A0 and b0 differ in row count");
  const std::size_t n = degree.size();
  const DenseIndexer indexer(degree);
  std::vector<LinearCut<T>> out;
  for (std::size_t r = 0; r < a0.size(); ++r) {
    if (a0[r].size() != n) throw std::invalid_argument("polyhedral_cuts: dimension mismatch");
    LinearCut<T> cut{std::vector<T>(indexer.size(), ScalarTraits<T>::from_int(0)), b0[r]};
    MultiIndex I(n);
    std::size_t k = 0;
    do {
      for (std::size_t j = 0; j < n; ++j)
        if (degree[j] != 0) cut.coeffs[k] += a0[r][j] * ScalarTraits<T>::from_ratio(I[j], degree[j]);
      ++k;
    } while (DenseIndexer::next(I, degree));
    out.push_back(std::move(cut));
  }
  return out;
}

template <class T>
std::vector<LinearCut<T>> semialgebraic_cuts(std::span<const Polynomial<T>> constraints, const Degree& degree) {
  std::vector<LinearCut<T>> out;
  for (const auto& g : constraints) out.push_back({to_bernstein(g, degree).coeffs, ScalarTraits<T>::from_int(0)});
  return out;
}

template <class T>
LinearProgram<T> add_polyhedral_cuts(LinearProgram<T> lp, const std::vector<std::vector<T>>& a0,
                                     const std::vector<T>& b0, const Degree& degree) {
  for (auto& c : polyhedral_cuts(a0, b0, degree)) lp.add_inequality(std::move(c.coeffs), std::move(c.rhs));
  return lp;
}

template <class T>
LinearProgram<T> add_semialgebraic_cuts(LinearProgram<T> lp, std::span<const Polynomial<T>> constraints,
                                        const Degree& degree) {
  for (auto& c : semialgebraic_cuts(constraints, degree)) lp.add_inequality(std::move(c.coeffs), std::move(c.rhs));
  return lp;
}

template <class T>
std::vector<LinearCut<T>> dsos_cuts(const Degree& degree, std::uint32_t d) {
  const std::size_t n = degree.size();
  std::vector<LinearCut<T>> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (2 * d > std::min(degree[i], degree[j]))
        throw std::invalid_argument("dsos_cuts: 2d exceeds the degree on axes " + std::to_string(i + 1) + "," +
                                    std::to_string(j + 1));
      for (int sign : {-1, 1}) {
        const Polynomial<T> base =
            Polynomial<T>::variable(n, i) + Polynomial<T>::variable(n, j).scaled(ScalarTraits<T>::from_int(sign));
        Polynomial<T> power = Polynomial<T>::constant(n, ScalarTraits<T>::from_int(1));
        for (std::uint32_t e = 0; e < 2 * d; ++e) power = power * base;
        auto coeffs = to_bernstein(power, degree).coeffs;
        for (auto& c : coeffs) c = -c;
        out.push_back({std::move(coeffs), ScalarTraits<T>::from_int(0)});
      }
    }
  }
  return out;
}

#define BERNPOP_INSTANTIATE(T)                                                                                 \
  template struct CutRow<T>;                                                                                   \
  template CutMatrix<T> build_cut_matrix(const Degree&);                                                       \
  template std::shared_ptr<const CutMatrix<T>> cached_cut_matrix(const Degree&);                               \
  template RelaxationOutcome<T> relax0(const BernsteinForm<T>&, const AffineMap<T>&);                          \
  template RelaxationOutcome<T> relax1(const BernsteinForm<T>&, const UpperBoundVector<T>&, const AffineMap<T>&); \
  template RelaxationOutcome<T> relax1_lp(const BernsteinForm<T>&, const UpperBoundVector<T>&, const AffineMap<T>&, \
                                          std::span<const LinearCut<T>>);                                      \
  template T first_lp_bound(const BernsteinForm<T>&, const UpperBoundVector<T>&);                              \
  template RelaxationOutcome<T> relax2_iterative(const BernsteinForm<T>&, const UpperBoundVector<T>&,          \
                                                 const CutMatrix<T>&, const AffineMap<T>&,                     \
                                                 std::span<const LinearCut<T>>);                               \
  template RelaxationOutcome<T> relax2_monolithic(const BernsteinForm<T>&, const UpperBoundVector<T>&,         \
                                                  const CutMatrix<T>&, const AffineMap<T>&,                    \
                                                  std::span<const LinearCut<T>>);                              \
  template RelaxationOutcome<T> relax(Level, const BernsteinForm<T>&, const AffineMap<T>&,                     \
                                      std::span<const LinearCut<T>>);                                          \
  template std::optional<std::vector<T>> exactness_check(std::span<const T>, const Degree&, const AffineMap<T>&); \
  template LinearProgram<T> base_program(const BernsteinForm<T>&, const UpperBoundVector<T>&);                 \
  template std::vector<LinearCut<T>> polyhedral_cuts(const std::vector<std::vector<T>>&, const std::vector<T>&, \
                                                     const Degree&);                                           \
  template std::vector<LinearCut<T>> semialgebraic_cuts(std::span<const Polynomial<T>>, const Degree&);        \
  template LinearProgram<T> add_polyhedral_cuts(LinearProgram<T>, const std::vector<std::vector<T>>&,          \
                                                const std::vector<T>&, const Degree&);                         \
  template LinearProgram<T> add_semialgebraic_cuts(LinearProgram<T>, std::span<const Polynomial<T>>,           \
                                                   const Degree&);                                             \
  template std::vector<LinearCut<T>> dsos_cuts(const Degree&, std::uint32_t);

BERNPOP_INSTANTIATE(double)
BERNPOP_INSTANTIATE(Rational)
#undef BERNPOP_INSTANTIATE

}  // namespace bernpop
