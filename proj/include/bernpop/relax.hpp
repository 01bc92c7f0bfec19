#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bernpop/bernstein.hpp"
#include "bernpop/lp_solver.hpp"
#include "bernpop/polynomial.hpp"

namespace bernpop {

/// Relaxation strength.
enum class Level { Zero, FirstLP, One, Two };

std::string to_string(Level level);
/// Accepts "0", "first", "1", "2". Throws std::invalid_argument otherwise.
Level parse_level(const std::string& text);

/// One row b^(I,K) . z <= B_{I,K}(I/K), stored sparsely.
template <class T>
struct CutRow {
  std::vector<std::pair<std::size_t, T>> entries;
  T rhs;
  MultiIndex index;  // I
  Degree from;       // K

  T dot(std::span<const T> z) const;
  std::vector<T> dense(std::size_t width) const;
};

/// All elevation cuts for a degree delta, ordered by |K|, then K, then I.
template <class T>
struct CutMatrix {
  Degree degree;
  std::size_t columns = 0;
  std::vector<CutRow<T>> rows;
};

/// Expected row count sum_{K<=delta} prod(k_j+1) - prod(delta_j+1).
std::size_t cut_row_count(const Degree& degree);

template <class T>
CutMatrix<T> build_cut_matrix(const Degree& degree);

/// Process-wide cache of build_cut_matrix; safe to call concurrently.
template <class T>
std::shared_ptr<const CutMatrix<T>> cached_cut_matrix(const Degree& degree);

/// A dense linear row coeffs . z <= rhs over the degree-delta variables.
template <class T>
struct LinearCut {
  std::vector<T> coeffs;
  T rhs;
};

template <class T>
struct RelaxationOutcome {
  T bound{};
  /// Optimal z (absent at levels 0 and first).
  std::optional<std::vector<T>> z;
  /// Ids of activated CutMatrix rows, in activation order.
  std::vector<std::size_t> activated_rows;
  /// Global minimizer in original coordinates, when the relaxation is exact.
  std::optional<std::vector<T>> witness;
  bool exact = false;
  /// The LP has no feasible point (only possible with constraint rows).
  bool infeasible = false;
  /// LP solves (cut-loop rounds at level 2).
  std::size_t iterations = 0;
};

/// Smallest Bernstein coefficient; exact when a vertex attains it.
template <class T>
RelaxationOutcome<T> relax0(const BernsteinForm<T>& form, const AffineMap<T>& map);

/// Closed-form optimum of  min b.z  s.t.  sum z = 1, 0 <= z <= u.
/// Coefficients are taken in increasing order; a tied group that cannot be
/// filled completely shares the remainder in proportion to u.
template <class T>
RelaxationOutcome<T> relax1(const BernsteinForm<T>& form, const UpperBoundVector<T>& upper,
                            const AffineMap<T>& map);

/// The same LP as relax1 solved with the simplex (plus optional extra rows).
template <class T>
RelaxationOutcome<T> relax1_lp(const BernsteinForm<T>& form, const UpperBoundVector<T>& upper,
                               const AffineMap<T>& map, std::span<const LinearCut<T>> extra = {});

/// max(b_1, b_{q+1} + sum_{j<=q} b_j u_j) over coefficients sorted ascending.
template <class T>
T first_lp_bound(const BernsteinForm<T>& form, const UpperBoundVector<T>& upper);

/// Cut loop: start from the level-1 LP and add every violated cut row until
/// none is violated.
template <class T>
RelaxationOutcome<T> relax2_iterative(const BernsteinForm<T>& form, const UpperBoundVector<T>& upper,
                                      const CutMatrix<T>& cuts, const AffineMap<T>& map,
                                      std::span<const LinearCut<T>> extra = {});

/// One LP with every cut row.
template <class T>
RelaxationOutcome<T> relax2_monolithic(const BernsteinForm<T>& form, const UpperBoundVector<T>& upper,
                                       const CutMatrix<T>& cuts, const AffineMap<T>& map,
                                       std::span<const LinearCut<T>> extra = {});

/// Runs the requested level with cached upper bounds and cut matrices.
/// Extra rows are honoured at levels 1 and 2.
template <class T>
RelaxationOutcome<T> relax(Level level, const BernsteinForm<T>& form, const AffineMap<T>& map,
                           std::span<const LinearCut<T>> extra = {});

/// x~_j = sum_I (i_j/delta_j) z_I; accepted iff z_I = B_{I,delta}(x~) for all I.
/// Returns map(x~) on acceptance.
template <class T>
std::optional<std::vector<T>> exactness_check(std::span<const T> z, const Degree& degree, const AffineMap<T>& map);

/// The level-1 LP shell: objective b, sum z = 1, 0 <= z <= u.
template <class T>
LinearProgram<T> base_program(const BernsteinForm<T>& form, const UpperBoundVector<T>& upper);

/// Rows sum_I (A0 I/delta) z_I <= b0 for a polyhedron A0 x <= b0 in unit-box
/// coordinates.
template <class T>
std::vector<LinearCut<T>> polyhedral_cuts(const std::vector<std::vector<T>>& a0, const std::vector<T>& b0,
                                          const Degree& degree);

/// Rows b_delta(g) . z <= 0 for constraints g(x) <= 0 in unit-box coordinates.
template <class T>
std::vector<LinearCut<T>> semialgebraic_cuts(std::span<const Polynomial<T>> constraints, const Degree& degree);

template <class T>
LinearProgram<T> add_polyhedral_cuts(LinearProgram<T> lp, const std::vector<std::vector<T>>& a0,
                                     const std::vector<T>& b0, const Degree& degree);

template <class T>
LinearProgram<T> add_semialgebraic_cuts(LinearProgram<T> lp, std::span<const Polynomial<T>> constraints,
                                        const Degree& degree);

/// Rows -b(D_ij) . z <= 0 and -b(E_ij) . z <= 0 with D_ij = (x_i - x_j)^(2d),
/// E_ij = (x_i + x_j)^(2d), for every pair i < j. Requires 2d <= min(delta_i, delta_j).
template <class T>
std::vector<LinearCut<T>> dsos_cuts(const Degree& degree, std::uint32_t d);

}  // namespace bernpop
