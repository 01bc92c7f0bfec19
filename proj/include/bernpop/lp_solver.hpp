#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bernpop/scalar.hpp"

namespace bernpop {

/// A variable bound; absent means infinite (only allowed in float mode).
template <class T>
using Bound = std::optional<T>;

/// minimize c'z  s.t.  A z <= rhs,  E z = d,  lower <= z <= upper.
template <class T>
struct LinearProgram {
  std::vector<T> objective;
  std::vector<std::vector<T>> ineq_rows;
  std::vector<T> ineq_rhs;
  std::vector<std::vector<T>> eq_rows;
  std::vector<T> eq_rhs;
  std::vector<Bound<T>> lower;
  std::vector<Bound<T>> upper;

  /// n variables with 0 <= z, no upper bounds, zero objective.
  static LinearProgram with_variables(std::size_t n);

  std::size_t num_vars() const { return objective.size(); }
  void add_inequality(std::vector<T> row, T rhs);
  void add_equality(std::vector<T> row, T rhs);

  /// Throws std::invalid_argument when row widths or bounds are inconsistent.
  void validate() const;
};

enum class LPStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string to_string(LPStatus status);

template <class T>
struct LPSolution {
  LPStatus status = LPStatus::Infeasible;
  T value{};
  std::vector<T> primal;
  /// Multipliers y for A z <= rhs (y <= 0) and E z = d, such that
  /// c - A'y_ineq - E'y_eq are the reduced costs at the optimum.
  std::vector<T> ineq_duals;
  std::vector<T> eq_duals;
  std::size_t iterations = 0;
  bool used_bland = false;
};

struct SimplexOptions {
  /// Iteration cap as a multiple of (rows + cols).
  std::size_t iteration_factor = 50;
  /// Degenerate pivots in a row before float mode falls back to Bland's rule.
  std::size_t stall_limit = 50;
  /// Force Bland's rule from the start (always on in rational mode).
  bool force_bland = false;
};

/// Bounded-variable primal simplex (two phases, dense tableau).
template <class T>
LPSolution<T> solve(const LinearProgram<T>& lp, const SimplexOptions& options = {});

/// Weak-duality bound for any multipliers: y_ineq is clamped to <= 0, then
///   L(y) = y'b + sum_j min_{l_j <= z_j <= u_j} (c_j - a_j'y) z_j.
/// Returns nullopt when the inner minimum is unbounded.
template <class T>
std::optional<T> lagrangian_bound(const LinearProgram<T>& lp, std::span<const T> ineq_duals,
                                  std::span<const T> eq_duals);

/// Largest constraint violation of `z` (0 when feasible).
template <class T>
T max_violation(const LinearProgram<T>& lp, std::span<const T> z);

}  // namespace bernpop
