#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bernpop/polynomial.hpp"
#include "bernpop/relax.hpp"

namespace bernpop {

enum class SplitStrategy { LongestEdge, ZeroCentered };

std::string to_string(SplitStrategy split);
/// Accepts "longest" and "zero".
SplitStrategy parse_split(const std::string& text);

struct BnbConfig {
  Level level = Level::Zero;
  /// Relative tolerance of the cutoff and termination tests.
  double epsilon = 1e-9;
  /// Budget of popped boxes, shared with edge subproblems.
  std::size_t max_boxes = 1000000;
  /// Boxes whose widest edge is below this are not split further.
  double min_box_width = 1e-12;
  SplitStrategy split = SplitStrategy::LongestEdge;
  bool monotonicity = true;
  /// Bernstein degree per box; defaults to the problem's degree vector.
  std::optional<Degree> degree;
  /// Worker threads used to bound the children of popped boxes.
  unsigned jobs = 1;
};

struct BnbStats {
  std::size_t subdivisions = 0;   // Sub
  std::size_t cutoffs = 0;        // Cutoff
  std::size_t mono = 0;           // Mono
  std::size_t edge_subdivisions = 0;  // Sub*
  std::size_t edge_cutoffs = 0;       // Cutoff*
  std::size_t exact_boxes = 0;
  std::size_t infeasible_boxes = 0;
  std::size_t unsplittable = 0;
  double elapsed = 0.0;       // Time
  double edge_elapsed = 0.0;  // Time*
};

template <class T>
struct BnbResult {
  /// Absent means +infinity (no feasible point seen / problem infeasible).
  std::optional<T> lower;
  std::optional<T> upper;
  std::vector<T> witness;
  BnbStats stats;
  bool converged = false;
};

/// A constrained problem: minimize objective over {x in box : g_i(x) <= 0}.
template <class T>
struct Problem {
  Polynomial<T> objective;
  std::vector<Polynomial<T>> constraints;
  Box<T> box;
};

/// Componentwise max of the objective and constraint degrees.
template <class T>
Degree problem_degree(const Polynomial<T>& objective, std::span<const Polynomial<T>> constraints);

template <class T>
BnbResult<T> branch_and_bound(const Polynomial<T>& objective, std::span<const Polynomial<T>> constraints,
                              const Box<T>& box, const BnbConfig& config);

enum class AxisSign { Increasing, Decreasing, Mixed };

char to_char(AxisSign sign);

/// Sign of every partial derivative over the box, read off its Bernstein
/// coefficients. An identically zero derivative counts as increasing.
template <class T>
std::vector<AxisSign> monotonicity_test(const Polynomial<T>& p, const Box<T>& box);

/// Bisects the widest axis (lowest index on ties) at its midpoint, or at 0 for
/// ZeroCentered when 0 lies strictly inside that axis. Throws std::domain_error
/// when the widest edge is not above min_width.
template <class T>
std::pair<Box<T>, Box<T>> split_box(const Box<T>& box, SplitStrategy strategy, double min_width = 0.0);

/// True when the box bound cannot improve the incumbent by more than the
/// relative tolerance: pB >= pHat - eps * max(1, |pHat|).
template <class T>
bool cutoff_test(const T& box_bound, const T& incumbent, double epsilon);

/// Best of p at the box centre and at the grid point of the argmin Bernstein
/// coefficient, among points with g_i <= 0. Returns nullopt when neither is
/// feasible.
template <class T>
std::optional<std::pair<T, std::vector<T>>> sample_upper_bound(const Polynomial<T>& p,
                                                               std::span<const Polynomial<T>> constraints,
                                                               const Box<T>& box, const BernsteinForm<T>& unit_form);

template <class T>
struct EdgeProblem {
  Polynomial<T> objective;
  /// Box over the remaining axes (dimension 0 when every axis is fixed).
  std::vector<T> lower, upper;
  std::vector<std::size_t> free_axes;
  /// Full-dimension point with the fixed coordinates filled in.
  std::vector<T> anchor;

  /// Embeds a point of the reduced problem back into the full space.
  std::vector<T> lift(std::span<const T> reduced) const;
};

/// Substitutes x_r = lower_r for increasing axes and x_r = upper_r for
/// decreasing ones.
template <class T>
EdgeProblem<T> edge_subproblem(const Polynomial<T>& p, const Box<T>& box, std::span<const AxisSign> signs);

}  // namespace bernpop
