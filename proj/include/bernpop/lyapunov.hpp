#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bernpop/bnb.hpp"
#include "bernpop/polynomial.hpp"
#include "bernpop/problem_io.hpp"

namespace bernpop {

/// dx/dt = f(x).
template <class T>
struct OdeSystem {
  std::size_t dimension = 0;
  std::vector<Polynomial<T>> f;
};

template <class T>
struct LyapunovCase {
  std::string name;
  OdeSystem<T> system;
  Polynomial<T> v;
  Box<T> region{{}, {}};
  /// From the benchmark file: true for "stable", false for "unstable".
  std::optional<bool> expected_stable;
};

template <class T>
struct Verdict {
  Polynomial<T> vdot;
  BnbResult<T> v_run;
  /// Run on -Vdot.
  BnbResult<T> vdot_run;
  /// Lower bounds on V and on -Vdot over the region.
  std::optional<T> v_bound;
  std::optional<T> vdot_bound;
  bool stable = false;
  /// V(0) != 0 is suspicious for a Lyapunov candidate.
  bool v_vanishes_at_origin = true;
};

/// Builds a case from a problem file carrying an "ode" section (V is the objective).
template <class T>
LyapunovCase<T> lyapunov_case(const ProblemFile<T>& file);

/// Bounds V and -Vdot over the region with zero-centred splitting. Stable iff
/// both bounds are >= -epsilon (taken from the config).
template <class T>
Verdict<T> verify_lyapunov(const LyapunovCase<T>& c, BnbConfig config);

/// Fixture directory compiled into the library; BERNPOP_DATA overrides it.
std::filesystem::path default_fixture_dir();

/// Every problem file in the directory, sorted by file name.
template <class T>
std::vector<ProblemFile<T>> benchmark_registry(const std::filesystem::path& dir = default_fixture_dir());

struct DerivativeCheck {
  std::string name;
  bool match = true;
  double max_difference = 0.0;
  /// Terms whose computed and printed coefficients differ by more than the tolerance.
  std::vector<std::string> differences;
};

/// Compares the computed Lie derivative against the printed one, term by term.
template <class T>
DerivativeCheck check_lie_derivative(const ProblemFile<T>& file, double tolerance = 1e-2);

/// Runs check_lie_derivative over every registry entry that carries a printed derivative.
std::vector<DerivativeCheck> cross_check_appendix_derivatives(const std::filesystem::path& dir = default_fixture_dir(),
                                                              double tolerance = 1e-2);

}  // namespace bernpop
