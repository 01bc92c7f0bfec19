#include "bernpop/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <set>

#ifndef BERNPOP_FIXTURE_DIR
#define BERNPOP_FIXTURE_DIR "data/problems"
#endif

namespace bernpop {

template <class T>
LyapunovCase<T> lyapunov_case(const ProblemFile<T>& file) {
  if (file.ode.size() != file.dimension) throw InputError(file.name + ": missing or incomplete 'ode' section");
  LyapunovCase<T> c;
  c.name = file.name;
  c.system = {file.dimension, file.ode};
  c.v = file.objective;
  c.region = file.box;
  if (file.expected_verdict) {
    if (*file.expected_verdict == "stable")
      c.expected_stable = true;
    else if (*file.expected_verdict == "unstable")
      c.expected_stable = false;
    else
      throw InputError(file.name + ": expected_verdict must be 'stable' or 'unstable'");
  }
  return c;
}

template <class T>
Verdict<T> verify_lyapunov(const LyapunovCase<T>& c, BnbConfig config) {
  const std::vector<T> origin(c.v.dimension(), ScalarTraits<T>::from_int(0));
  if (!c.region.contains(origin)) throw std::invalid_argument(c.name + ": region does not contain the origin");
  config.split = SplitStrategy::ZeroCentered;
  Verdict<T> out;
  out.v_vanishes_at_origin = c.v.evaluate(origin) == 0;
  out.vdot = lie_derivative<T>(c.v, c.system.f);
  const Polynomial<T> neg_vdot = -out.vdot;
  auto run = [&](const Polynomial<T>& p) { return branch_and_bound<T>(p, {}, c.region, config); };
  if (config.jobs > 1) {
    auto v_future = std::async(std::launch::async, run, std::cref(c.v));
    out.vdot_run = run(neg_vdot);
    out.v_run = v_future.get();
  } else {
    out.v_run = run(c.v);
    out.vdot_run = run(neg_vdot);
  }
  out.v_bound = out.v_run.lower;
  out.vdot_bound = out.vdot_run.lower;
  const T tol = -scalar_cast<T>(config.epsilon);
  auto ok = [&](const std::optional<T>& b) { return !b || *b >= tol; };
  out.stable = ok(out.v_bound) && ok(out.vdot_bound);
  return out;
}

std::filesystem::path default_fixture_dir() {
  if (const char* env = std::getenv("BERNPOP_DATA"); env && *env) return env;
  return BERNPOP_FIXTURE_DIR;
}

template <class T>
std::vector<ProblemFile<T>> benchmark_registry(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw InputError("fixture directory '" + dir.string() + "' not found");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<ProblemFile<T>> out;
  for (const auto& f : files) out.push_back(load_problem<T>(f));
  return out;
}

template <class T>
DerivativeCheck check_lie_derivative(const ProblemFile<T>& file, double tolerance) {
  DerivativeCheck check;
  check.name = file.name;
  if (!file.printed_lie_derivative) return check;
  const Polynomial<T> computed = lie_derivative<T>(file.objective, file.ode);
  const Polynomial<T>& printed = *file.printed_lie_derivative;
  std::set<MultiIndex> keys;
  for (const auto& [index, c] : computed.terms()) keys.insert(index);
  for (const auto& [index, c] : printed.terms()) keys.insert(index);
  for (const auto& index : keys) {
    const double a = to_double(computed.coefficient(index));
    const double b = to_double(printed.coefficient(index));
    const double diff = std::fabs(a - b);
    check.max_difference = std::max(check.max_difference, diff);
    if (diff > tolerance) {
      check.match = false;
      check.differences.push_back(index.to_string() + ": computed " + ScalarTraits<double>::to_string(a) +
                                  ", printed " + ScalarTraits<double>::to_string(b));
    }
  }
  return check;
}

std::vector<DerivativeCheck> cross_check_appendix_derivatives(const std::filesystem::path& dir, double tolerance) {
  std::vector<DerivativeCheck> out;
  for (const auto& file : benchmark_registry<Rational>(dir))
    if (file.printed_lie_derivative) out.push_back(check_lie_derivative(file, tolerance));
  return out;
}

#define BERNPOP_INSTANTIATE(T)                                                                        \
  template LyapunovCase<T> lyapunov_case(const ProblemFile<T>&);                                      \
  template Verdict<T> verify_lyapunov(const LyapunovCase<T>&, BnbConfig);                             \
  template std::vector<ProblemFile<T>> benchmark_registry(const std::filesystem::path&);              \
  template DerivativeCheck check_lie_derivative(const ProblemFile<T>&, double);

BERNPOP_INSTANTIATE(double)
BERNPOP_INSTANTIATE(Rational)
#undef BERNPOP_INSTANTIATE

}  // namespace bernpop
