#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bernpop/bnb.hpp"
#include "bernpop/polynomial.hpp"

namespace bernpop {

/// Malformed or inconsistent problem input.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A problem file: the core schema (dimension, objective, box, constraints)
/// plus optional benchmark metadata.
template <class T>
struct ProblemFile {
  std::string name;
  std::size_t dimension = 0;
  std::vector<std::string> variables;
  Polynomial<T> objective;
  Box<T> box{{}, {}};
  /// g(x) <= 0, polynomial constraints followed by converted linear rows a.x - b.
  std::vector<Polynomial<T>> constraints;
  std::vector<std::vector<T>> linear_a;
  std::vector<T> linear_b;
  /// dx/dt = f(x), present for stability benchmarks.
  std::vector<Polynomial<T>> ode;
  std::optional<Polynomial<T>> printed_lie_derivative;
  std::optional<std::string> expected_verdict;
  std::optional<double> known_optimum;
  std::optional<double> epsilon;
  std::optional<SplitStrategy> split;
};

/// Coefficient from a JSON number or a string such as "1/3" or "-2.5e-1".
template <class T>
T parse_coefficient(const nlohmann::json& value);

template <class T>
Polynomial<T> parse_polynomial(const nlohmann::json& terms, std::size_t dimension, const std::string& where);

template <class T>
ProblemFile<T> parse_problem(const nlohmann::json& doc, const std::string& fallback_name);

/// Reads and parses a problem file; the name defaults to the file stem.
template <class T>
ProblemFile<T> load_problem(const std::filesystem::path& path);

template <class T>
nlohmann::ordered_json polynomial_to_json(const Polynomial<T>& p);

}  // namespace bernpop
