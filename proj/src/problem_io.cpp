#include "bernpop/problem_io.hpp"

#include <fstream>
#include <sstream>

namespace bernpop {

using nlohmann::json;

namespace {

const json& require(const json& doc, const char* key, const std::string& where) {
  auto it = doc.find(key);
  if (it == doc.end()) throw InputError(where + ": missing field '" + key + "'");
  return *it;
}

template <class T>
std::vector<T> parse_vector(const json& v, std::size_t n, const std::string& where) {
  if (!v.is_array()) throw InputError(where + ": expected an array");
  if (v.size() != n)
    throw InputError(where + ": dimension mismatch (expected " + std::to_string(n) + " entries, got " +
                     std::to_string(v.size()) + ")");
  std::vector<T> out;
  for (std::size_t j = 0; j < n; ++j) out.push_back(parse_coefficient<T>(v[j]));
  return out;
}

}  // namespace

template <class T>
T parse_coefficient(const json& value) {
  try {
    if (value.is_number_integer()) return ScalarTraits<T>::from_int(value.get<std::int64_t>());
    if (value.is_number()) return ScalarTraits<T>::from_double(value.get<double>());
    if (value.is_string()) return ScalarTraits<T>::parse(value.get<std::string>());
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    throw InputError("bad coefficient " + value.dump() + ": " + e.what());
  }
  throw InputError("bad coefficient " + value.dump() + ": expected a number or a string");
}

template <class T>
Polynomial<T> parse_polynomial(const json& terms, std::size_t dimension, const std::string& where) {
  if (!terms.is_array()) throw InputError(where + ": expected an array of terms");
  Polynomial<T> p(dimension);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const std::string at = where + "[" + std::to_string(k) + "]";
    const json& term = terms[k];
    if (!term.is_object()) throw InputError(at + ": expected an object with exponents and coeff");
    const json& exps = require(term, "exponents", at);
    if (!exps.is_array()) throw InputError(at + ".exponents: expected an array");
    if (exps.size() != dimension)
      throw InputError(at + ".exponents: dimension mismatch (expected " + std::to_string(dimension) + ", got " +
                       std::to_string(exps.size()) + ")");
    MultiIndex index(dimension);
    for (std::size_t j = 0; j < dimension; ++j) {
      if (!exps[j].is_number_integer() || exps[j].get<std::int64_t>() < 0)
        throw InputError(at + ".exponents: entries must be nonnegative integers");
      const auto e = exps[j].get<std::int64_t>();
      if (e > 60) throw InputError(at + ".exponents: unsupported degree " + std::to_string(e) + " (max 60)");
      index[j] = static_cast<std::uint32_t>(e);
    }
    p.add_term(index, parse_coefficient<T>(require(term, "coeff", at)));
  }
  return p;
}

template <class T>
ProblemFile<T> parse_problem(const json& doc, const std::string& fallback_name) {
  if (!doc.is_object()) throw InputError("problem: top level must be an object");
  ProblemFile<T> pf;
  pf.name = doc.contains("name") ? doc["name"].get<std::string>() : fallback_name;
  const json& dim = require(doc, "dimension", "problem");
  if (!dim.is_number_integer() || dim.get<std::int64_t>() < 1) throw InputError("dimension: must be a positive integer");
  const std::size_t n = dim.get<std::size_t>();
  pf.dimension = n;
  if (doc.contains("variables")) pf.variables = doc["variables"].get<std::vector<std::string>>();
  pf.objective = parse_polynomial<T>(require(doc, "objective", "problem"), n, "objective");
  const json& box = require(doc, "box", "problem");
  try {
    pf.box = Box<T>(parse_vector<T>(require(box, "lower", "box"), n, "box.lower"),
                    parse_vector<T>(require(box, "upper", "box"), n, "box.upper"));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  if (doc.contains("constraints_poly")) {
    const json& cs = doc["constraints_poly"];
    if (!cs.is_array()) throw InputError("constraints_poly: expected an array");
    for (std::size_t k = 0; k < cs.size(); ++k)
      pf.constraints.push_back(parse_polynomial<T>(cs[k], n, "constraints_poly[" + std::to_string(k) + "]"));
  }
  if (doc.contains("constraints_linear")) {
    const json& lin = doc["constraints_linear"];
    const json& a = require(lin, "A", "constraints_linear");
    pf.linear_b = parse_vector<T>(require(lin, "b", "constraints_linear"), a.size(), "constraints_linear.b");
    for (std::size_t r = 0; r < a.size(); ++r) {
      pf.linear_a.push_back(parse_vector<T>(a[r], n, "constraints_linear.A[" + std::to_string(r) + "]"));
      Polynomial<T> g = Polynomial<T>::constant(n, T(-pf.linear_b[r]));
      for (std::size_t j = 0; j < n; ++j) g = g + Polynomial<T>::variable(n, j).scaled(pf.linear_a[r][j]);
      pf.constraints.push_back(std::move(g));
    }
  }
  if (doc.contains("ode")) {
    const json& ode = doc["ode"];
    if (!ode.is_array() || ode.size() != n) throw InputError("ode: expected one right-hand side per variable");
    for (std::size_t r = 0; r < n; ++r) pf.ode.push_back(parse_polynomial<T>(ode[r], n, "ode[" + std::to_string(r) + "]"));
  }
  if (doc.contains("printed_lie_derivative"))
    pf.printed_lie_derivative = parse_polynomial<T>(doc["printed_lie_derivative"], n, "printed_lie_derivative");
  if (doc.contains("expected_verdict")) pf.expected_verdict = doc["expected_verdict"].get<std::string>();
  if (doc.contains("known_optimum")) pf.known_optimum = doc["known_optimum"].get<double>();
  if (doc.contains("epsilon")) pf.epsilon = doc["epsilon"].get<double>();
  if (doc.contains("split")) {
    try {
      pf.split = parse_split(doc["split"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  return pf;
}

template <class T>
ProblemFile<T> load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open problem file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("malformed JSON in '" + path.string() + "': " + e.what());
  }
  try {
    return parse_problem<T>(doc, path.stem().string());
  } catch (const json::exception& e) {
    throw InputError("'" + path.string() + "': " + e.what());
  }
}

template <class T>
nlohmann::ordered_json polynomial_to_json(const Polynomial<T>& p) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& [index, c] : p.terms()) {
    nlohmann::ordered_json term;
    term["exponents"] = index.entries();
    if constexpr (ScalarTraits<T>::exact)
      term["coeff"] = c.get_str();
    else
      term["coeff"] = c;
    out.push_back(std::move(term));
  }
  return out;
}

#define BERNPOP_INSTANTIATE(T)                                                           \
  template T parse_coefficient<T>(const json&);                                          \
  template Polynomial<T> parse_polynomial<T>(const json&, std::size_t, const std::string&); \
  template ProblemFile<T> parse_problem<T>(const json&, const std::string&);             \
  template ProblemFile<T> load_problem<T>(const std::filesystem::path&);                 \
  template nlohmann::ordered_json polynomial_to_json(const Polynomial<T>&);

BERNPOP_INSTANTIATE(double)
BERNPOP_INSTANTIATE(Rational)
#undef BERNPOP_INSTANTIATE

}  // namespace bernpop
