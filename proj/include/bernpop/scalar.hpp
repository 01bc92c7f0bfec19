#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <type_traits>

#include <gmpxx.h>

namespace bernpop {

/// Exact rational coefficient type.
using Rational = mpq_class;

/// Arithmetic policy for the two coefficient fields the library is
/// instantiated with: binary64 and arbitrary-precision rationals.
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr const char* name = "float";

  static double from_int(std::int64_t v) { return static_cast<double>(v); }
  static double from_ratio(std::uint64_t num, std::uint64_t den) {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  static double from_double(double v) { return v; }
  static double to_double(double v) { return v; }
  static double abs(double v) { return std::fabs(v); }

  /// Feasibility tolerance used when checking LP solutions.
  static double feasibility_tol() { return 1e-8; }
  /// Pivot / reduced-cost tolerance inside the simplex.
  static double pivot_tol() { return 1e-11; }
  /// Violation threshold for activating a cut row.
  static double cut_tol() { return 1e-9; }
  /// Tolerance for recognising z* = B(x~) in the exactness test.
  static double exactness_tol() { return 1e-8; }

  static bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

  static double parse(std::string_view text);
  static std::string to_string(double v);
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr const char* name = "rational";

  static Rational from_int(std::int64_t v) { return Rational(static_cast<long>(v)); }
  static Rational from_ratio(std::uint64_t num, std::uint64_t den) {
    Rational r(mpz_class(static_cast<unsigned long>(num)), mpz_class(static_cast<unsigned long>(den)));
    r.canonicalize();
    return r;
  }
  /// Exact value of the shortest decimal that round-trips `v`.
  static Rational from_double(double v);
  static double to_double(const Rational& v) { return v.get_d(); }
  static Rational abs(const Rational& v) { return ::abs(v); }

  static Rational feasibility_tol() { return Rational(0); }
  static Rational pivot_tol() { return Rational(0); }
  static Rational cut_tol() { return Rational(0); }
  static Rational exactness_tol() { return Rational(0); }

  static bool near(const Rational& a, const Rational& b, const Rational&) { return a == b; }

  /// Accepts integers, "p/q" fractions and plain or exponent decimals.
  static Rational parse(std::string_view text);
  static std::string to_string(const Rational& v) { return v.get_str(); }
};

inline double to_double(double v) { return v; }
inline double to_double(const Rational& v) { return v.get_d(); }

/// Converts between the two scalar fields (double -> rational goes through the
/// shortest round-trip decimal).
template <class To>
To scalar_cast(double v) {
  if constexpr (std::is_same_v<To, double>)
    return v;
  else
    return ScalarTraits<Rational>::from_double(v);
}

template <class To>
To scalar_cast(const Rational& v) {
  if constexpr (std::is_same_v<To, double>)
    return v.get_d();
  else
    return v;
}

}  // namespace bernpop
