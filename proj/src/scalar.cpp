#include "bernpop/scalar.hpp"

#include <charconv>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace bernpop {

namespace {

std::string trimmed(std::string_view text) {
  std::size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

// Parses an optionally signed decimal "123.456e-7" exactly.
Rational parse_decimal(const std::string& s) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) negative = s[pos++] == '-';
  std::string digits;
  long exponent = 0;
  bool any_digit = false, seen_point = false;
  for (; pos < s.size(); ++pos) {
    const char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      any_digit = true;
      if (seen_point) --exponent;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw std::invalid_argument("malformed number '" + s + "'");
  if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
    ++pos;
    const char* first = s.data() + pos;
    if (pos < s.size() && s[pos] == '+') ++first;
    long e10 = 0;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), e10);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw std::invalid_argument("malformed exponent in '" + s + "'");
    exponent += e10;
    pos = s.size();
  }
  if (pos != s.size()) throw std::invalid_argument("malformed number '" + s + "'");
  mpz_class num(digits, 10);
  mpz_class den(1);
  mpz_class ten(10);
  mpz_class scale;
  mpz_pow_ui(scale.get_mpz_t(), ten.get_mpz_t(), static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  if (exponent < 0)
    den = scale;
  else
    num *= scale;
  Rational r(negative ? mpz_class(-num) : num, den);
  r.canonicalize();
  return r;
}

}  // namespace

double ScalarTraits<double>::parse(std::string_view text) {
  const std::string s = trimmed(text);
  if (const auto slash = s.find('/'); slash != std::string::npos)
    return ScalarTraits<Rational>::parse(s).get_d();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw std::invalid_argument("malformed number '" + s + "'");
  return v;
}

std::string ScalarTraits<double>::to_string(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("double formatting failed");
  return std::string(buf, ptr);
}

Rational ScalarTraits<Rational>::from_double(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite value has no rational representation");
  return parse_decimal(ScalarTraits<double>::to_string(v));
}

Rational ScalarTraits<Rational>::parse(std::string_view text) {
  const std::string s = trimmed(text);
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    const Rational num = parse_decimal(trimmed(std::string_view(s).substr(0, slash)));
    const Rational den = parse_decimal(trimmed(std::string_view(s).substr(slash + 1)));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    return num / den;
  }
  return parse_decimal(s);
}

}  // namespace bernpop
