#include "mahler/arith.hpp"

#include "mahler/error.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

namespace mahler {

std::string_view to_string(Kernel k) { return k == Kernel::Rational ? "rational" : "double"; }

Kernel parse_kernel(std::string_view s) {
  if (s == "rational") return Kernel::Rational;
  if (s == "double") return Kernel::Double;
  throw Error(ErrorCode::InvalidArgument, "unknown kernel '" + std::string(s) + "'");
}

Rational snap_rational(double v, int bits) {
  if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite coordinate");
  const double scaled = std::nearbyint(std::ldexp(v, bits));
  Rational q(scaled);
  mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(bits));
  return q;
}

namespace {

[[noreturn]] void bad_number(std::string_view text) {
  throw Error(ErrorCode::InvalidArgument, "malformed number '" + std::string(text) + "'");
}

mpz_class pow10(unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) bad_number(text);

  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_rational(text.substr(0, slash));
    Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) bad_number(text);
    Rational q = num / den;
    q.canonicalize();
    return q;
  }

  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = text[pos] == '-';
    ++pos;
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      any_digit = true;
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) bad_number(text);
  long exponent = 0;
  if (pos < text.size()) {
    if (text[pos] != 'e' && text[pos] != 'E') bad_number(text);
    ++pos;
    bool exp_negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      exp_negative = text[pos] == '-';
      ++pos;
    }
    if (pos >= text.size()) bad_number(text);
    for (; pos < text.size(); ++pos) {
      if (!std::isdigit(static_cast<unsigned char>(text[pos]))) bad_number(text);
      exponent = exponent * 10 + (text[pos] - '0');
      if (exponent > 100000) bad_number(text);
    }
    if (exp_negative) exponent = -exponent;
  }
  mpz_class mantissa(digits, 10);
  const long shift = exponent - frac_digits;
  Rational q;
  if (shift >= 0) {
    q = Rational(mantissa * pow10(static_cast<unsigned long>(shift)));
  } else {
    q = Rational(mantissa, pow10(static_cast<unsigned long>(-shift)));
    q.canonicalize();
  }
  return negative ? Rational(-q) : q;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_rational(const Rational& q) { return q.get_str(); }

Real operator*(const Real& a, const Real& b) {
  if (a.is_exact() && b.is_exact()) return Real(Rational(a.rational() * b.rational()));
  return Real(a.value() * b.value());
}

Real operator-(const Real& a, const Real& b) {
  if (a.is_exact() && b.is_exact()) return Real(Rational(a.rational() - b.rational()));
  return Real(a.value() - b.value());
}

}  // namespace mahler
