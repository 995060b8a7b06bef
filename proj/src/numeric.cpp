#include "andor/numeric.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace andor {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto s = trim(text);
  auto slash = s.find('/');
  auto num = trim(s.substr(0, slash));
  auto den = slash == std::string_view::npos ? std::string_view{"1"} : trim(s.substr(slash + 1));
  if (!is_integer_literal(num) || !is_integer_literal(den)) {
    throw ParseError("not a rational literal: '" + std::string(text) + "'");
  }
  if (num[0] == '+') num.remove_prefix(1);
  if (den[0] == '+') den.remove_prefix(1);
  boost::multiprecision::mpz_int n{std::string(num)}, d{std::string(den)};
  if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  return Rational(n, d);
}

double parse_decimal(std::string_view text) {
  auto s = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError("not a decimal literal: '" + std::string(text) + "'");
  }
  return v;
}

std::string format_value(const Rational& v) {
  auto n = boost::multiprecision::numerator(v);
  auto d = boost::multiprecision::denominator(v);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const Rational& v) { return v.convert_to<double>(); }

Rational rationalize(double x, std::int64_t max_den) {
  if (!std::isfinite(x)) throw std::invalid_argument("rationalize: non-finite input");
  if (max_den < 1) throw std::invalid_argument("rationalize: max_den < 1");
  using boost::multiprecision::mpz_int;
  const Rational target(x);
  // Convergents p_n/q_n: p_n = a_n p_{n-1} + p_{n-2}, seeded with p_{-1}=1, p_{-2}=0, q_{-1}=0, q_{-2}=1.
  mpz_int p2 = 0, p1 = 1, q2 = 1, q1 = 0;
  Rational rest = target;
  Rational best;
  bool have = false;
  for (int iter = 0; iter < 256; ++iter) {
    const mpz_int& num = boost::multiprecision::numerator(rest);
    const mpz_int& den = boost::multiprecision::denominator(rest);
    mpz_int a = num / den;
    if (num < 0 && a * den != num) a -= 1;  // floor
    mpz_int p = a * p1 + p2;
    mpz_int q = a * q1 + q2;
    if (q > max_den) {
      mpz_int t = (mpz_int(max_den) - q2) / q1;
      if (t > 0) {
        Rational semi(t * p1 + p2, t * q1 + q2);
        if (!have || abs(semi - target) < abs(best - target)) best = semi;
        have = true;
      }
      break;
    }
    p2 = p1; p1 = p;
    q2 = q1; q1 = q;
    best = Rational(p, q);
    have = true;
    Rational frac = rest - Rational(a);
    if (frac == 0) break;
    rest = 1 / frac;
  }
  return best;
}

}  // namespace andor
