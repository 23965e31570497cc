#include "number.hpp"

#include "error.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace sw {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_integer_text(std::string_view s) {
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

boost::multiprecision::cpp_int parse_int(std::string_view s) {
  bool neg = false;
  if (s.front() == '+' || s.front() == '-') {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  boost::multiprecision::cpp_int v{std::string(s)};
  if (neg) v = -v;
  return v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto s = trim(text);
  auto slash = s.find('/');
  if (slash == std::string_view::npos) {
    if (!is_integer_text(s)) fail(ErrorCode::Parse, "not a rational: '" + std::string(text) + "'");
    return Rational(parse_int(s));
  }
  auto num = trim(s.substr(0, slash));
  auto den = trim(s.substr(slash + 1));
  if (!is_integer_text(num) || !is_integer_text(den))
    fail(ErrorCode::Parse, "not a rational: '" + std::string(text) + "'");
  auto d = parse_int(den);
  if (d == 0) fail(ErrorCode::Parse, "zero denominator in '" + std::string(text) + "'");
  return Rational(parse_int(num), d);
}

Number Number::parse(std::string_view text) {
  auto s = trim(text);
  if (s.empty()) fail(ErrorCode::Parse, "empty number");
  if (s.find('/') != std::string_view::npos || is_integer_text(s)) return Number(parse_rational(s));
  double d = 0;
  auto first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), d);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(d))
    fail(ErrorCode::Parse, "not a number: '" + std::string(text) + "'");
  return Number(d);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << '/' << denominator(r);
  return os.str();
}

double Number::value() const {
  if (exact()) return to_double(rational());
  return std::get<double>(v_);
}

std::string Number::str() const {
  if (exact()) return to_string(rational());
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, std::get<double>(v_));
  return std::string(buf, ptr);
}

}  // namespace sw
