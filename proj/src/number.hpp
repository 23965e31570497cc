#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>
#include <variant>

namespace sw {

using Rational = boost::multiprecision::cpp_rational;

/// A parameter value that is either an exact rational or a binary float.
///
/// Text of the form "a/b" or "a" (integers) parses exactly; anything with a
/// decimal point or exponent parses as a double and puts the owning
/// parameter set into float mode.
class Number {
 public:
  Number() : v_(Rational(0)) {}
  Number(Rational r) : v_(std::move(r)) {}  // NOLINT(google-explicit-constructor)
  Number(double d) : v_(d) {}               // NOLINT(google-explicit-constructor)
  Number(int i) : v_(Rational(i)) {}        // NOLINT(google-explicit-constructor)

  static Number parse(std::string_view text);

  bool exact() const { return std::holds_alternative<Rational>(v_); }
  const Rational& rational() const { return std::get<Rational>(v_); }
  double value() const;
  std::string str() const;

  friend bool operator==(const Number& a, const Number& b) { return a.v_ == b.v_; }

 private:
  std::variant<Rational, double> v_;
};

double to_double(const Rational& r);
std::string to_string(const Rational& r);
Rational parse_rational(std::string_view text);

}  // namespace sw
