#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace hartogs {

using Rational = boost::rational<std::int64_t>;

// Largest integer not exceeding r.
std::int64_t floor(const Rational& r);

double to_double(const Rational& r);

// "5/3", "2", "-1/4". Throws InvalidArgument on malformed input.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& r);

// An integrability exponent: a finite rational p >= 1, or infinity.
class Exponent {
 public:
  Exponent(Rational p);  // NOLINT: implicit on purpose, p-values read naturally
  Exponent(std::int64_t p) : Exponent(Rational(p)) {}  // NOLINT

  static Exponent infinity();

  bool is_infinite() const { return infinite_; }
  // The finite value; throws InvalidArgument for infinity.
  const Rational& value() const;
  double to_double() const;

  // Accepts the rational syntax plus "inf" / "infinity".
  static Exponent parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const Exponent& a, const Exponent& b);
  friend bool operator<(const Exponent& a, const Exponent& b);

 private:
  Exponent() = default;
  bool infinite_ = false;
  Rational value_{1};
};

}  // namespace hartogs
