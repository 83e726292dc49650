#include "hartogs/rational.hpp"

#include <charconv>
#include <limits>

#include "hartogs/errors.hpp"

namespace hartogs {

std::int64_t floor(const Rational& r) {
  const auto num = r.numerator();
  const auto den = r.denominator();  // always positive after normalization
  auto q = num / den;
  if (num % den != 0 && num < 0) --q;
  return q;
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

namespace {

std::int64_t parse_int(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw InvalidArgument("not an integer: '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  const auto den = parse_int(text.substr(slash + 1));
  if (den == 0) throw InvalidArgument("zero denominator in '" + std::string(text) + "'");
  return Rational(parse_int(text.substr(0, slash)), den);
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Exponent::Exponent(Rational p) : value_(p) {
  if (p < Rational(1)) throw InvalidArgument("exponent " + hartogs::to_string(p) + " is below 1");
}

Exponent Exponent::infinity() {
  Exponent e;
  e.infinite_ = true;
  return e;
}

const Rational& Exponent::value() const {
  if (infinite_) throw InvalidArgument("infinite exponent has no finite value");
  return value_;
}

double Exponent::to_double() const {
  return infinite_ ? std::numeric_limits<double>::infinity() : hartogs::to_double(value_);
}

Exponent Exponent::parse(std::string_view text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return infinity();
  return Exponent(parse_rational(text));
}

std::string Exponent::to_string() const {
  return infinite_ ? "inf" : hartogs::to_string(value_);
}

bool operator==(const Exponent& a, const Exponent& b) {
  if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
  return a.value_ == b.value_;
}

bool operator<(const Exponent& a, const Exponent& b) {
  if (a.infinite_) return false;
  if (b.infinite_) return true;
  return a.value_ < b.value_;
}

}  // namespace hartogs
