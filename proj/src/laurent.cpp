#include "hartogs/laurent.hpp"

#include <algorithm>
#include <cmath>

#include "hartogs/errors.hpp"

namespace hartogs {

Complex ipow(Complex z, int k) {
  if (k < 0) return Complex(1.0) / ipow(z, -k);
  Complex result(1.0);
  Complex base = z;
  unsigned e = static_cast<unsigned>(k);
  while (e) {
    if (e & 1U) result *= base;
    base *= base;
    e >>= 1U;
  }
  return result;
}

LaurentPolynomial::LaurentPolynomial(Terms terms) : terms_(std::move(terms)) {
  std::erase_if(terms_, [](const auto& kv) { return kv.second == Complex(0.0); });
}

LaurentPolynomial::LaurentPolynomial(
    std::initializer_list<std::pair<const MultiIndex, Complex>> terms)
    : LaurentPolynomial(Terms(terms)) {}

LaurentPolynomial LaurentPolynomial::monomial(MultiIndex a, Complex c) {
  return LaurentPolynomial(Terms{{a, c}});
}

Complex LaurentPolynomial::coefficient(MultiIndex a) const {
  auto it = terms_.find(a);
  return it == terms_.end() ? Complex(0.0) : it->second;
}

int LaurentPolynomial::degree_box() const {
  int n = 0;
  for (const auto& [a, c] : terms_) n = std::max(n, a.sup_norm());
  return n;
}

LaurentPolynomial LaurentPolynomial::operator+(const LaurentPolynomial& o) const {
  Terms out = terms_;
  for (const auto& [a, c] : o.terms_) out[a] += c;
  return LaurentPolynomial(std::move(out));
}

LaurentPolynomial LaurentPolynomial::operator-(const LaurentPolynomial& o) const {
  return *this + o * Complex(-1.0);
}

LaurentPolynomial LaurentPolynomial::operator*(Complex c) const {
  Terms out;
  for (const auto& [a, v] : terms_) out.emplace(a, v * c);
  return LaurentPolynomial(std::move(out));
}

LaurentPolynomial LaurentPolynomial::times_monomial(MultiIndex b) const {
  Terms out;
  for (const auto& [a, v] : terms_) out.emplace(a + b, v);
  return LaurentPolynomial(std::move(out));
}

LaurentPolynomial LaurentPolynomial::filter(const std::function<bool(MultiIndex)>& keep) const {
  Terms out;
  for (const auto& [a, v] : terms_) {
    if (keep(a)) out.emplace(a, v);
  }
  return LaurentPolynomial(std::move(out));
}

bool LaurentPolynomial::supported_in(const std::function<bool(MultiIndex)>& pred) const {
  return std::all_of(terms_.begin(), terms_.end(), [&](const auto& kv) { return pred(kv.first); });
}

Complex LaurentPolynomial::operator()(Complex z1, Complex z2) const {
  Complex sum(0.0);
  for (const auto& [a, c] : terms_) sum += c * ipow(z1, a.a1) * ipow(z2, a.a2);
  return sum;
}

nlohmann::ordered_json LaurentPolynomial::to_json() const {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& [a, c] : terms_) {
    nlohmann::ordered_json t;
    t["a1"] = a.a1;
    t["a2"] = a.a2;
    t["re"] = c.real();
    t["im"] = c.imag();
    arr.push_back(std::move(t));
  }
  return arr;
}

LaurentPolynomial LaurentPolynomial::from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InvalidArgument("Laurent polynomial JSON must be an array");
  Terms out;
  for (const auto& t : j) {
    const MultiIndex a{t.at("a1").get<int>(), t.at("a2").get<int>()};
    out[a] += Complex(t.at("re").get<double>(), t.value("im", 0.0));
  }
  return LaurentPolynomial(std::move(out));
}

double max_coefficient_distance(const LaurentPolynomial& f, const LaurentPolynomial& g) {
  double d = 0.0;
  const auto diff = f - g;
  for (const auto& [a, c] : diff.terms()) d = std::max(d, std::abs(c));
  return d;
}

}  // namespace hartogs
