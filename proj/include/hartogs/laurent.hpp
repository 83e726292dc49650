#pragma once

#include <complex>
#include <functional>
#include <initializer_list>
#include <map>
#include <utility>

#include <json.hpp>

#include "hartogs/lattice.hpp"

namespace hartogs {

using Complex = std::complex<double>;

// z^k for integer k (negative k divides). Exact repeated squaring.
Complex ipow(Complex z, int k);

// Finite Laurent polynomial sum_a c_a z1^a1 z2^a2. Zero coefficients are
// never stored, so size() counts the support.
class LaurentPolynomial {
 public:
  using Terms = std::map<MultiIndex, Complex>;

  LaurentPolynomial() = default;
  explicit LaurentPolynomial(Terms terms);
  LaurentPolynomial(std::initializer_list<std::pair<const MultiIndex, Complex>> terms);

  static LaurentPolynomial monomial(MultiIndex a, Complex c = 1.0);

  const Terms& terms() const { return terms_; }
  Complex coefficient(MultiIndex a) const;
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  // Smallest N with the support inside |a|_inf <= N; 0 for the zero polynomial.
  int degree_box() const;

  LaurentPolynomial operator+(const LaurentPolynomial& o) const;
  LaurentPolynomial operator-(const LaurentPolynomial& o) const;
  LaurentPolynomial operator*(Complex c) const;
  LaurentPolynomial times_monomial(MultiIndex b) const;

  LaurentPolynomial filter(const std::function<bool(MultiIndex)>& keep) const;
  bool supported_in(const std::function<bool(MultiIndex)>& pred) const;

  Complex operator()(Complex z1, Complex z2) const;

  // [{a1, a2, re, im}, ...] sorted by (a1, a2).
  nlohmann::ordered_json to_json() const;
  static LaurentPolynomial from_json(const nlohmann::json& j);

  friend bool operator==(const LaurentPolynomial&, const LaurentPolynomial&) = default;

 private:
  Terms terms_;
};

inline LaurentPolynomial operator*(Complex c, const LaurentPolynomial& f) { return f * c; }

// Largest |c_a - d_a| over the union of supports.
double max_coefficient_distance(const LaurentPolynomial& f, const LaurentPolynomial& g);

}  // namespace hartogs
