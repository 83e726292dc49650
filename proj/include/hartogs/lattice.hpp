#pragma once

// Exact lattice arithmetic for the generalized Hartogs triangle
//   H_{m/n} = { (z1, z2) : |z1|^{m/n} < |z2| < 1 },  gcd(m, n) = 1.
//
// A Laurent monomial e_a = z1^a1 z2^a2 lies in L^p(H_{m/n}) exactly when
// a1 >= 0 and n*a1 + m*a2 >= floor(1 - 2(m+n)/p). Everything here is integer
// or rational; no floating floor is ever taken.

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "hartogs/rational.hpp"

namespace hartogs {

class HartogsTriangle {
 public:
  // Throws InvalidArgument unless m, n >= 1 and gcd(m, n) = 1.
  HartogsTriangle(int m, int n);

  int m() const { return m_; }
  int n() const { return n_; }
  Rational gamma() const { return Rational(m_, n_); }

  // n/m as a double, the exponent of the shadow boundary r1 = r2^{n/m}.
  double shadow_exponent() const { return static_cast<double>(n_) / m_; }

  // Number of thresholds, 2m + 2n; also the first exponent with bounded
  // allowable monomials.
  int threshold_count() const { return 2 * (m_ + n_); }

  // True when |z1|^{m/n} < |z2| < 1.
  bool contains(double abs_z1, double abs_z2) const;

  friend bool operator==(const HartogsTriangle&, const HartogsTriangle&) = default;

 private:
  int m_;
  int n_;
};

struct MultiIndex {
  int a1 = 0;
  int a2 = 0;

  int sup_norm() const;
  // n*a1 + m*a2, the lattice line the index sits on.
  int line(const HartogsTriangle& h) const { return h.n() * a1 + h.m() * a2; }

  friend MultiIndex operator-(MultiIndex a, MultiIndex b) { return {a.a1 - b.a1, a.a2 - b.a2}; }
  friend MultiIndex operator+(MultiIndex a, MultiIndex b) { return {a.a1 + b.a1, a.a2 + b.a2}; }
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

std::ostream& operator<<(std::ostream& os, const MultiIndex& a);

struct Threshold {
  int k;
  Rational p;  // (2m+2n)/(1-k)
};

// floor(1 - 2(m+n)/p); the lowest admissible line n*a1 + m*a2 at exponent p.
// The infinite exponent routes to p = 2m + 2n and yields 0.
int floor_index(const HartogsTriangle& h, const Exponent& p);

bool is_allowable(const HartogsTriangle& h, const Exponent& p, MultiIndex a);

// All 2m+2n thresholds, ascending in p: k = 1-2m-2n, ..., 0.
std::vector<Threshold> thresholds(const HartogsTriangle& h);

// The k with p in [p_k, p_{k+1}), where p_1 is read as infinity.
int classify_p(const HartogsTriangle& h, const Exponent& p);

// ||e_a||_{L^p}. Throws NotAllowable when the monomial is not in L^p.
// For the infinite exponent this is the sup norm, which is 1.
double monomial_lp_norm(const HartogsTriangle& h, MultiIndex a, const Exponent& p);

// Operator norm of the coefficient functional a_a on A^p: 1/||e_a||_p.
double coefficient_norm(const HartogsTriangle& h, MultiIndex a, const Exponent& p);

// ||e_a||_2^2 = m pi^2 / ((a1+1)(n a1 + m a2 + m + n)).
double l2_norm_squared(const HartogsTriangle& h, MultiIndex a);

// The unique b in [0, m-1] with n*b == r (mod m). Throws InvalidArgument
// when r is outside [0, m-1].
int sigma_permutation(const HartogsTriangle& h, int r);

// The unique (b1, b2) with 0 <= b1 <= m-1 and n*b1 + m*b2 = k. Later points
// on the same line are (b1 + j*m, b2 - j*n).
MultiIndex line_base_point(const HartogsTriangle& h, int k);

// C(a, b) with d^b e_a = C(a, b) e_{a-b}. Requires b1, b2 >= 0.
std::int64_t derivative_coefficient(MultiIndex a, MultiIndex b);

// e_a in A^p_k: every derivative of order <= k either vanishes or is allowable.
bool sobolev_allowable(const HartogsTriangle& h, const Exponent& p, int order, MultiIndex a);

// Indices with |a|_inf <= box satisfying pred, sorted by (a1, a2).
std::vector<MultiIndex> enumerate_box(int box, const std::function<bool(MultiIndex)>& pred);

// L^p-allowable indices with |a|_inf <= box.
std::vector<MultiIndex> allowable_in_box(const HartogsTriangle& h, const Exponent& p, int box);

// Exponent window (lower, upper) in which a type-A operator on H_{m/n} is
// L^p bounded. The upper end is nullopt when it is infinite (A = 2n).
struct ExponentWindow {
  Rational lower;
  std::optional<Rational> upper;
};

// Window for the majorant exponent A: (2n+2m)/(Am+2n+2m-2nm) < p < (2n+2m)/(2nm-Am).
// Requires n(2 - 1/m) - 1 < A <= 2n.
ExponentWindow type_a_window(const HartogsTriangle& h, const Rational& a);

// Majorant exponent of the class-k sub-Bergman kernel, A = 2n + k/m.
Rational type_a_exponent(const HartogsTriangle& h, int k);

// Conjugate of a finite exponent p > 1, or 1 for infinity.
Exponent conjugate(const Exponent& p);

}  // namespace hartogs

template <>
struct std::hash<hartogs::MultiIndex> {
  std::size_t operator()(const hartogs::MultiIndex& a) const noexcept {
    return std::hash<std::int64_t>{}((static_cast<std::int64_t>(a.a1) << 32) ^
                                     static_cast<std::uint32_t>(a.a2));
  }
};
