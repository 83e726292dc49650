#include "hartogs/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <string>

#include "hartogs/errors.hpp"

namespace hartogs {

HartogsTriangle::HartogsTriangle(int m, int n) : m_(m), n_(n) {
  if (m < 1 || n < 1) {
    throw InvalidArgument("H_{m/n} needs m, n >= 1, got m=" + std::to_string(m) +
                          ", n=" + std::to_string(n));
  }
  if (std::gcd(m, n) != 1) {
    throw InvalidArgument("H_{m/n} needs gcd(m, n) = 1, got m=" + std::to_string(m) +
                          ", n=" + std::to_string(n));
  }
}

bool HartogsTriangle::contains(double abs_z1, double abs_z2) const {
  if (!(abs_z2 > 0.0) || !(abs_z2 < 1.0) || abs_z1 < 0.0) return false;
  return std::pow(abs_z1, static_cast<double>(m_) / n_) < abs_z2;
}

int MultiIndex::sup_norm() const { return std::max(std::abs(a1), std::abs(a2)); }

std::ostream& operator<<(std::ostream& os, const MultiIndex& a) {
  return os << '(' << a.a1 << ',' << a.a2 << ')';
}

int floor_index(const HartogsTriangle& h, const Exponent& p) {
  if (p.is_infinite()) return 0;
  const Rational level = Rational(1) - Rational(2 * (h.m() + h.n())) / p.value();
  return static_cast<int>(floor(level));
}

bool is_allowable(const HartogsTriangle& h, const Exponent& p, MultiIndex a) {
  return a.a1 >= 0 && a.line(h) >= floor_index(h, p);
}

std::vector<Threshold> thresholds(const HartogsTriangle& h) {
  std::vector<Threshold> out;
  const int total = h.threshold_count();
  out.reserve(static_cast<std::size_t>(total));
  for (int k = 1 - total; k <= 0; ++k) out.push_back({k, Rational(total, 1 - k)});
  return out;
}

int classify_p(const HartogsTriangle& h, const Exponent& p) {
  // floor(1 - 2(m+n)/p) lands in [1-2m-2n, 0] for every p >= 1.
  return floor_index(h, p);
}

double monomial_lp_norm(const HartogsTriangle& h, MultiIndex a, const Exponent& p) {
  if (!is_allowable(h, p, a)) {
    throw NotAllowable("e_(" + std::to_string(a.a1) + "," + std::to_string(a.a2) +
                       ") is not in L^" + p.to_string());
  }
  if (p.is_infinite()) return 1.0;
  const double pd = p.to_double();
  const double x1 = pd * a.a1 + 2.0;
  const double x2 = pd * a.a2 + 2.0;
  const double denom = h.n() * x1 * x1 + h.m() * x1 * x2;
  if (!(denom > 0.0)) throw NotAllowable("nonpositive norm denominator");
  const double pth_power = 4.0 * h.m() * std::numbers::pi * std::numbers::pi / denom;
  return std::pow(pth_power, 1.0 / pd);
}

double coefficient_norm(const HartogsTriangle& h, MultiIndex a, const Exponent& p) {
  return 1.0 / monomial_lp_norm(h, a, p);
}

double l2_norm_squared(const HartogsTriangle& h, MultiIndex a) {
  if (!is_allowable(h, Exponent(2), a)) {
    throw NotAllowable("e_(" + std::to_string(a.a1) + "," + std::to_string(a.a2) +
                       ") is not in L^2");
  }
  return h.m() * std::numbers::pi * std::numbers::pi /
         (static_cast<double>(a.a1 + 1) * (a.line(h) + h.m() + h.n()));
}

int sigma_permutation(const HartogsTriangle& h, int r) {
  if (r < 0 || r >= h.m()) {
    throw InvalidArgument("sigma: residue " + std::to_string(r) + " outside [0, " +
                          std::to_string(h.m() - 1) + "]");
  }
  return line_base_point(h, r).a1;
}

MultiIndex line_base_point(const HartogsTriangle& h, int k) {
  const int m = h.m();
  for (int b1 = 0; b1 < m; ++b1) {
    const int rest = k - h.n() * b1;
    if (rest % m == 0) return {b1, rest / m};
  }
  // gcd(m, n) = 1 makes n invertible mod m, so the loop always returns.
  throw InvalidArgument("no base point; (m, n) not coprime");
}

std::int64_t derivative_coefficient(MultiIndex a, MultiIndex b) {
  if (b.a1 < 0 || b.a2 < 0) throw InvalidArgument("derivative order must be nonnegative");
  const auto factor = [](int alpha, int beta) -> std::int64_t {
    if (beta > alpha && alpha >= 0) return 0;
    std::int64_t c = 1;
    for (int l = 0; l < beta; ++l) c *= (alpha - l);
    return c;
  };
  return factor(a.a1, b.a1) * factor(a.a2, b.a2);
}

bool sobolev_allowable(const HartogsTriangle& h, const Exponent& p, int order, MultiIndex a) {
  if (order < 0) throw InvalidArgument("Sobolev order must be nonnegative");
  for (int b1 = 0; b1 <= order; ++b1) {
    for (int b2 = 0; b1 + b2 <= order; ++b2) {
      const MultiIndex b{b1, b2};
      if (derivative_coefficient(a, b) != 0 && !is_allowable(h, p, a - b)) return false;
    }
  }
  return true;
}

std::vector<MultiIndex> enumerate_box(int box, const std::function<bool(MultiIndex)>& pred) {
  if (box < 0) throw InvalidArgument("box size must be nonnegative");
  std::vector<MultiIndex> out;
  for (int a1 = -box; a1 <= box; ++a1) {
    for (int a2 = -box; a2 <= box; ++a2) {
      if (pred({a1, a2})) out.push_back({a1, a2});
    }
  }
  return out;
}

std::vector<MultiIndex> allowable_in_box(const HartogsTriangle& h, const Exponent& p, int box) {
  return enumerate_box(box, [&](MultiIndex a) { return is_allowable(h, p, a); });
}

ExponentWindow type_a_window(const HartogsTriangle& h, const Rational& a) {
  const std::int64_t m = h.m();
  const std::int64_t n = h.n();
  const Rational lower_bound = Rational(n) * (Rational(2) - Rational(1, m)) - 1;
  if (!(a > lower_bound) || a > Rational(2 * n)) {
    throw InvalidArgument("type-A exponent " + to_string(a) + " outside (" +
                          to_string(lower_bound) + ", " + std::to_string(2 * n) + "]");
  }
  const Rational two_mn(2 * (m + n));
  ExponentWindow w{two_mn / (a * m + Rational(2 * (m + n)) - Rational(2 * n * m)), std::nullopt};
  const Rational upper_den = Rational(2 * n * m) - a * m;
  if (upper_den != Rational(0)) w.upper = two_mn / upper_den;
  return w;
}

Rational type_a_exponent(const HartogsTriangle& h, int k) {
  return Rational(2 * h.n()) + Rational(k, h.m());
}

Exponent conjugate(const Exponent& p) {
  if (p.is_infinite()) return Exponent(1);
  if (p.value() == Rational(1)) return Exponent::infinity();
  return Exponent(p.value() / (p.value() - 1));
}

}  // namespace hartogs
