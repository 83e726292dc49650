#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include "hartogs/errors.hpp"
#include "hartogs/lattice.hpp"

using namespace hartogs;

namespace {

constexpr double kPi = std::numbers::pi;

// Largest integer k with k <= 1 - 2(m+n) Q / P, found by walking integers and
// comparing cross-multiplied integers.
int floor_oracle(int m, int n, std::int64_t P, std::int64_t Q) {
  const std::int64_t rhs = P - 2 * (m + n) * Q;  // k * P <= rhs
  int k = -100000;
  while (static_cast<std::int64_t>(k + 1) * P <= rhs) ++k;
  return k;
}

// e_a in L^p iff a1 >= 0 and the r2 exponent p*a2 + 1 + (n/m)(p*a1 + 2) exceeds -1,
// i.e. P*(n a1 + m a2) + 2(m+n) Q > 0 for p = P/Q.
bool allowable_oracle(int m, int n, std::int64_t P, std::int64_t Q, int a1, int a2) {
  if (a1 < 0) return false;
  return P * (n * a1 + m * a2) + 2 * (m + n) * Q > 0;
}

struct Coprime {
  int m, n;
};

Coprime random_domain(std::mt19937_64& rng, int limit) {
  std::uniform_int_distribution<int> d(1, limit);
  for (;;) {
    const int m = d(rng), n = d(rng);
    if (std::gcd(m, n) == 1) return {m, n};
  }
}

}  // namespace

TEST_CASE("domain validation") {
  CHECK_THROWS_AS(HartogsTriangle(2, 4), InvalidArgument);
  CHECK_THROWS_AS(HartogsTriangle(0, 1), InvalidArgument);
  CHECK_THROWS_AS(HartogsTriangle(1, -1), InvalidArgument);
  const HartogsTriangle h(2, 3);
  CHECK(h.gamma() == Rational(2, 3));
  CHECK(h.threshold_count() == 10);
  CHECK(h.contains(0.0, 0.5));
  CHECK_FALSE(h.contains(0.5, 0.5));  // 0.5^{2/3} > 0.5
  CHECK(h.contains(0.3, 0.5));        // 0.3^{2/3} ~ 0.448
  CHECK_FALSE(h.contains(0.0, 1.0));
  CHECK_FALSE(h.contains(0.0, 0.0));
}

TEST_CASE("floor_index fixtures") {
  CHECK(floor_index(HartogsTriangle(1, 1), Exponent(Rational(5, 3))) == -2);
  CHECK(floor_index(HartogsTriangle(1, 1), Exponent(2)) == -1);
  CHECK(floor_index(HartogsTriangle(2, 1), Exponent(6)) == 0);
  CHECK(floor_index(HartogsTriangle(2, 1), Exponent::infinity()) == 0);
  CHECK(floor_index(HartogsTriangle(3, 2), Exponent(1)) == -9);
}

TEST_CASE("floor_index agrees with the integer oracle") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> num(1, 60), den(1, 20);
  for (int i = 0; i < 2000; ++i) {
    const auto [m, n] = random_domain(rng, 7);
    std::int64_t P = num(rng), Q = den(rng);
    if (P < Q) std::swap(P, Q);
    const Rational p(P, Q);
    INFO("m=" << m << " n=" << n << " p=" << P << "/" << Q);
    CHECK(floor_index(HartogsTriangle(m, n), Exponent(p)) ==
          floor_oracle(m, n, p.numerator(), p.denominator()));
  }
}

TEST_CASE("allowability fixtures") {
  const HartogsTriangle h1(1, 1);
  CHECK(is_allowable(h1, Rational(5, 3), {0, -2}));
  CHECK_FALSE(is_allowable(h1, 2, {0, -2}));
  CHECK(is_allowable(h1, 2, {0, -1}));
  CHECK_FALSE(is_allowable(h1, 4, {0, -1}));
  CHECK_FALSE(is_allowable(h1, 2, {-1, 3}));
  for (int m = 1; m <= 5; ++m) {
    for (int n = 1; n <= 5; ++n) {
      if (std::gcd(m, n) != 1) continue;
      for (const Exponent& p : {Exponent(1), Exponent(Rational(5, 3)), Exponent(7), Exponent::infinity()}) {
        CHECK(is_allowable(HartogsTriangle(m, n), p, {0, 0}));
      }
    }
  }
}

TEST_CASE("allowability matches radial convergence") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<std::int64_t> num(1, 80), den(1, 24);
  std::uniform_int_distribution<int> idx(-12, 12);
  for (int i = 0; i < 5000; ++i) {
    const auto [m, n] = random_domain(rng, 6);
    std::int64_t P = num(rng), Q = den(rng);
    if (P < Q) std::swap(P, Q);
    const Rational p(P, Q);
    const int a1 = idx(rng), a2 = idx(rng);
    CHECK(is_allowable(HartogsTriangle(m, n), p, {a1, a2}) ==
          allowable_oracle(m, n, p.numerator(), p.denominator(), a1, a2));
  }
}

TEST_CASE("infinite exponent keeps exactly the bounded monomials") {
  // |z1^a1 z2^a2| <= |z2|^{(n a1 + m a2)/m} on the domain, sharp along the shadow.
  for (int m = 1; m <= 4; ++m) {
    for (int n = 1; n <= 4; ++n) {
      if (std::gcd(m, n) != 1) continue;
      const HartogsTriangle h(m, n);
      for (int a1 = -3; a1 <= 8; ++a1) {
        for (int a2 = -8; a2 <= 8; ++a2) {
          CHECK(is_allowable(h, Exponent::infinity(), {a1, a2}) == (a1 >= 0 && n * a1 + m * a2 >= 0));
        }
      }
    }
  }
}

TEST_CASE("allowable sets shrink as p grows") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const auto [m, n] = random_domain(rng, 5);
    const HartogsTriangle h(m, n);
    std::uniform_int_distribution<std::int64_t> num(1, 40);
    Rational p(num(rng), 4), q(num(rng), 4);
    if (p < Rational(1)) p = Rational(1);
    if (q < Rational(1)) q = Rational(1);
    if (q < p) std::swap(p, q);
    for (const auto& a : allowable_in_box(h, q, 6)) CHECK(is_allowable(h, p, a));
    for (const auto& a : allowable_in_box(h, Exponent::infinity(), 6)) CHECK(is_allowable(h, q, a));
  }
}

TEST_CASE("threshold tables") {
  const auto t2 = thresholds(HartogsTriangle(2, 1));
  REQUIRE(t2.size() == 6);
  const Rational want[] = {Rational(1), Rational(6, 5), Rational(3, 2), Rational(2), Rational(3), Rational(6)};
  for (int i = 0; i < 6; ++i) {
    CHECK(t2[i].p == want[i]);
    CHECK(t2[i].k == i - 5);
  }
  const auto t1 = thresholds(HartogsTriangle(1, 1));
  REQUIRE(t1.size() == 4);
  CHECK(t1[0].p == Rational(1));
  CHECK(t1[1].p == Rational(4, 3));
  CHECK(t1[2].p == Rational(2));
  CHECK(t1[3].p == Rational(4));
}

TEST_CASE("thresholds are the jump points of floor_index") {
  for (int m = 1; m <= 5; ++m) {
    for (int n = 1; n <= 5; ++n) {
      if (std::gcd(m, n) != 1) continue;
      const HartogsTriangle h(m, n);
      const auto ts = thresholds(h);
      CHECK(static_cast<int>(ts.size()) == 2 * (m + n));
      for (std::size_t i = 0; i < ts.size(); ++i) {
        CHECK(floor_index(h, ts[i].p) == ts[i].k);
        CHECK(classify_p(h, ts[i].p) == ts[i].k);
        if (i + 1 < ts.size()) {
          CHECK(ts[i].p < ts[i + 1].p);
          // Just below the next threshold the class is unchanged.
          const Rational below = ts[i + 1].p - Rational(1, 100000);
          CHECK(floor_index(h, below) == ts[i].k);
        }
      }
      CHECK(floor_index(h, ts.back().p + Rational(1000)) == 0);
    }
  }
  CHECK(classify_p(HartogsTriangle(1, 1), Rational(5, 3)) == -2);
}

TEST_CASE("monomial norms") {
  const HartogsTriangle h1(1, 1);
  CHECK(monomial_lp_norm(h1, {0, 0}, 2) == doctest::Approx(kPi / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(monomial_lp_norm(h1, {0, -1}, 2) == doctest::Approx(kPi).epsilon(1e-14));
  CHECK_THROWS_AS(monomial_lp_norm(h1, {0, -1}, 4), NotAllowable);
  CHECK(coefficient_norm(h1, {0, 0}, 2) == doctest::Approx(std::sqrt(2.0) / kPi).epsilon(1e-14));
  const double n53 = monomial_lp_norm(h1, {0, -2}, Rational(5, 3));
  CHECK(std::isfinite(n53));
  CHECK(n53 > 0.0);
  CHECK(monomial_lp_norm(h1, {3, -1}, Exponent::infinity()) == 1.0);

  // Elementary form: the r1 integral gives r2^{(n/m)(p a1 + 2)}/(p a1 + 2), then
  // the r2 integral gives m / (p (n a1 + m a2) + 2m + 2n).
  std::mt19937_64 rng(14);
  std::uniform_int_distribution<int> idx(-8, 8);
  std::uniform_int_distribution<std::int64_t> num(4, 40);
  int checked = 0;
  while (checked < 500) {
    const auto [m, n] = random_domain(rng, 4);
    const HartogsTriangle h(m, n);
    const Rational p(num(rng), 4);
    const MultiIndex a{idx(rng), idx(rng)};
    if (!is_allowable(h, p, a)) {
      CHECK_THROWS_AS(monomial_lp_norm(h, a, p), NotAllowable);
      continue;
    }
    const double pd = to_double(p);
    const double want = std::pow(
        4.0 * kPi * kPi * m / ((pd * a.a1 + 2.0) * (pd * (n * a.a1 + m * a.a2) + 2.0 * m + 2.0 * n)),
        1.0 / pd);
    CHECK(monomial_lp_norm(h, a, p) == doctest::Approx(want).epsilon(1e-12));
    CHECK(coefficient_norm(h, a, p) * monomial_lp_norm(h, a, p) == doctest::Approx(1.0).epsilon(1e-14));
    ++checked;
  }
}

TEST_CASE("l2 norm formula matches the p = 2 norm") {
  for (int m = 1; m <= 4; ++m) {
    for (int n = 1; n <= 4; ++n) {
      if (std::gcd(m, n) != 1) continue;
      const HartogsTriangle h(m, n);
      for (const auto& a : allowable_in_box(h, 2, 5)) {
        const double v = monomial_lp_norm(h, a, 2);
        CHECK(l2_norm_squared(h, a) == doctest::Approx(v * v).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("sigma permutation") {
  CHECK(sigma_permutation(HartogsTriangle(1, 1), 0) == 0);
  CHECK(sigma_permutation(HartogsTriangle(2, 1), 1) == 1);
  CHECK(sigma_permutation(HartogsTriangle(3, 2), 1) == 2);
  CHECK_THROWS_AS(sigma_permutation(HartogsTriangle(3, 2), 3), InvalidArgument);
  for (int m = 1; m <= 12; ++m) {
    for (int n = 1; n <= 12; ++n) {
      if (std::gcd(m, n) != 1) continue;
      const HartogsTriangle h(m, n);
      std::set<int> image;
      for (int r = 0; r < m; ++r) {
        const int b = sigma_permutation(h, r);
        CHECK(b >= 0);
        CHECK(b < m);
        CHECK(((n * b - r) % m + m) % m == 0);
        image.insert(b);
      }
      CHECK(static_cast<int>(image.size()) == m);
    }
  }
}

TEST_CASE("line base points") {
  CHECK(line_base_point(HartogsTriangle(1, 1), -1) == MultiIndex{0, -1});
  CHECK(line_base_point(HartogsTriangle(2, 1), -1) == MultiIndex{1, -1});
  for (int m = 1; m <= 6; ++m) {
    for (int n = 1; n <= 6; ++n) {
      if (std::gcd(m, n) != 1) continue;
      const HartogsTriangle h(m, n);
      for (int k = -30; k <= 30; ++k) {
        const auto b = line_base_point(h, k);
        CHECK(b.a1 >= 0);
        CHECK(b.a1 < m);
        CHECK(b.line(h) == k);
        // No other point of the line has a smaller nonnegative a1.
        for (int a1 = 0; a1 < b.a1; ++a1) CHECK((k - n * a1) % m != 0);
      }
    }
  }
}

TEST_CASE("derivative coefficients") {
  CHECK(derivative_coefficient({3, -2}, {1, 0}) == 3);
  CHECK(derivative_coefficient({0, 5}, {1, 0}) == 0);
  CHECK(derivative_coefficient({2, -1}, {0, 2}) == 2);
  // Oracle: differentiate one order at a time.
  for (int a1 = -4; a1 <= 6; ++a1) {
    for (int a2 = -4; a2 <= 6; ++a2) {
      for (int b1 = 0; b1 <= 4; ++b1) {
        for (int b2 = 0; b2 <= 4; ++b2) {
          std::int64_t c = 1;
          int e1 = a1, e2 = a2;
          for (int i = 0; i < b1; ++i) c *= e1--;
          for (int i = 0; i < b2; ++i) c *= e2--;
          CHECK(derivative_coefficient({a1, a2}, {b1, b2}) == c);
        }
      }
    }
  }
}

TEST_CASE("Sobolev allowability") {
  const HartogsTriangle h1(1, 1);
  const auto inf = Exponent::infinity();
  CHECK_FALSE(sobolev_allowable(h1, inf, 2, {1, -1}));
  for (int k = 0; k <= 6; ++k) CHECK(sobolev_allowable(h1, inf, k, {0, 3}));
  // Closed description on H_1 at p = inf: a1 >= 0 and (a2 >= 0 or a1 + a2 >= k).
  for (int k = 0; k <= 5; ++k) {
    for (int a1 = -3; a1 <= 12; ++a1) {
      for (int a2 = -12; a2 <= 12; ++a2) {
        const bool want = a1 >= 0 && (a2 >= 0 || a1 + a2 >= k);
        CHECK(sobolev_allowable(h1, inf, k, {a1, a2}) == want);
      }
    }
  }
}

TEST_CASE("Sobolev sets nest and are brute-force consistent") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 40; ++trial) {
    const auto [m, n] = random_domain(rng, 4);
    const HartogsTriangle h(m, n);
    const Exponent p = trial % 2 ? Exponent::infinity() : Exponent(Rational(7, 2));
    for (int k = 0; k <= 3; ++k) {
      for (const auto& a : enumerate_box(6, [](MultiIndex) { return true; })) {
        bool want = is_allowable(h, p, a);
        for (int b1 = 0; b1 <= k && want; ++b1) {
          for (int b2 = 0; b1 + b2 <= k && want; ++b2) {
            if (derivative_coefficient(a, {b1, b2}) != 0 && !is_allowable(h, p, a - MultiIndex{b1, b2})) want = false;
          }
        }
        const bool got = sobolev_allowable(h, p, k, a);
        CHECK(got == want);
        if (k > 0 && got) CHECK(sobolev_allowable(h, p, k - 1, a));
      }
    }
  }
}

TEST_CASE("Sobolev intersection on H_1 inside a box") {
  // Off the first quadrant, S(A^inf_k) keeps a1 + a2 >= k with a2 < 0, so inside
  // |a|_inf <= N the point (N, -1) survives every order k <= N - 1, and the
  // intersection collapses to the first quadrant only once k reaches N.
  const HartogsTriangle h1(1, 1);
  auto intersection = [&](int K, int N) {
    return enumerate_box(N, [&](MultiIndex a) {
      for (int k = 0; k <= K; ++k) {
        if (!sobolev_allowable(h1, Exponent::infinity(), k, a)) return false;
      }
      return true;
    });
  };
  for (int N : {4, 8, 20}) {
    const auto quadrant = enumerate_box(N, [](MultiIndex a) { return a.a1 >= 0 && a.a2 >= 0; });
    CHECK(intersection(N, N) == quadrant);
    const auto off = intersection(N - 1, N);
    REQUIRE(off.size() == quadrant.size() + 1);
    CHECK(std::count(off.begin(), off.end(), MultiIndex{N, -1}) == 1);
  }
}

TEST_CASE("enumeration") {
  const auto all = enumerate_box(3, [](MultiIndex) { return true; });
  CHECK(all.size() == 49);
  CHECK(std::is_sorted(all.begin(), all.end()));
  // S(H_1, L^2) in the box 3: a1 >= 0, a1 + a2 >= -1.
  const auto s = allowable_in_box(HartogsTriangle(1, 1), 2, 3);
  std::vector<MultiIndex> want;
  for (int a1 = 0; a1 <= 3; ++a1) {
    for (int a2 = -3; a2 <= 3; ++a2) {
      if (a1 + a2 >= -1) want.push_back({a1, a2});
    }
  }
  CHECK(s == want);
}

TEST_CASE("type-A windows") {
  const HartogsTriangle h1(1, 1);
  auto w = type_a_window(h1, type_a_exponent(h1, -1));
  CHECK(w.lower == Rational(4, 3));
  REQUIRE(w.upper.has_value());
  CHECK(*w.upper == Rational(4));
  w = type_a_window(h1, type_a_exponent(h1, 0));
  CHECK(w.lower == Rational(1));
  CHECK_FALSE(w.upper.has_value());
  CHECK_THROWS_AS(type_a_window(h1, Rational(3)), InvalidArgument);

  // Against the threshold list: class k maps (q_{k+1}, p_{k+1}) where p_1 = inf.
  for (int m = 1; m <= 6; ++m) {
    for (int n = 1; n <= 6; ++n) {
      if (std::gcd(m, n) != 1) continue;
      const HartogsTriangle h(m, n);
      for (int k = 1 - m - n; k <= 0; ++k) {
        const auto win = type_a_window(h, type_a_exponent(h, k));
        const Rational pk1 = k + 1 <= 0 ? Rational(2 * (m + n), -k) : Rational(0);
        if (k == 0) {
          CHECK_FALSE(win.upper.has_value());
          CHECK(win.lower == Rational(1));
        } else {
          REQUIRE(win.upper.has_value());
          CHECK(*win.upper == pk1);
          CHECK(win.lower == pk1 / (pk1 - Rational(1)));
        }
      }
    }
  }
}

TEST_CASE("conjugate exponents") {
  CHECK(conjugate(Rational(5, 3)) == Exponent(Rational(5, 2)));
  CHECK(conjugate(2) == Exponent(2));
  CHECK(conjugate(Exponent::infinity()) == Exponent(1));
  CHECK(conjugate(1).is_infinite());
  CHECK(conjugate(conjugate(Rational(7, 4))) == Exponent(Rational(7, 4)));
}

TEST_CASE("exponent parsing") {
  CHECK(Exponent::parse("5/3") == Exponent(Rational(5, 3)));
  CHECK(Exponent::parse("inf").is_infinite());
  CHECK(Exponent::parse("4").to_string() == "4");
  CHECK_THROWS_AS(Exponent::parse("1/2"), InvalidArgument);
  CHECK_THROWS_AS(Exponent::parse("abc"), InvalidArgument);
  CHECK(floor(Rational(-7, 3)) == -3);
  CHECK(floor(Rational(7, 3)) == 2);
  CHECK(floor(Rational(-6, 3)) == -2);
}
