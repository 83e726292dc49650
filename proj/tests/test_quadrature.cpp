#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "hartogs/errors.hpp"
#include "hartogs/quadrature.hpp"

using namespace hartogs;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Product of Laurent polynomials, written out here for the p = 4 identity
// ||f||_4^4 = ||f^2||_2^2.
LaurentPolynomial square(const LaurentPolynomial& f) {
  LaurentPolynomial::Terms t;
  for (const auto& [a, c] : f.terms()) {
    for (const auto& [b, d] : f.terms()) t[a + b] += c * d;
  }
  return LaurentPolynomial(t);
}

RulePtr fine_rule(const HartogsTriangle& h, int angular = 32) {
  return make_rule(h, RuleConfig{16, 60, 8, 8, 8, angular, {}});
}

}  // namespace

TEST_CASE("Gauss-Legendre is exact through degree 2n-1") {
  for (int order : {1, 2, 5, 16, 20}) {
    std::vector<double> x, w;
    gauss_legendre(order, x, w);
    REQUIRE(x.size() == static_cast<std::size_t>(order));
    for (int k = 0; k < 2 * order; ++k) {
      double s = 0.0;
      for (int i = 0; i < order; ++i) s += w[i] * std::pow(x[i], k);
      const double want = k % 2 ? 0.0 : 2.0 / (k + 1);
      CHECK(s == doctest::Approx(want).epsilon(1e-13).scale(1.0));
    }
  }
  std::vector<double> x, w;
  gauss_legendre(2, x, w);
  CHECK(std::abs(std::abs(x[0]) - 1.0 / std::sqrt(3.0)) < 1e-15);
  CHECK_THROWS_AS(gauss_legendre(0, x, w), InvalidArgument);
}

TEST_CASE("graded rule resolves endpoint singularities") {
  const auto r = graded_rule(0.0, 1.0, 16, 120, 60);
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (const auto& g : r) {
    CHECK(g.x > 0.0);
    CHECK(g.x < 1.0);
    CHECK(g.w > 0.0);
    CHECK(std::abs(g.log_x - std::log(g.x)) < 1e-13 * std::max(1.0, std::abs(g.log_x)));
    s1 += g.w * std::exp(-0.5 * g.log_x);
    s2 += g.w / std::sqrt(1.0 - g.x);
    s3 += g.w * std::log(g.x);
  }
  CHECK(s1 == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(s2 == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(s3 == doctest::Approx(-1.0).epsilon(1e-13));
  double len = 0.0;
  for (const auto& g : graded_rule(0.25, 0.75, 8, 3, 3)) len += g.w;
  CHECK(len == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("truncation families") {
  const HartogsTriangle h1(1, 1), h2(2, 1);
  auto a = Truncation::annular(h1, 0.1);
  CHECK(a.r2_lo == 0.1);
  CHECK(a.r2_hi == doctest::Approx(0.9));
  CHECK(a.u_hi == doctest::Approx(0.9));
  // |z1|^{m/n} < (1-t)|z2| means u < (1-t)^{n/m}.
  CHECK(Truncation::annular(h2, 0.19).u_hi == doctest::Approx(0.9));
  auto s = Truncation::scaled(h1, 0.1);
  CHECK(s.r2_lo == doctest::Approx(0.05));
  CHECK(s.r2_hi == doctest::Approx(0.95));
  CHECK(s.u_hi == doctest::Approx(0.81));
  CHECK(Truncation::none().is_none());
  CHECK_THROWS_AS(Truncation::annular(h1, 0.5), InvalidArgument);
}

TEST_CASE("rule invariants") {
  for (auto [m, n] : {std::pair{1, 1}, {2, 1}, {2, 3}, {4, 3}}) {
    const HartogsTriangle h(m, n);
    for (const auto& tr : {Truncation::none(), Truncation::annular(h, 0.2), Truncation::scaled(h, 0.05)}) {
      RuleConfig rc{12, 30, 6, 6, 6, 8, tr};
      const QuadratureRule rule(h, rc);
      double total = 0.0;
      for (const auto& nd : rule.radial()) {
        CHECK(nd.weight() > 0.0);
        CHECK(nd.r2() > tr.r2_lo);
        CHECK(nd.r2() < tr.r2_hi);
        CHECK(nd.log_r1 < std::log(tr.u_hi) + h.shadow_exponent() * nd.log_r2);
        total += nd.weight();
      }
      const double vol = total * rule.angular_weight() * rule.angular() * rule.angular();
      const auto want = radial_monomial_integral(h, 0.0, 0.0, tr);
      REQUIRE(want.has_value());
      CHECK(rel(vol, *want) < 1e-12);
      CHECK(rule.size() == rule.radial().size() * 64);
    }
    // Volume pi^2 m/(m+n), by elementary integration.
    CHECK(*radial_monomial_integral(h, 0.0, 0.0) == doctest::Approx(kPi * kPi * m / (m + n)).epsilon(1e-14));
  }
}

TEST_CASE("radial integral fixtures") {
  const HartogsTriangle h1(1, 1);
  CHECK(*radial_monomial_integral(h1, 0, 0) == doctest::Approx(kPi * kPi / 2).epsilon(1e-15));
  CHECK_FALSE(radial_monomial_integral(h1, 0, -4).has_value());
  CHECK_FALSE(radial_monomial_integral(h1, -2, 5).has_value());
  // Truncated log divergence: 4pi^2 int_t^{1-t} r^{-3} ((1-t) r)^2 / 2 dr.
  for (double t : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double want = 2 * kPi * kPi * (1 - t) * (1 - t) * std::log((1 - t) / t);
    CHECK(rel(*radial_monomial_integral(h1, 0, -4, Truncation::annular(h1, t)), want) < 1e-13);
  }
}

TEST_CASE("radial integral closed form vs quadrature") {
  // Endpoint singularities x^{e-1} with e >= 0.4 leave a relative tail of about
  // 2^{-0.4 L} below the finest panel; L = 96 levels certify the accuracy asked for.
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ua(-1.6, 6.0), ub(-6.0, 6.0);
  for (auto [m, n] : {std::pair{1, 1}, {3, 1}, {2, 5}}) {
    const HartogsTriangle h(m, n);
    const QuadratureRule rule(h, RuleConfig{12, 96, 8, 96, 8, 1, {}});
    const auto tr = Truncation::scaled(h, 0.01);
    const QuadratureRule cut(h, RuleConfig{12, 30, 8, 96, 8, 1, tr});
    int done = 0;
    while (done < 40) {
      const double a = ua(rng), b = ub(rng);
      const double c = b + 1.0 + h.shadow_exponent() * (a + 2.0);
      const auto exact = radial_monomial_integral(h, a, b);
      CHECK(exact.has_value() == (c > -1.0));
      if (c > -0.6) CHECK(rel(radial_monomial_integral_numeric(a, b, rule), *exact) < 1e-10);
      const auto e2 = radial_monomial_integral(h, a, b, tr);
      REQUIRE(e2.has_value());
      CHECK(rel(radial_monomial_integral_numeric(a, b, cut), *e2) < 1e-11);
      ++done;
    }
  }
}

TEST_CASE("norm fixtures") {
  const HartogsTriangle h1(1, 1);
  const auto rule = fine_rule(h1, 8);
  CHECK(lp_norm(LaurentPolynomial::monomial({0, 0}), 2, *rule) == doctest::Approx(kPi / std::sqrt(2.0)).epsilon(1e-6));
  CHECK(lp_norm(LaurentPolynomial(), 3, *rule) == 0.0);
  CHECK(lp_norm(LaurentPolynomial::monomial({2, -1}, 3.0), Exponent::infinity(), *rule) <= 3.0);
  // Sampled and Fn routes for the constant.
  const auto one = SampledFunction::sample(rule, LaurentPolynomial::monomial({0, 0}));
  CHECK(lp_norm(one, 2) == doctest::Approx(kPi / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(lp_norm([](Complex, Complex) { return Complex(1.0); }, 7, *rule) ==
        doctest::Approx(std::pow(kPi * kPi / 2, 1.0 / 7)).epsilon(1e-12));
}

TEST_CASE("monomial norms: closed form vs quadrature") {
  std::mt19937_64 rng(32);
  std::uniform_int_distribution<int> idx(-6, 6);
  std::uniform_int_distribution<std::int64_t> num(4, 32);
  int done = 0;
  while (done < 60) {
    const int m = 1 + done % 3, n = 1 + (done / 3) % 2;
    if (std::gcd(m, n) != 1) {
      ++done;
      continue;
    }
    const HartogsTriangle h(m, n);
    const Rational p(num(rng), 4);
    const MultiIndex a{std::abs(idx(rng)), idx(rng)};
    if (!is_allowable(h, p, a)) continue;
    const QuadratureRule rule(h, RuleConfig{20, 400, 4, 4, 4, 1, {}});
    CHECK(rel(lp_norm(LaurentPolynomial::monomial(a), p, rule), monomial_lp_norm(h, a, p)) < 1e-10);
    ++done;
  }
}

TEST_CASE("p = 4 norms through the square") {
  const HartogsTriangle h1(1, 1);
  const auto rule = make_rule(h1, RuleConfig{10, 30, 6, 6, 6, 16, {}});
  const LaurentPolynomial f{{{0, 0}, 1.0}, {{1, 0}, Complex(0.5, 1.0)}, {{1, -1}, -2.0}, {{0, 3}, 0.25}};
  const double via_square = std::pow(lp_norm(square(f), 2, *rule), 0.5);
  // Full-grid route (non-collinear support) and the sampled route.
  CHECK(rel(lp_norm(f, 4, *rule), via_square) < 1e-10);
  CHECK(rel(lp_norm(SampledFunction::sample(rule, f), 4), via_square) < 1e-10);
}

TEST_CASE("collinear reduction agrees with the full grid") {
  const HartogsTriangle h1(1, 1), h21(2, 1);
  for (const auto& h : {h1, h21}) {
    const auto rule = make_rule(h, RuleConfig{8, 20, 4, 4, 4, 24, {}});
    const auto b = line_base_point(h, 0);
    LaurentPolynomial f;
    for (int j = 0; j < 4; ++j) {
      f = f + LaurentPolynomial::monomial({b.a1 + j * h.m(), b.a2 - j * h.n()}, std::pow(0.5, j));
    }
    const auto s = SampledFunction::sample(rule, f);
    for (const Exponent& p : {Exponent(Rational(5, 3)), Exponent(3), Exponent(Rational(9, 2))}) {
      CHECK(rel(lp_norm(f, p, *rule), lp_norm(s, p)) < 1e-9);
    }
  }
}

TEST_CASE("truncated norm of 1/z2 at p = 4 grows like the exact log") {
  const HartogsTriangle h1(1, 1);
  const auto e = LaurentPolynomial::monomial({0, -1});
  double prev = 0.0;
  for (double t : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const QuadratureRule rule(h1, RuleConfig{16, 20, 8, 4, 8, 4, Truncation::annular(h1, t)});
    const double v = lp_norm(e, 4, rule);
    const double want = std::pow(2 * kPi * kPi * (1 - t) * (1 - t) * std::log((1 - t) / t), 0.25);
    CHECK(rel(v, want) < 1e-10);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("pairings") {
  const HartogsTriangle h1(1, 1);
  const auto rule = make_rule(h1, RuleConfig{12, 40, 6, 6, 6, 16, {}});
  for (const auto& a : allowable_in_box(h1, 2, 3)) {
    for (const auto& b : allowable_in_box(h1, 2, 3)) {
      const Complex v = pair(LaurentPolynomial::monomial(a), LaurentPolynomial::monomial(b), *rule);
      if (a == b) {
        CHECK(rel(v.real(), l2_norm_squared(h1, a)) < 1e-10);
      } else {
        CHECK(v == Complex(0.0));
      }
    }
  }
  // Non-holomorphic data: <conj(z2), 1/z2> is the volume.
  const auto zb = SampledFunction::sample(rule, [](Complex, Complex z2) { return std::conj(z2); });
  CHECK(std::abs(pair(zb, LaurentPolynomial::monomial({0, -1})) - kPi * kPi / 2) < 1e-10);
  // Sampled x sampled agrees with sampled x Laurent.
  const LaurentPolynomial g{{{0, -1}, 2.0}, {{1, 1}, Complex(0, 1)}};
  CHECK(std::abs(pair(zb, SampledFunction::sample(rule, g)) - pair(zb, g)) < 1e-10);
}

TEST_CASE("mode integrals") {
  const HartogsTriangle h(2, 1);
  const auto rule = make_rule(h, RuleConfig{12, 30, 6, 6, 6, 16, {}});
  const LaurentPolynomial f{{{0, 0}, 1.0}, {{1, -1}, Complex(0.5, -1.0)}, {{3, 2}, 2.0}};
  const auto s = SampledFunction::sample(rule, f);
  const std::vector<MultiIndex> idx{{0, 0}, {1, -1}, {3, 2}, {2, 0}, {-1, 4}};
  const auto sampled = mode_integrals(s, idx);
  const auto streamed = mode_integrals([&](Complex z1, Complex z2) { return f(z1, z2); }, *rule, idx);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const Complex want = pair(f, LaurentPolynomial::monomial(idx[i]), *rule);
    CHECK(std::abs(sampled[i] - want) < 1e-12 * (1.0 + std::abs(want)));
    CHECK(std::abs(streamed[i] - want) < 1e-12 * (1.0 + std::abs(want)));
  }
  CHECK_THROWS_AS(mode_integrals(s, {{8, 0}}), InvalidArgument);
  CHECK_NOTHROW(mode_integrals(s, {{7, -7}}));
  CHECK(std::abs(integrate([](Complex, Complex) { return Complex(1.0); }, *rule) - kPi * kPi * 2 / 3) < 1e-10);
}

TEST_CASE("Hoelder inequality on random data") {
  const HartogsTriangle h(1, 2);
  const auto rule = make_rule(h, RuleConfig{10, 20, 4, 4, 4, 12, {}});
  std::mt19937_64 rng(33);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> idx(0, 3);
  for (int trial = 0; trial < 10; ++trial) {
    LaurentPolynomial::Terms tf, tg;
    for (int i = 0; i < 3; ++i) {
      tf[{idx(rng), idx(rng) - 1}] += Complex(g(rng), g(rng));
      tg[{idx(rng), idx(rng)}] += Complex(g(rng), g(rng));
    }
    const auto sf = SampledFunction::sample(rule, LaurentPolynomial(tf));
    const auto sg = SampledFunction::sample(rule, LaurentPolynomial(tg));
    const double lhs = std::abs(pair(sf, sg));
    CHECK(lhs <= lp_norm(sf, 3) * lp_norm(sg, Rational(3, 2)) * (1 + 1e-12));
    CHECK(lhs <= lp_norm(sf, 2) * lp_norm(sg, 2) * (1 + 1e-12));
  }
}

TEST_CASE("torus coefficients") {
  const HartogsTriangle h1(1, 1);
  const auto e = LaurentPolynomial::monomial({0, -2});
  auto fn = [](const LaurentPolynomial& f) { return [f](Complex z1, Complex z2) { return f(z1, z2); }; };
  const auto c = torus_coefficients(h1, fn(e), 0.2, 0.5, 4, 16);
  for (const auto& [a, v] : c) {
    CHECK(std::abs(v - (a == MultiIndex{0, -2} ? Complex(1.0) : Complex(0.0))) < 1e-12);
  }
  const LaurentPolynomial f{{{1, 0}, 3.0}, {{0, -1}, 2.0}};
  const auto d = torus_coefficients(h1, fn(f), 0.1, 0.7, 3, 12);
  CHECK(std::abs(d.at({1, 0}) - 3.0) < 1e-12);
  CHECK(std::abs(d.at({0, -1}) - 2.0) < 1e-12);
  // The answer does not depend on the torus.
  const auto d2 = torus_coefficients(h1, fn(f), 0.3, 0.4, 3, 12);
  for (const auto& [a, v] : d) CHECK(std::abs(v - d2.at(a)) < 1e-12);
  CHECK_THROWS_AS(torus_coefficients(h1, fn(f), 0.5, 0.4, 3, 12), TorusOutsideDomain);
  CHECK_THROWS_AS(torus_coefficients(h1, fn(f), 0.0, 0.4, 3, 12), TorusOutsideDomain);
  CHECK_THROWS_AS(torus_coefficients(h1, fn(f), 0.1, 1.0, 3, 12), TorusOutsideDomain);
  CHECK_THROWS_AS(torus_coefficients(h1, fn(f), 0.1, 0.4, 3, 6), InvalidArgument);
}

TEST_CASE("sampled functions: arithmetic and CSV") {
  const HartogsTriangle h(3, 2);
  const auto rule = make_rule(h, RuleConfig{4, 3, 2, 2, 2, 4, {}});
  const auto f = SampledFunction::sample(rule, LaurentPolynomial{{{1, 1}, Complex(1, 2)}});
  const auto g = SampledFunction::sample(rule, [](Complex z1, Complex z2) { return std::conj(z1) + z2; });
  const auto sum = f + g * Complex(0, 1) - f;
  for (std::size_t i = 0; i < f.values().size(); ++i) {
    CHECK(std::abs(sum.values()[i] - Complex(0, 1) * g.values()[i]) < 1e-15);
  }
  std::stringstream ss;
  g.write_csv(ss);
  const auto back = SampledFunction::read_csv(rule, ss);
  for (std::size_t i = 0; i < g.values().size(); ++i) CHECK(std::abs(back.values()[i] - g.values()[i]) < 1e-15);
  CHECK(ss.str().rfind("r1,r2,theta1,theta2,re,im", 0) == 0);

  const auto other = make_rule(h, RuleConfig{4, 3, 2, 2, 2, 5, {}});
  std::stringstream again;
  g.write_csv(again);
  CHECK_THROWS_AS(SampledFunction::read_csv(other, again), InvalidArgument);
  CHECK_THROWS_AS(f + SampledFunction::sample(other, LaurentPolynomial()), InvalidArgument);
  CHECK_THROWS_AS(SampledFunction(rule, std::vector<Complex>(3)), InvalidArgument);
}

TEST_CASE("compensated summation") {
  KahanSum k;
  k.add(1e16);
  k.add(1.0);
  k.add(-1e16);
  CHECK(k.value() == 1.0);
  ComplexKahanSum c;
  c.add({1e16, -1e16});
  c.add({1.0, 2.0});
  c.add({-1e16, 1e16});
  CHECK(c.value() == Complex(1.0, 2.0));
}

TEST_CASE("determinism") {
  const HartogsTriangle h(2, 3);
  const auto r1 = make_rule(h, RuleConfig{8, 10, 4, 4, 4, 8, {}});
  const auto r2 = make_rule(h, RuleConfig{8, 10, 4, 4, 4, 8, {}});
  auto fn = [](Complex z1, Complex z2) { return std::conj(z1) * z2 + std::exp(z2); };
  CHECK(lp_norm(fn, Rational(7, 3), *r1) == lp_norm(fn, Rational(7, 3), *r2));
  const auto a = mode_integrals(fn, *r1, {{0, 0}, {1, 1}});
  const auto b = mode_integrals(fn, *r2, {{0, 0}, {1, 1}});
  CHECK(a == b);
}
