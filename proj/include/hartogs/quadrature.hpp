#pragma once

// Integration over H_{m/n} in shadow coordinates.
//
// With r1 = r2^{n/m} u the shadow {0 < r1 < r2^{n/m}, 0 < r2 < 1} becomes the
// unit square in (u, r2), and dV = r1 r2 dr1 dr2 dtheta1 dtheta2 picks up the
// Jacobian r2^{n/m}. Both radial directions use composite Gauss-Legendre on
// panels refined geometrically toward each endpoint, so power singularities
// r2^{-1+eps} at the origin still integrate to near machine precision.
// Radii and weights are stored as logarithms: deep grading reaches r2 ~ 2^-400
// where r^a itself would over- or underflow.

#include <complex>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "hartogs/lattice.hpp"
#include "hartogs/laurent.hpp"

namespace hartogs {

// Shrinks the shadow to r2 in (r2_lo, r2_hi) and u in (0, u_hi).
struct Truncation {
  double r2_lo = 0.0;
  double r2_hi = 1.0;
  double u_hi = 1.0;

  static Truncation none() { return {}; }
  // {t < |z2| < 1-t, |z1|^{m/n} < (1-t)|z2|}.
  static Truncation annular(const HartogsTriangle& h, double t);
  // {t/2 < |z2| < 1-t/2, |z1|^{m/n} < (1-t)^2 |z2|}; a second nested family.
  static Truncation scaled(const HartogsTriangle& h, double t);

  bool is_none() const { return r2_lo == 0.0 && r2_hi == 1.0 && u_hi == 1.0; }
};

struct RuleConfig {
  int order = 16;          // Gauss-Legendre points per panel
  int r2_levels_low = 40;  // geometric panels toward r2 = r2_lo
  int r2_levels_high = 8;  // toward r2 = r2_hi
  int u_levels_low = 4;
  int u_levels_high = 8;
  int angular = 64;  // trapezoid points per angle
  Truncation truncation;
};

struct RadialNode {
  double log_r1;
  double log_r2;
  double log_weight;  // includes du dr2, the Jacobian and the r1 r2 factor

  double r1() const;
  double r2() const;
  double weight() const;
};

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

// Composite rule on [lo, hi] with panels halving toward both ends:
// breakpoints lo + (hi-lo){0, 2^-L0, ..., 1/2, 1-1/4, ..., 1-2^-L1, 1}.
// Returns (node, weight, log(node)) triples; log(node) is accurate even
// where lo = 0 and node ~ 2^-L0.
struct GradedNode {
  double x;
  double w;
  double log_x;
};
std::vector<GradedNode> graded_rule(double lo, double hi, int order, int levels_low,
                                    int levels_high);

class QuadratureRule {
 public:
  QuadratureRule(const HartogsTriangle& h, const RuleConfig& cfg);

  const HartogsTriangle& domain() const { return h_; }
  const RuleConfig& config() const { return cfg_; }
  const std::vector<RadialNode>& radial() const { return nodes_; }
  int angular() const { return cfg_.angular; }
  double theta(int j) const;
  double angular_weight() const;  // (2pi / N_theta)^2
  std::size_t size() const;       // radial nodes times N_theta^2

 private:
  HartogsTriangle h_;
  RuleConfig cfg_;
  std::vector<RadialNode> nodes_;
};

using RulePtr = std::shared_ptr<const QuadratureRule>;
RulePtr make_rule(const HartogsTriangle& h, const RuleConfig& cfg);

// Complex samples on (radial node) x (theta1 index) x (theta2 index).
class SampledFunction {
 public:
  using Fn = std::function<Complex(Complex z1, Complex z2)>;

  SampledFunction(RulePtr rule, std::vector<Complex> values);

  static SampledFunction sample(RulePtr rule, const Fn& f);
  static SampledFunction sample(RulePtr rule, const LaurentPolynomial& f);

  const QuadratureRule& rule() const { return *rule_; }
  const RulePtr& rule_ptr() const { return rule_; }
  const std::vector<Complex>& values() const { return values_; }
  Complex at(std::size_t node, int j1, int j2) const;

  SampledFunction operator+(const SampledFunction& o) const;
  SampledFunction operator-(const SampledFunction& o) const;
  SampledFunction operator*(Complex c) const;

  // Columns r1,r2,theta1,theta2,re,im; one row per grid point in rule order.
  void write_csv(std::ostream& os) const;
  // Reads rows written by write_csv against the same rule. Throws
  // InvalidArgument when the grid does not match.
  static SampledFunction read_csv(RulePtr rule, std::istream& is);

 private:
  RulePtr rule_;
  std::vector<Complex> values_;
};

// 4 pi^2 int r2^{b+1} int_0^{u_hi r2^{n/m}} r1^{a+1} dr1 dr2 over the
// truncated shadow. nullopt signals divergence.
std::optional<double> radial_monomial_integral(const HartogsTriangle& h, double a, double b,
                                               const Truncation& trunc = {});
// The same integral by quadrature.
double radial_monomial_integral_numeric(double a, double b, const QuadratureRule& rule);

double lp_norm(const LaurentPolynomial& f, const Exponent& p, const QuadratureRule& rule);
double lp_norm(const SampledFunction& f, const Exponent& p);
double lp_norm(const SampledFunction::Fn& f, const Exponent& p, const QuadratureRule& rule);

// <f, g> = int f conj(g) dV.
Complex pair(const LaurentPolynomial& f, const LaurentPolynomial& g, const QuadratureRule& rule);
Complex pair(const SampledFunction& f, const LaurentPolynomial& g);
Complex pair(const SampledFunction& f, const SampledFunction& g);

// int F conj(e_a) dV for every requested a, by a 2D FFT per radial node.
// Requires |a_j| < N_theta / 2.
std::vector<Complex> mode_integrals(const SampledFunction& f, const std::vector<MultiIndex>& idx);
// Streaming variant: F is evaluated node by node and never stored.
std::vector<Complex> mode_integrals(const SampledFunction::Fn& f, const QuadratureRule& rule,
                                    const std::vector<MultiIndex>& idx);

// int F dV.
Complex integrate(const SampledFunction::Fn& f, const QuadratureRule& rule);

// Laurent coefficients a_a(f), |a|_inf <= N, from samples of f on the torus
// |z1| = r1, |z2| = r2. Throws TorusOutsideDomain unless the torus lies in
// H_{m/n}, InvalidArgument unless samples > 2N.
LaurentPolynomial::Terms torus_coefficients(const HartogsTriangle& h,
                                            const SampledFunction::Fn& f, double r1, double r2,
                                            int box, int samples);

// Neumaier compensated sum.
class KahanSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class ComplexKahanSum {
 public:
  void add(Complex z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  Complex value() const { return {re_.value(), im_.value()}; }

 private:
  KahanSum re_;
  KahanSum im_;
};

}  // namespace hartogs
