#pragma once

#include <vector>

#include "hartogs/kernels.hpp"
#include "hartogs/lattice.hpp"
#include "hartogs/laurent.hpp"
#include "hartogs/quadrature.hpp"

namespace hartogs {

// S_N f: the terms with |a|_inf <= N.
LaurentPolynomial square_partial_sum(const LaurentPolynomial& f, int box);

// Sub-Bergman projection of a Laurent polynomial: keeps the L^p-allowable
// terms and drops the rest. Requires p >= 2 (p = 2 is the Bergman projection).
LaurentPolynomial project_laurent(const HartogsTriangle& h, const Exponent& p,
                                  const LaurentPolynomial& f);

// sum over allowable a, |a|_inf <= box, of <f, e_a> / ||e_a||_2^2 e_a.
// The rule should be untruncated since ||e_a||_2 is the full-domain norm.
LaurentPolynomial project_sampled(const HartogsTriangle& h, const Exponent& p,
                                  const SampledFunction& f, int box);
LaurentPolynomial project_sampled(const HartogsTriangle& h, const Exponent& p,
                                  const SampledFunction::Fn& f, int box,
                                  const QuadratureRule& rule);

// The kernels are conjugate symmetric, so the adjoint of B~^p acts by the
// same coefficient formula.
inline LaurentPolynomial project_laurent_adjoint(const HartogsTriangle& h, const Exponent& p,
                                                 const LaurentPolynomial& f) {
  return project_laurent(h, p, f);
}
inline LaurentPolynomial project_sampled_adjoint(const HartogsTriangle& h, const Exponent& p,
                                                 const SampledFunction& f, int box) {
  return project_sampled(h, p, f, box);
}

// Nested subdomains Omega_{t_1} c Omega_{t_2} c ... for t_1 > t_2 > ... > 0.
class ExhaustionSequence {
 public:
  enum class Family { Annular, Scaled };

  ExhaustionSequence(Family family, std::vector<double> t);
  // t0, t0 r, t0 r^2, ... (count terms).
  static ExhaustionSequence geometric(Family family, double t0, double ratio, int count);

  Family family() const { return family_; }
  const std::vector<double>& parameters() const { return t_; }
  Truncation truncation(const HartogsTriangle& h, std::size_t i) const;

 private:
  Family family_;
  std::vector<double> t_;
};

struct ExhaustionResult {
  std::vector<Complex> values;
  double cauchy_tail;  // max |v_{i+1} - v_i| over the last two steps
  bool converged;      // cauchy_tail < tol
};

// The integrals int_{Omega_t} K(z, w) f(w) dV(w) along the exhaustion. Each
// level reuses `base` with the truncation replaced and the low-end grading
// deepened by log2(1/t).
ExhaustionResult exhaustion_projection(const KernelSpec& spec, const SampledFunction::Fn& f,
                                       Point z, const ExhaustionSequence& ex,
                                       const RuleConfig& base, double tol = 1e-4);
ExhaustionResult exhaustion_projection(const KernelSpec& spec, const LaurentPolynomial& f,
                                       Point z, const ExhaustionSequence& ex,
                                       const RuleConfig& base, double tol = 1e-4);

// Phi(g)(f) = int f conj(g) dV.
Complex pairing_functional(const LaurentPolynomial& g, const LaurentPolynomial& f,
                           const QuadratureRule& rule);
Complex pairing_functional(const LaurentPolynomial& g, const SampledFunction& f);

struct NearestResult {
  LaurentPolynomial approximant;
  double distance;  // ||g - approximant||_2 on the rule
};

// L^2-nearest element of the (box-truncated) closure of A^p, p >= 2.
NearestResult nearest_in_Ap(const HartogsTriangle& h, const Exponent& p, const SampledFunction& g,
                            int box);

// Dual-space index sets for conjugate q < 2 < p: G^{q,p} indices are
// L^p-allowable, N^{q,p} indices are L^q- but not L^p-allowable.
bool in_g_set(const HartogsTriangle& h, const Exponent& q, const Exponent& p, MultiIndex a);
bool in_n_set(const HartogsTriangle& h, const Exponent& q, const Exponent& p, MultiIndex a);
LaurentPolynomial g_part(const HartogsTriangle& h, const Exponent& q, const Exponent& p,
                         const LaurentPolynomial& f);
LaurentPolynomial n_part(const HartogsTriangle& h, const Exponent& q, const Exponent& p,
                         const LaurentPolynomial& f);

}  // namespace hartogs
