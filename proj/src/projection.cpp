#include "hartogs/projection.hpp"

#include <cmath>

#include "hartogs/errors.hpp"

namespace hartogs {
namespace {

void require_p_at_least_2(const Exponent& p) {
  if (p < Exponent(2)) throw InvalidArgument("sub-Bergman projection needs p >= 2, got " + p.to_string());
}

std::vector<MultiIndex> target_indices(const HartogsTriangle& h, const Exponent& p, int box) {
  return allowable_in_box(h, p, box);
}

LaurentPolynomial from_modes(const HartogsTriangle& h, const std::vector<MultiIndex>& idx,
                             const std::vector<Complex>& modes) {
  LaurentPolynomial::Terms out;
  for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = modes[k] / l2_norm_squared(h, idx[k]);
  return LaurentPolynomial(std::move(out));
}

}  // namespace

LaurentPolynomial square_partial_sum(const LaurentPolynomial& f, int box) {
  if (box < 0) throw InvalidArgument("partial-sum box must be nonnegative");
  return f.filter([box](MultiIndex a) { return a.sup_norm() <= box; });
}

LaurentPolynomial project_laurent(const HartogsTriangle& h, const Exponent& p,
                                  const LaurentPolynomial& f) {
  require_p_at_least_2(p);
  return f.filter([&](MultiIndex a) { return is_allowable(h, p, a); });
}

LaurentPolynomial project_sampled(const HartogsTriangle& h, const Exponent& p,
                                  const SampledFunction& f, int box) {
  require_p_at_least_2(p);
  const auto idx = target_indices(h, p, box);
  return from_modes(h, idx, mode_integrals(f, idx));
}

LaurentPolynomial project_sampled(const HartogsTriangle& h, const Exponent& p,
                                  const SampledFunction::Fn& f, int box,
                                  const QuadratureRule& rule) {
  require_p_at_least_2(p);
  const auto idx = target_indices(h, p, box);
  return from_modes(h, idx, mode_integrals(f, rule, idx));
}

ExhaustionSequence::ExhaustionSequence(Family family, std::vector<double> t)
    : family_(family), t_(std::move(t)) {
  if (t_.empty()) throw InvalidArgument("exhaustion sequence is empty");
  for (std::size_t i = 0; i < t_.size(); ++i) {
    if (!(t_[i] > 0.0 && t_[i] < 0.5)) throw InvalidArgument("exhaustion parameters must lie in (0, 1/2)");
    if (i > 0 && !(t_[i] < t_[i - 1])) throw InvalidArgument("exhaustion parameters must decrease");
  }
}

ExhaustionSequence ExhaustionSequence::geometric(Family family, double t0, double ratio,
                                                 int count) {
  std::vector<double> t;
  for (int i = 0; i < count; ++i) t.push_back(t0 * std::pow(ratio, i));
  return {family, std::move(t)};
}

Truncation ExhaustionSequence::truncation(const HartogsTriangle& h, std::size_t i) const {
  const double t = t_.at(i);
  return family_ == Family::Annular ? Truncation::annular(h, t) : Truncation::scaled(h, t);
}

ExhaustionResult exhaustion_projection(const KernelSpec& spec, const SampledFunction::Fn& f,
                                       Point z, const ExhaustionSequence& ex,
                                       const RuleConfig& base, double tol) {
  const auto& h = spec.domain();
  if (!h.contains(std::abs(z.z1), std::abs(z.z2))) {
    throw InvalidArgument("exhaustion evaluation point is outside the domain");
  }
  ExhaustionResult res{{}, 0.0, false};
  for (std::size_t i = 0; i < ex.parameters().size(); ++i) {
    RuleConfig cfg = base;
    cfg.truncation = ex.truncation(h, i);
    cfg.r2_levels_low += static_cast<int>(std::ceil(std::log2(1.0 / cfg.truncation.r2_lo)));
    const QuadratureRule rule(h, cfg);
    res.values.push_back(integrate(
        [&](Complex w1, Complex w2) {
          return sub_bergman_closed(spec, KernelPoint(z, Point{w1, w2})) * f(w1, w2);
        },
        rule));
  }
  const auto& v = res.values;
  for (std::size_t i = v.size() >= 3 ? v.size() - 3 : 0; i + 1 < v.size(); ++i) {
    res.cauchy_tail = std::max(res.cauchy_tail, std::abs(v[i + 1] - v[i]));
  }
  res.converged = v.size() >= 2 && res.cauchy_tail < tol;
  return res;
}

ExhaustionResult exhaustion_projection(const KernelSpec& spec, const LaurentPolynomial& f,
                                       Point z, const ExhaustionSequence& ex,
                                       const RuleConfig& base, double tol) {
  return exhaustion_projection(
      spec, [&f](Complex w1, Complex w2) { return f(w1, w2); }, z, ex, base, tol);
}

Complex pairing_functional(const LaurentPolynomial& g, const LaurentPolynomial& f,
                           const QuadratureRule& rule) {
  return pair(f, g, rule);
}

Complex pairing_functional(const LaurentPolynomial& g, const SampledFunction& f) {
  return pair(f, g);
}

NearestResult nearest_in_Ap(const HartogsTriangle& h, const Exponent& p, const SampledFunction& g,
                            int box) {
  auto approx = project_sampled(h, p, g, box);
  const auto residual = g - SampledFunction::sample(g.rule_ptr(), approx);
  return {std::move(approx), lp_norm(residual, Exponent(2))};
}

bool in_g_set(const HartogsTriangle& h, const Exponent&, const Exponent& p, MultiIndex a) {
  return is_allowable(h, p, a);
}

bool in_n_set(const HartogsTriangle& h, const Exponent& q, const Exponent& p, MultiIndex a) {
  return is_allowable(h, q, a) && !is_allowable(h, p, a);
}

LaurentPolynomial g_part(const HartogsTriangle& h, const Exponent& q, const Exponent& p,
                         const LaurentPolynomial& f) {
  return f.filter([&](MultiIndex a) { return in_g_set(h, q, p, a); });
}

LaurentPolynomial n_part(const HartogsTriangle& h, const Exponent& q, const Exponent& p,
                         const LaurentPolynomial& f) {
  return f.filter([&](MultiIndex a) { return in_n_set(h, q, p, a); });
}

}  // namespace hartogs
