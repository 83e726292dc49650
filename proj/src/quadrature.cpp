#include "hartogs/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include <fftw3.h>

#include "hartogs/errors.hpp"

namespace hartogs {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFourPiSq = kTwoPi * kTwoPi;

// A 2D forward DFT buffer of side n, reused across radial nodes.
class Fft2 {
 public:
  explicit Fft2(int n) : n_(n) {
    const auto sz = static_cast<std::size_t>(n) * n;
    in_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * sz));
    out_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * sz));
    plan_ = fftw_plan_dft_2d(n, n, in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  ~Fft2() {
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;

  Complex* in() { return reinterpret_cast<Complex*>(in_); }
  void run() { fftw_execute(plan_); }
  // (1/n^2) sum_j in[j] e^{-i a.theta_j}
  Complex mode(MultiIndex a) const {
    const int k1 = ((a.a1 % n_) + n_) % n_;
    const int k2 = ((a.a2 % n_) + n_) % n_;
    const auto& c = out_[static_cast<std::size_t>(k1) * n_ + k2];
    return Complex(c[0], c[1]) / (static_cast<double>(n_) * n_);
  }

 private:
  int n_;
  fftw_complex* in_;
  fftw_complex* out_;
  fftw_plan plan_;
};

void check_band(const std::vector<MultiIndex>& idx, int n) {
  for (const auto& a : idx) {
    if (2 * std::abs(a.a1) >= n || 2 * std::abs(a.a2) >= n) {
      std::ostringstream msg;
      msg << "mode " << a << " aliases on a " << n << "-point angular grid";
      throw InvalidArgument(msg.str());
    }
  }
}

std::vector<Complex> unit_roots(int n) {
  std::vector<Complex> w(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) w[j] = std::polar(1.0, kTwoPi * j / n);
  return w;
}

// exp(i a theta_j) via the root table, exact periodicity in j.
Complex phase(const std::vector<Complex>& roots, int a, int j) {
  const long n = static_cast<long>(roots.size());
  long k = (static_cast<long>(a) * j) % n;
  if (k < 0) k += n;
  return roots[static_cast<std::size_t>(k)];
}

template <class Visit>
void for_each_angle(const QuadratureRule& rule, const RadialNode& node, Visit&& visit) {
  const int n = rule.angular();
  const double r1 = node.r1();
  const double r2 = node.r2();
  for (int j1 = 0; j1 < n; ++j1) {
    const Complex z1 = std::polar(r1, rule.theta(j1));
    for (int j2 = 0; j2 < n; ++j2) visit(j1, j2, z1, std::polar(r2, rule.theta(j2)));
  }
}

// sum_i w_i r_i^{2a} over the rule, times 4 pi^2: the squared L^2 norm of e_a.
double radial_sum(const QuadratureRule& rule, double a1, double a2) {
  KahanSum acc;
  for (const auto& nd : rule.radial()) {
    acc.add(std::exp(nd.log_weight + a1 * nd.log_r1 + a2 * nd.log_r2));
  }
  return kFourPiSq * acc.value();
}

// 1D backward DFT: out[j] = sum_k in[k] e^{2 pi i jk/n}.
class Fft1 {
 public:
  explicit Fft1(int n) : n_(n) {
    in_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    out_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    plan_ = fftw_plan_dft_1d(n, in_, out_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft1() {
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  Fft1(const Fft1&) = delete;
  Fft1& operator=(const Fft1&) = delete;

  Complex* in() { return reinterpret_cast<Complex*>(in_); }
  const Complex* out() const { return reinterpret_cast<const Complex*>(out_); }
  int size() const { return n_; }
  void run() { fftw_execute(plan_); }

 private:
  int n_;
  fftw_complex* in_;
  fftw_complex* out_;
  fftw_plan plan_;
};

// When all indices lie on one line a = a0 + j d (d primitive), |f| depends on
// the angles only through psi = d.theta, and the torus integral of |f|^p is
// 2pi times a one-dimensional integral in psi. Returns the steps j.
std::optional<std::vector<int>> collinear_steps(const std::vector<MultiIndex>& idx) {
  MultiIndex d{0, 0};
  for (const auto& a : idx) {
    const MultiIndex diff = a - idx.front();
    if (diff.a1 != 0 || diff.a2 != 0) {
      const int g = std::gcd(diff.a1, diff.a2);
      d = {diff.a1 / g, diff.a2 / g};
      break;
    }
  }
  if (d.a1 == 0 && d.a2 == 0) return std::nullopt;
  std::vector<int> steps;
  for (const auto& a : idx) {
    const MultiIndex diff = a - idx.front();
    if (diff.a1 * d.a2 - diff.a2 * d.a1 != 0) return std::nullopt;
    steps.push_back(d.a1 != 0 ? diff.a1 / d.a1 : diff.a2 / d.a2);
  }
  return steps;
}

double lp_norm_collinear(const std::vector<MultiIndex>& idx, const std::vector<Complex>& coef,
                         const std::vector<int>& steps, const Exponent& p,
                         const QuadratureRule& rule) {
  const int lo = *std::min_element(steps.begin(), steps.end());
  const int hi = *std::max_element(steps.begin(), steps.end());
  const int n = std::max(4 * rule.angular(), 8 * (hi - lo + 1));
  Fft1 fft(n);
  const bool inf = p.is_infinite();
  const double pd = inf ? 0.0 : p.to_double();
  const double psi_weight = kTwoPi * kTwoPi / n;
  const std::size_t nt = idx.size();
  std::vector<double> logmag(nt);
  std::vector<Complex> scaled(nt);
  KahanSum acc;
  double sup = -std::numeric_limits<double>::infinity();
  for (const auto& nd : rule.radial()) {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < nt; ++k) {
      logmag[k] = std::log(std::abs(coef[k])) + idx[k].a1 * nd.log_r1 + idx[k].a2 * nd.log_r2;
      top = std::max(top, logmag[k]);
    }
    for (std::size_t k = 0; k < nt; ++k) {
      scaled[k] = coef[k] / std::abs(coef[k]) * std::exp(logmag[k] - top);
    }
    std::fill(fft.in(), fft.in() + n, Complex(0.0));
    for (std::size_t k = 0; k < nt; ++k) fft.in()[steps[k] - lo] += scaled[k];
    fft.run();
    double node_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const Complex v = fft.out()[j];
      if (inf) {
        sup = std::max(sup, std::log(std::abs(v)) + top);
      } else {
        node_sum += std::pow(std::abs(v), pd);
      }
    }
    if (!inf && node_sum > 0.0) {
      acc.add(std::exp(nd.log_weight + pd * top + std::log(node_sum * psi_weight)));
    }
  }
  if (inf) return std::exp(sup);
  return std::pow(acc.value(), 1.0 / pd);
}

}  // namespace

void KahanSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

Truncation Truncation::annular(const HartogsTriangle& h, double t) {
  if (!(t >= 0.0 && t < 0.5)) throw InvalidArgument("truncation parameter must lie in [0, 1/2)");
  return {t, 1.0 - t, std::pow(1.0 - t, h.shadow_exponent())};
}

Truncation Truncation::scaled(const HartogsTriangle& h, double t) {
  if (!(t >= 0.0 && t < 0.5)) throw InvalidArgument("truncation parameter must lie in [0, 1/2)");
  return {0.5 * t, 1.0 - 0.5 * t, std::pow(1.0 - t, 2.0 * h.shadow_exponent())};
}

double RadialNode::r1() const { return std::exp(log_r1); }
double RadialNode::r2() const { return std::exp(log_r2); }
double RadialNode::weight() const { return std::exp(log_weight); }

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  if (order < 1) throw InvalidArgument("Gauss-Legendre order must be positive");
  nodes.assign(static_cast<std::size_t>(order), 0.0);
  weights.assign(static_cast<std::size_t>(order), 0.0);
  const auto n = static_cast<unsigned>(order);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double p = std::legendre(n, x);
      const double pm = n > 1 ? std::legendre(n - 1, x) : 1.0;
      dp = order * (x * p - pm) / (x * x - 1.0);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double p = std::legendre(n, x);
    const double pm = n > 1 ? std::legendre(n - 1, x) : 1.0;
    dp = order * (x * p - pm) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[order - 1 - i] = x;
    weights[i] = w;
    weights[order - 1 - i] = w;
  }
}

std::vector<GradedNode> graded_rule(double lo, double hi, int order, int levels_low,
                                    int levels_high) {
  if (!(hi > lo)) throw InvalidArgument("graded rule needs hi > lo");
  levels_low = std::clamp(levels_low, 0, 1000);
  levels_high = std::clamp(levels_high, 0, 45);

  std::vector<double> brk{0.0};
  for (int j = levels_low; j >= 2; --j) brk.push_back(std::ldexp(1.0, -j));
  brk.push_back(0.5);
  for (int j = 2; j <= levels_high; ++j) brk.push_back(1.0 - std::ldexp(1.0, -j));
  brk.push_back(1.0);

  std::vector<double> xi;
  std::vector<double> wi;
  gauss_legendre(order, xi, wi);

  const double len = hi - lo;
  std::vector<GradedNode> out;
  out.reserve((brk.size() - 1) * xi.size());
  for (std::size_t p = 0; p + 1 < brk.size(); ++p) {
    const double a = brk[p];
    const double b = brk[p + 1];
    const double half = 0.5 * (b - a);
    for (std::size_t q = 0; q < xi.size(); ++q) {
      // Near y = 1 form 1 - y from the panel's right end to keep digits.
      const double y = xi[q] <= 0.0 ? a + half * (1.0 + xi[q]) : b - half * (1.0 - xi[q]);
      const double x = lo + len * y;
      const double lx = lo == 0.0 ? std::log(len) + std::log(y) : std::log(x);
      out.push_back({x, len * half * wi[q], lx});
    }
  }
  return out;
}

QuadratureRule::QuadratureRule(const HartogsTriangle& h, const RuleConfig& cfg)
    : h_(h), cfg_(cfg) {
  const auto& tr = cfg.truncation;
  if (!(tr.r2_lo >= 0.0 && tr.r2_hi <= 1.0 && tr.r2_lo < tr.r2_hi && tr.u_hi > 0.0 &&
        tr.u_hi <= 1.0)) {
    throw InvalidArgument("truncation must describe a nonempty subset of the shadow");
  }
  if (cfg.angular < 1) throw InvalidArgument("angular resolution must be positive");
  const auto r2 =
      graded_rule(tr.r2_lo, tr.r2_hi, cfg.order, cfg.r2_levels_low, cfg.r2_levels_high);
  const auto u = graded_rule(0.0, tr.u_hi, cfg.order, cfg.u_levels_low, cfg.u_levels_high);
  const double g = h.shadow_exponent();
  nodes_.reserve(r2.size() * u.size());
  for (const auto& a : r2) {
    for (const auto& b : u) {
      nodes_.push_back({g * a.log_x + b.log_x, a.log_x,
                        std::log(a.w) + std::log(b.w) + (2.0 * g + 1.0) * a.log_x + b.log_x});
    }
  }
}

double QuadratureRule::theta(int j) const { return kTwoPi * j / cfg_.angular; }

double QuadratureRule::angular_weight() const {
  const double d = kTwoPi / cfg_.angular;
  return d * d;
}

std::size_t QuadratureRule::size() const {
  return nodes_.size() * static_cast<std::size_t>(cfg_.angular) * cfg_.angular;
}

RulePtr make_rule(const HartogsTriangle& h, const RuleConfig& cfg) {
  return std::make_shared<const QuadratureRule>(h, cfg);
}

SampledFunction::SampledFunction(RulePtr rule, std::vector<Complex> values)
    : rule_(std::move(rule)), values_(std::move(values)) {
  if (!rule_) throw InvalidArgument("sampled function needs a rule");
  if (values_.size() != rule_->size()) {
    throw InvalidArgument("sample count " + std::to_string(values_.size()) +
                          " does not match the rule grid " + std::to_string(rule_->size()));
  }
}

SampledFunction SampledFunction::sample(RulePtr rule, const Fn& f) {
  std::vector<Complex> v;
  v.reserve(rule->size());
  for (const auto& nd : rule->radial()) {
    for_each_angle(*rule, nd, [&](int, int, Complex z1, Complex z2) { v.push_back(f(z1, z2)); });
  }
  return SampledFunction(std::move(rule), std::move(v));
}

SampledFunction SampledFunction::sample(RulePtr rule, const LaurentPolynomial& f) {
  const int n = rule->angular();
  const auto roots = unit_roots(n);
  std::vector<Complex> v;
  v.reserve(rule->size());
  std::vector<Complex> c;
  for (const auto& nd : rule->radial()) {
    c.clear();
    for (const auto& [a, coef] : f.terms()) {
      c.push_back(coef * std::exp(a.a1 * nd.log_r1 + a.a2 * nd.log_r2));
    }
    for (int j1 = 0; j1 < n; ++j1) {
      for (int j2 = 0; j2 < n; ++j2) {
        Complex s(0.0);
        std::size_t k = 0;
        for (const auto& [a, coef] : f.terms()) {
          s += c[k++] * phase(roots, a.a1, j1) * phase(roots, a.a2, j2);
        }
        v.push_back(s);
      }
    }
  }
  return SampledFunction(std::move(rule), std::move(v));
}

Complex SampledFunction::at(std::size_t node, int j1, int j2) const {
  const auto n = static_cast<std::size_t>(rule_->angular());
  return values_.at(node * n * n + static_cast<std::size_t>(j1) * n + j2);
}

SampledFunction SampledFunction::operator+(const SampledFunction& o) const {
  if (o.rule_ != rule_) throw InvalidArgument("sampled functions live on different rules");
  std::vector<Complex> v(values_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.values_[i];
  return SampledFunction(rule_, std::move(v));
}

SampledFunction SampledFunction::operator-(const SampledFunction& o) const {
  return *this + o * Complex(-1.0);
}

SampledFunction SampledFunction::operator*(Complex c) const {
  std::vector<Complex> v(values_);
  for (auto& x : v) x *= c;
  return SampledFunction(rule_, std::move(v));
}

void SampledFunction::write_csv(std::ostream& os) const {
  os << "r1,r2,theta1,theta2,re,im\n";
  os.precision(17);
  const int n = rule_->angular();
  std::size_t k = 0;
  for (const auto& nd : rule_->radial()) {
    const double r1 = nd.r1();
    const double r2 = nd.r2();
    for (int j1 = 0; j1 < n; ++j1) {
      for (int j2 = 0; j2 < n; ++j2) {
        const Complex v = values_[k++];
        os << r1 << ',' << r2 << ',' << rule_->theta(j1) << ',' << rule_->theta(j2) << ','
           << v.real() << ',' << v.imag() << '\n';
      }
    }
  }
}

SampledFunction SampledFunction::read_csv(RulePtr rule, std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("empty sampled-function CSV");
  const auto close = [](double x, double y) {
    return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
  };
  const int n = rule->angular();
  std::vector<Complex> v;
  v.reserve(rule->size());
  std::size_t row = 0;
  const std::size_t per_node = static_cast<std::size_t>(n) * n;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double r1, r2, t1, t2, re, im;
    if (!(ls >> r1 >> r2 >> t1 >> t2 >> re >> im)) {
      throw InvalidArgument("malformed CSV row " + std::to_string(row + 2));
    }
    const std::size_t node = row / per_node;
    if (node >= rule->radial().size()) throw InvalidArgument("CSV has more rows than the grid");
    const auto& nd = rule->radial()[node];
    const int j1 = static_cast<int>((row % per_node) / n);
    const int j2 = static_cast<int>(row % n);
    if (!close(r1, nd.r1()) || !close(r2, nd.r2()) || !close(t1, rule->theta(j1)) ||
        !close(t2, rule->theta(j2))) {
      throw InvalidArgument("CSV row " + std::to_string(row + 2) + " is off the rule grid");
    }
    v.emplace_back(re, im);
    ++row;
  }
  return SampledFunction(std::move(rule), std::move(v));
}

std::optional<double> radial_monomial_integral(const HartogsTriangle& h, double a, double b,
                                               const Truncation& trunc) {
  if (!(a > -2.0)) return std::nullopt;
  const double g = h.shadow_exponent();
  const double c = b + 1.0 + g * (a + 2.0);
  const double lo = trunc.r2_lo;
  const double hi = trunc.r2_hi;
  double r2_part;
  if (c == -1.0) {
    if (lo <= 0.0) return std::nullopt;
    r2_part = std::log(hi / lo);
  } else if (c < -1.0 && lo <= 0.0) {
    return std::nullopt;
  } else {
    const double lo_pow = lo > 0.0 ? std::pow(lo, c + 1.0) : 0.0;
    r2_part = (std::pow(hi, c + 1.0) - lo_pow) / (c + 1.0);
  }
  return kFourPiSq * std::pow(trunc.u_hi, a + 2.0) / (a + 2.0) * r2_part;
}

double radial_monomial_integral_numeric(double a, double b, const QuadratureRule& rule) {
  return radial_sum(rule, a, b);
}

double lp_norm(const LaurentPolynomial& f, const Exponent& p, const QuadratureRule& rule) {
  if (f.empty()) return 0.0;
  const bool inf = p.is_infinite();
  const double pd = inf ? 0.0 : p.to_double();
  if (!inf && f.size() == 1) {
    const auto& [a, c] = *f.terms().begin();
    return std::abs(c) * std::pow(radial_sum(rule, pd * a.a1, pd * a.a2), 1.0 / pd);
  }
  if (!inf && p == Exponent(2)) {
    KahanSum acc;
    for (const auto& [a, c] : f.terms()) acc.add(std::norm(c) * radial_sum(rule, 2.0 * a.a1, 2.0 * a.a2));
    return std::sqrt(acc.value());
  }

  const std::size_t nt = f.size();
  std::vector<MultiIndex> idx;
  std::vector<Complex> coef;
  for (const auto& [a, c] : f.terms()) {
    idx.push_back(a);
    coef.push_back(c);
  }
  if (auto steps = collinear_steps(idx)) return lp_norm_collinear(idx, coef, *steps, p, rule);

  const int n = rule.angular();
  const auto roots = unit_roots(n);
  // Phase tables per term.
  std::vector<Complex> ph1(nt * n);
  std::vector<Complex> ph2(nt * n);
  for (std::size_t k = 0; k < nt; ++k) {
    for (int j = 0; j < n; ++j) {
      ph1[k * n + j] = phase(roots, idx[k].a1, j);
      ph2[k * n + j] = phase(roots, idx[k].a2, j);
    }
  }

  KahanSum acc;
  double sup = 0.0;
  std::vector<double> logmag(nt);
  std::vector<Complex> scaled(nt);
  std::vector<Complex> partial(nt);
  for (const auto& nd : rule.radial()) {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < nt; ++k) {
      logmag[k] = std::log(std::abs(coef[k])) + idx[k].a1 * nd.log_r1 + idx[k].a2 * nd.log_r2;
      top = std::max(top, logmag[k]);
    }
    for (std::size_t k = 0; k < nt; ++k) {
      scaled[k] = coef[k] / std::abs(coef[k]) * std::exp(logmag[k] - top);
    }
    double node_sum = 0.0;
    for (int j1 = 0; j1 < n; ++j1) {
      for (std::size_t k = 0; k < nt; ++k) partial[k] = scaled[k] * ph1[k * n + j1];
      for (int j2 = 0; j2 < n; ++j2) {
        Complex v(0.0);
        for (std::size_t k = 0; k < nt; ++k) v += partial[k] * ph2[k * n + j2];
        if (inf) {
          sup = std::max(sup, std::log(std::abs(v)) + top);
        } else {
          node_sum += std::pow(std::abs(v), pd);
        }
      }
    }
    if (!inf && node_sum > 0.0) {
      acc.add(std::exp(nd.log_weight + pd * top + std::log(node_sum * rule.angular_weight())));
    }
  }
  if (inf) return std::exp(sup);
  return std::pow(acc.value(), 1.0 / pd);
}

namespace {

// |x|^p with exact fast paths for small integer p.
double abs_pow(Complex x, double p) {
  if (p == 2.0) return std::norm(x);
  const double a = std::abs(x);
  if (p == 1.0) return a;
  if (p == 4.0) {
    const double n2 = std::norm(x);
    return n2 * n2;
  }
  if (p == 3.0) return a * a * a;
  return std::pow(a, p);
}

}  // namespace

double lp_norm(const SampledFunction& f, const Exponent& p) {
  const auto& rule = f.rule();
  const auto per_node = static_cast<std::size_t>(rule.angular()) * rule.angular();
  const auto& v = f.values();
  if (p.is_infinite()) {
    double sup = 0.0;
    for (const auto& x : v) sup = std::max(sup, std::abs(x));
    return sup;
  }
  const double pd = p.to_double();
  KahanSum acc;
  for (std::size_t i = 0; i < rule.radial().size(); ++i) {
    KahanSum node;
    for (std::size_t k = 0; k < per_node; ++k) node.add(abs_pow(v[i * per_node + k], pd));
    acc.add(rule.radial()[i].weight() * rule.angular_weight() * node.value());
  }
  return std::pow(acc.value(), 1.0 / pd);
}

double lp_norm(const SampledFunction::Fn& f, const Exponent& p, const QuadratureRule& rule) {
  const bool inf = p.is_infinite();
  const double pd = inf ? 0.0 : p.to_double();
  KahanSum acc;
  double sup = 0.0;
  for (const auto& nd : rule.radial()) {
    KahanSum node;
    for_each_angle(rule, nd, [&](int, int, Complex z1, Complex z2) {
      const Complex fz = f(z1, z2);
      if (inf) {
        sup = std::max(sup, std::abs(fz));
      } else {
        node.add(abs_pow(fz, pd));
      }
    });
    if (!inf) acc.add(nd.weight() * rule.angular_weight() * node.value());
  }
  return inf ? sup : std::pow(acc.value(), 1.0 / pd);
}

Complex pair(const LaurentPolynomial& f, const LaurentPolynomial& g, const QuadratureRule& rule) {
  ComplexKahanSum acc;
  for (const auto& [a, c] : f.terms()) {
    const Complex d = g.coefficient(a);
    if (d == Complex(0.0)) continue;
    acc.add(c * std::conj(d) * radial_sum(rule, 2.0 * a.a1, 2.0 * a.a2));
  }
  return acc.value();
}

Complex pair(const SampledFunction& f, const LaurentPolynomial& g) {
  std::vector<MultiIndex> idx;
  for (const auto& [a, c] : g.terms()) idx.push_back(a);
  const auto modes = mode_integrals(f, idx);
  ComplexKahanSum acc;
  std::size_t k = 0;
  for (const auto& [a, c] : g.terms()) acc.add(std::conj(c) * modes[k++]);
  return acc.value();
}

Complex pair(const SampledFunction& f, const SampledFunction& g) {
  if (f.rule_ptr() != g.rule_ptr()) throw InvalidArgument("sampled functions live on different rules");
  const auto& rule = f.rule();
  const auto per_node = static_cast<std::size_t>(rule.angular()) * rule.angular();
  ComplexKahanSum acc;
  for (std::size_t i = 0; i < rule.radial().size(); ++i) {
    ComplexKahanSum node;
    for (std::size_t k = 0; k < per_node; ++k) {
      node.add(f.values()[i * per_node + k] * std::conj(g.values()[i * per_node + k]));
    }
    acc.add(rule.radial()[i].weight() * rule.angular_weight() * node.value());
  }
  return acc.value();
}

namespace {

template <class Fill>
std::vector<Complex> modes_by_node(const QuadratureRule& rule, const std::vector<MultiIndex>& idx,
                                   Fill&& fill) {
  const int n = rule.angular();
  check_band(idx, n);
  Fft2 fft(n);
  std::vector<ComplexKahanSum> acc(idx.size());
  for (std::size_t i = 0; i < rule.radial().size(); ++i) {
    const auto& nd = rule.radial()[i];
    fill(i, nd, fft.in());
    fft.run();
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const double scale =
          std::exp(nd.log_weight + idx[k].a1 * nd.log_r1 + idx[k].a2 * nd.log_r2);
      acc[k].add(kFourPiSq * scale * fft.mode(idx[k]));
    }
  }
  std::vector<Complex> out;
  out.reserve(acc.size());
  for (const auto& a : acc) out.push_back(a.value());
  return out;
}

}  // namespace

std::vector<Complex> mode_integrals(const SampledFunction& f, const std::vector<MultiIndex>& idx) {
  const auto per_node = static_cast<std::size_t>(f.rule().angular()) * f.rule().angular();
  return modes_by_node(f.rule(), idx, [&](std::size_t i, const RadialNode&, Complex* buf) {
    std::copy_n(f.values().begin() + static_cast<std::ptrdiff_t>(i * per_node), per_node, buf);
  });
}

std::vector<Complex> mode_integrals(const SampledFunction::Fn& f, const QuadratureRule& rule,
                                    const std::vector<MultiIndex>& idx) {
  const int n = rule.angular();
  return modes_by_node(rule, idx, [&](std::size_t, const RadialNode& nd, Complex* buf) {
    for_each_angle(rule, nd, [&](int j1, int j2, Complex z1, Complex z2) {
      buf[static_cast<std::size_t>(j1) * n + j2] = f(z1, z2);
    });
  });
}

Complex integrate(const SampledFunction::Fn& f, const QuadratureRule& rule) {
  ComplexKahanSum acc;
  for (const auto& nd : rule.radial()) {
    ComplexKahanSum node;
    for_each_angle(rule, nd, [&](int, int, Complex z1, Complex z2) { node.add(f(z1, z2)); });
    acc.add(nd.weight() * rule.angular_weight() * node.value());
  }
  return acc.value();
}

LaurentPolynomial::Terms torus_coefficients(const HartogsTriangle& h,
                                            const SampledFunction::Fn& f, double r1, double r2,
                                            int box, int samples) {
  if (!(r1 > 0.0) || !h.contains(r1, r2)) {
    std::ostringstream msg;
    msg << "torus (" << r1 << ", " << r2 << ") is not inside H_{" << h.m() << "/" << h.n() << "}";
    throw TorusOutsideDomain(msg.str());
  }
  if (box < 0) throw InvalidArgument("box must be nonnegative");
  if (samples <= 2 * box) throw InvalidArgument("torus sampling needs more than 2N points per angle");
  Fft2 fft(samples);
  Complex* buf = fft.in();
  for (int j1 = 0; j1 < samples; ++j1) {
    const Complex z1 = std::polar(r1, kTwoPi * j1 / samples);
    for (int j2 = 0; j2 < samples; ++j2) {
      buf[static_cast<std::size_t>(j1) * samples + j2] =
          f(z1, std::polar(r2, kTwoPi * j2 / samples));
    }
  }
  fft.run();
  LaurentPolynomial::Terms out;
  const double l1 = std::log(r1);
  const double l2 = std::log(r2);
  for (int a1 = -box; a1 <= box; ++a1) {
    for (int a2 = -box; a2 <= box; ++a2) {
      out[{a1, a2}] = fft.mode({a1, a2}) * std::exp(-(a1 * l1 + a2 * l2));
    }
  }
  return out;
}

}  // namespace hartogs
