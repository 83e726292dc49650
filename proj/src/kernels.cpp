#include "hartogs/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "hartogs/errors.hpp"
#include "hartogs/quadrature.hpp"

namespace hartogs {
namespace {

constexpr double kPiSq = std::numbers::pi * std::numbers::pi;

bool point_inside(const HartogsTriangle& h, Complex a, Complex b) {
  return h.contains(std::abs(a), std::abs(b));
}

// t^n - s^m, the boundary factor shared by every closed form.
Complex boundary_factor(const HartogsTriangle& h, Complex s, Complex t) {
  return ipow(t, h.n()) - ipow(s, h.m());
}

}  // namespace

void require_interior(const HartogsTriangle& h, const KernelPoint& pt) {
  if (!point_inside(h, pt.z1, pt.z2) || !point_inside(h, pt.w1, pt.w2)) {
    throw InvalidArgument("kernel point outside H_{" + std::to_string(h.m()) + "/" +
                          std::to_string(h.n()) + "}");
  }
}

KernelSpec::KernelSpec(const HartogsTriangle& h, int k) : h_(h), k_(k) {
  if (k < 1 - h.m() - h.n() || k > 0) {
    throw InvalidArgument("kernel class k=" + std::to_string(k) + " outside [" +
                          std::to_string(1 - h.m() - h.n()) + ", 0]");
  }
}

KernelSpec KernelSpec::for_exponent(const HartogsTriangle& h, const Exponent& p) {
  if (p < Exponent(2)) throw InvalidArgument("sub-Bergman kernels need p >= 2");
  return {h, classify_p(h, p)};
}

int adaptive_box(const HartogsTriangle& h, const KernelPoint& pt, double tol, int max_box) {
  const double as = std::abs(pt.s());
  const double at = std::abs(pt.t());
  if (!(at > 0.0)) throw InvalidArgument("kernel series needs z2, w2 != 0");
  const double g = h.shadow_exponent();
  const double au = as / std::pow(at, g);
  const double rho = std::max({au, at, std::pow(au, 1.0 / g)});
  if (!(rho < 1.0)) throw PointTooCloseToBoundary("series ratio reaches 1");
  const double log_tol = std::log(tol);
  const double log_rho = std::log(rho);
  const double log_den = 3.0 * std::log1p(-rho);
  for (int n = 1; n <= max_box; ++n) {
    if (3.0 * std::log(n + 1.0) + n * log_rho - log_den < log_tol) return n;
  }
  std::ostringstream msg;
  msg << "series needs more than " << max_box << " terms per direction (ratio " << rho << ")";
  throw PointTooCloseToBoundary(msg.str());
}

SeriesValue kernel_series(const KernelSpec& spec, const KernelPoint& pt, int box) {
  const auto& h = spec.domain();
  const int m = h.m();
  const int n = h.n();
  const int k = spec.k();
  const int nbox = box > 0 ? box : adaptive_box(h, pt);

  const Complex s = pt.s();
  const Complex t = pt.t();
  const double ls = std::log(std::abs(s));
  const double as = std::arg(s);
  const double lt = std::log(std::abs(t));
  const double at = std::arg(t);

  ComplexKahanSum acc;
  for (int a1 = 0; a1 <= nbox; ++a1) {
    if (a1 > 0 && s == Complex(0.0)) break;
    // smallest a2 with n a1 + m a2 >= k
    const int num = k - n * a1;
    int a2 = num >= 0 ? (num + m - 1) / m : -((-num) / m);
    a2 = std::max(a2, -nbox);
    if (a2 > nbox) continue;
    // s^a1 t^a2 in log form; the row then proceeds by multiplication with t.
    const double mag = (a1 > 0 ? a1 * ls : 0.0) + a2 * lt;
    const double ph = (a1 > 0 ? a1 * as : 0.0) + a2 * at;
    Complex term = std::polar(std::exp(mag), ph);
    ComplexKahanSum row;
    for (; a2 <= nbox; ++a2) {
      const double w = static_cast<double>(a1 + 1) * (n * a1 + m * a2 + m + n);
      row.add(term * w);
      term *= t;
    }
    acc.add(row.value());
  }
  const double g = h.shadow_exponent();
  const double au = std::abs(s) / std::pow(std::abs(t), g);
  const double rho = std::max({au, std::abs(t), std::pow(au, 1.0 / g)});
  const double tail = std::pow(nbox + 1.0, 3) * std::pow(rho, nbox) / std::pow(1.0 - rho, 3);
  return {acc.value() / (m * kPiSq), nbox, tail};
}

Complex line_series(const HartogsTriangle& h, int k, const KernelPoint& pt, double tol) {
  const int m = h.m();
  const int n = h.n();
  const MultiIndex b = line_base_point(h, k);
  const Complex s = pt.s();
  const Complex t = pt.t();
  const Complex x = ipow(s, m) / ipow(t, n);
  if (!(std::abs(x) < 1.0)) throw PointTooCloseToBoundary("line series ratio reaches 1");
  Complex term = ipow(s, b.a1) * ipow(t, b.a2);
  const double lead = std::abs(term);
  ComplexKahanSum acc;
  for (int j = 0;; ++j) {
    const Complex c = term * static_cast<double>(b.a1 + j * m + 1);
    acc.add(c);
    if (std::abs(c) <= tol * lead && j > 2) break;
    if (j > 1000000) throw PointTooCloseToBoundary("line series does not settle");
    term *= x;
  }
  return acc.value() * (static_cast<double>(m + n + k) / (m * kPiSq));
}

Complex line_kernel_closed(const HartogsTriangle& h, int k, const KernelPoint& pt) {
  const int m = h.m();
  const int n = h.n();
  if (k >= 0 || k < 1 - m - n) {
    throw InvalidArgument("line kernel index k=" + std::to_string(k) + " outside [" +
                          std::to_string(1 - m - n) + ", -1]");
  }
  const MultiIndex b = line_base_point(h, k);
  const Complex s = pt.s();
  const Complex t = pt.t();
  const Complex d = boundary_factor(h, s, t);
  // b2 + n >= 0 on these lines, so t^{b2+n} is a polynomial factor.
  const Complex num = ipow(s, b.a1) * ipow(t, b.a2 + n) *
                      (static_cast<double>(b.a1 + 1) * ipow(t, n) +
                       static_cast<double>(m - b.a1 - 1) * ipow(s, m));
  return static_cast<double>(m + n + k) / (m * kPiSq) * num / (d * d);
}

Complex binf_closed(const HartogsTriangle& h, const KernelPoint& pt) {
  const int m = h.m();
  const int n = h.n();
  const Complex s = pt.s();
  const Complex t = pt.t();
  const Complex d = boundary_factor(h, s, t);
  const Complex tn = ipow(t, n);
  const Complex sm = ipow(s, m);
  const Complex one_minus_t = 1.0 - t;
  Complex sum(0.0);
  for (int r = 0; r < m; ++r) {
    const int sig = sigma_permutation(h, r);
    const int e = (r - n * sig) / m;  // exact: n sig == r mod m
    const Complex i_part = ipow(s, sig) * ipow(t, e + n) *
                           (static_cast<double>(sig + 1) * tn + static_cast<double>(m - sig - 1) * sm);
    const Complex j_part = static_cast<double>(r + m + n) - static_cast<double>(r + n) * t;
    sum += i_part * j_part;
  }
  return sum / (m * kPiSq * d * d * one_minus_t * one_minus_t);
}

Complex sub_bergman_closed(const KernelSpec& spec, const KernelPoint& pt) {
  Complex v = binf_closed(spec.domain(), pt);
  for (int j = spec.k(); j <= -1; ++j) v += line_kernel_closed(spec.domain(), j, pt);
  return v;
}

Complex bergman_kernel(const HartogsTriangle& h, const KernelPoint& pt) {
  return sub_bergman_closed(KernelSpec::bergman(h), pt);
}

namespace {

double majorant(const HartogsTriangle& h, const KernelPoint& pt, double a) {
  const Complex s = pt.s();
  const Complex t = pt.t();
  return std::pow(std::abs(t), a) /
         (std::norm(1.0 - t) * std::norm(boundary_factor(h, s, t)));
}

}  // namespace

double type_a_ratio(const KernelSpec& spec, const KernelPoint& pt) {
  const double a = to_double(type_a_exponent(spec.domain(), spec.k()));
  return std::abs(sub_bergman_closed(spec, pt)) / majorant(spec.domain(), pt, a);
}

double line_type_a_ratio(const HartogsTriangle& h, int k, const KernelPoint& pt) {
  const double a = to_double(type_a_exponent(h, k));
  return std::abs(line_kernel_closed(h, k, pt)) / majorant(h, pt, a);
}

Point random_interior_point(const HartogsTriangle& h, double eps, std::mt19937_64& rng) {
  if (!(eps > 0.0 && eps < 0.5)) throw InvalidArgument("stand-off must lie in (0, 1/2)");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const double r2 = eps + (1.0 - 2.0 * eps) * unit(rng);
  const double r1 = std::pow((1.0 - eps) * r2, h.shadow_exponent()) * unit(rng);
  const double t1 = angle(rng);
  const double t2 = angle(rng);
  return {std::polar(r1, t1), std::polar(r2, t2)};
}

GramSpectrum gram_spectrum(const KernelSpec& spec, const std::vector<Point>& pts) {
  const auto n = static_cast<Eigen::Index>(pts.size());
  if (n == 0) return {0.0, 0.0};
  Eigen::MatrixXcd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      g(i, j) = sub_bergman_closed(spec, KernelPoint(pts[i], pts[j]));
    }
  }
  // Symmetrize away the last-bit asymmetry of the closed form.
  const Eigen::MatrixXcd herm = 0.5 * (g + g.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  return {es.eigenvalues()(0), es.eigenvalues()(n - 1)};
}

void evaluate_batch(const KernelSpec& spec, std::istream& in, std::ostream& out) {
  out << "re,im,majorant_ratio\n";
  out.precision(17);
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double v[8];
    bool ok = true;
    for (double& x : v) ok = ok && static_cast<bool>(ls >> x);
    if (!ok) {
      double first;
      if (row == 1 && !(std::istringstream(line) >> first)) continue;
      throw InvalidArgument("malformed kernel CSV row " + std::to_string(row));
    }
    const KernelPoint pt({v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}, {v[6], v[7]});
    require_interior(spec.domain(), pt);
    const Complex k = sub_bergman_closed(spec, pt);
    out << k.real() << ',' << k.imag() << ',' << type_a_ratio(spec, pt) << '\n';
  }
}

}  // namespace hartogs
