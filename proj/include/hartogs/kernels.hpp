#pragma once

// Bergman and sub-Bergman kernels of H_{m/n}.
//
// With s = z1 conj(w1) and t = z2 conj(w2) every kernel here is a function of
// (s, t) alone. The orthonormal series sums e_a(z) conj(e_a(w)) / ||e_a||_2^2
// over an allowable index set; the closed forms sum each lattice line
// n a1 + m a2 = k geometrically. All exponents in the closed forms are
// integers, so no branch of a fractional power is ever chosen.

#include <iosfwd>
#include <random>
#include <vector>

#include "hartogs/lattice.hpp"
#include "hartogs/laurent.hpp"

namespace hartogs {

struct Point {
  Complex z1;
  Complex z2;
};

struct KernelPoint {
  Complex z1, z2, w1, w2;

  KernelPoint() = default;
  KernelPoint(Complex z1_, Complex z2_, Complex w1_, Complex w2_)
      : z1(z1_), z2(z2_), w1(w1_), w2(w2_) {}
  KernelPoint(Point z, Point w) : z1(z.z1), z2(z.z2), w1(w.z1), w2(w.z2) {}

  Complex s() const { return z1 * std::conj(w1); }
  Complex t() const { return z2 * std::conj(w2); }
  KernelPoint swapped() const { return {w1, w2, z1, z2}; }
};

// Throws InvalidArgument unless both z and w lie in H_{m/n}.
void require_interior(const HartogsTriangle& h, const KernelPoint& pt);

// B~^{p_k}: the kernel of the orthogonal projection onto the L^2 closure of
// A^p for p in [p_k, p_{k+1}). k = 1-m-n is the Bergman kernel, k = 0 the
// bounded class B~^inf.
class KernelSpec {
 public:
  KernelSpec(const HartogsTriangle& h, int k);

  static KernelSpec bergman(const HartogsTriangle& h) { return {h, 1 - h.m() - h.n()}; }
  static KernelSpec bounded(const HartogsTriangle& h) { return {h, 0}; }
  // Class of an exponent p >= 2.
  static KernelSpec for_exponent(const HartogsTriangle& h, const Exponent& p);

  const HartogsTriangle& domain() const { return h_; }
  int k() const { return k_; }
  bool contains(MultiIndex a) const { return a.a1 >= 0 && a.line(h_) >= k_; }

 private:
  HartogsTriangle h_;
  int k_;
};

struct SeriesValue {
  Complex value;
  int box;            // |a|_inf <= box
  double tail_bound;  // heuristic geometric tail estimate used to pick box
};

// Box size for which the geometric tail estimate drops below tol. Throws
// PointTooCloseToBoundary when that needs more than max_box.
int adaptive_box(const HartogsTriangle& h, const KernelPoint& pt, double tol = 1e-13,
                 int max_box = 4000);

// Partial sum over allowable a with |a|_inf <= box; box <= 0 picks it adaptively.
SeriesValue kernel_series(const KernelSpec& spec, const KernelPoint& pt, int box = 0);

// Sum over the single line n a1 + m a2 = k, a1 >= 0, truncated at terms
// below tol relative to the leading one.
Complex line_series(const HartogsTriangle& h, int k, const KernelPoint& pt, double tol = 1e-17);

// b^{p_k} for 1-m-n <= k <= -1: the line n a1 + m a2 = k in closed form.
Complex line_kernel_closed(const HartogsTriangle& h, int k, const KernelPoint& pt);

// B~^inf: the sum over {a1 >= 0, n a1 + m a2 >= 0} in closed form.
Complex binf_closed(const HartogsTriangle& h, const KernelPoint& pt);

// sum_{j=k}^{-1} b^{p_j} + B~^inf.
Complex sub_bergman_closed(const KernelSpec& spec, const KernelPoint& pt);

Complex bergman_kernel(const HartogsTriangle& h, const KernelPoint& pt);

// |K| |1-t|^2 |t^n - s^m|^2 / |t|^A with A = 2n + k/m.
double type_a_ratio(const KernelSpec& spec, const KernelPoint& pt);
// The same ratio for the single line kernel b^{p_k}.
double line_type_a_ratio(const HartogsTriangle& h, int k, const KernelPoint& pt);

// Uniform angles, |z2| uniform in (eps, 1-eps), |z1| = ((1-eps)|z2|)^{n/m} v
// with v uniform in [0, 1).
Point random_interior_point(const HartogsTriangle& h, double eps, std::mt19937_64& rng);

struct GramSpectrum {
  double min;
  double max;
};

// Extreme eigenvalues of the Hermitian matrix [K(z_i, z_j)].
GramSpectrum gram_spectrum(const KernelSpec& spec, const std::vector<Point>& pts);

// Rows z1re,z1im,z2re,z2im,w1re,w1im,w2re,w2im in; re,im,majorant_ratio out.
// A non-numeric first row is treated as a header.
void evaluate_batch(const KernelSpec& spec, std::istream& in, std::ostream& out);

}  // namespace hartogs
