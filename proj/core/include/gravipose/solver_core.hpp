#pragma once

#include <array>
#include <utility>
#include <span>
#include <vector>

#include "gravipose/geometry.hpp"
#include "gravipose/poly.hpp"
#include "gravipose/polymat.hpp"
#include "gravipose/types.hpp"

namespace gravipose {

/// Symmetric 3x3 matrix of polynomials (upper triangle stored once).
class SymPolyMat3 {
 public:
  const Poly& operator()(int r, int c) const { return e_[index(r, c)]; }
  Poly& operator()(int r, int c) { return e_[index(r, c)]; }

  Mat3 eval(double x) const;
  /// Value, first and second derivative with respect to the argument.
  void eval3(double x, Mat3& value, Mat3& d1, Mat3& d2) const;

 private:
  static int index(int r, int c) {
    if (r > c) std::swap(r, c);
    return r == 0 ? c : (r == 1 ? 2 + c : 5);
  }
  std::array<Poly, 6> e_;
};

/// Numerators of the characteristic-cubic coefficients of C(y) and of their
/// derivatives, where C(y) = C~(y) / delta^2 and delta = 1 + y^2:
///
///   trace C = g1 / delta^2,  minors C = g2 / delta^3,  det C = g3 / delta^4,
///   d/dy of each = h1 / delta^3, h2 / delta^4, h3 / delta^5.
struct CSystem {
  Poly g1, g2, g3;
  Poly h1, h2, h3;
  int n_points = 0;
  /// All polynomials are in v with y = shift + scale * v; the h_i are then
  /// scaled by `scale` (dg/dv delta - power * scale * y * g).
  double shift = 0.0;
  double scale = 1.0;
  /// Relative remainders of the exact divisions by delta and delta^2.
  double g2_remainder = 0.0;
  double g3_remainder = 0.0;
};

/// 3xN matrix whose column i is [p'_i]_x (delta R_y) p_i; entries have
/// degree <= 2 in y and Ã(y) / delta(y) is A(y).
PolyMat build_a_tilde(std::span<const AlignedPair> pairs);

/// C~(y) = Ã Ã^T accumulated directly from the pairs (degree <= 4 entries).
/// Optionally expressed in v with y = shift + scale * v, which keeps the
/// coefficients well conditioned near y = shift.
SymPolyMat3 build_gram(std::span<const AlignedPair> pairs, double shift = 0.0, double scale = 1.0);

CSystem build_c_system(std::span<const AlignedPair> pairs, double shift = 0.0, double scale = 1.0);
/// `gram` must be expressed in the same variable v.
CSystem build_c_system(const SymPolyMat3& gram, int n_points, double shift = 0.0, double scale = 1.0);

/// The 5x5 hidden-variable matrix acting on [1, b, b^2, b^3, b^4] with
/// b = delta * alpha:
///
///   [-g3   g2  -g1  delta   0   ]
///   [ h3  -h2   h1    0     0   ]
///   [  0  -g3   g2   -g1  delta ]
///   [  0   h3  -h2    h1    0   ]
///   [  0    0   h3   -h2    h1  ]
PolyMat build_b_matrix(const CSystem& sys);

/// C = A A^T at y0 from the rational rotation directly.
Mat3 evaluate_c(std::span<const AlignedPair> pairs, double y0);

/// Rescales every p and p' to unit length. The epipolar constraint is
/// homogeneous in each ray, so this only reweights the least-squares cost.
std::vector<AlignedPair> normalize_pairs(std::span<const AlignedPair> pairs);

// First-order rotation model R ~ [1 0 th; 0 1 0; -th 0 1].

/// C(theta) for the first-order rotation; entries are quadratics in theta.
SymPolyMat3 build_gram_linear(std::span<const AlignedPair> pairs, double shift = 0.0, double scale = 1.0);

/// f1, f2, f3: characteristic-cubic coefficients of C(theta), degrees
/// {2, 4, 6}; df1, df2, df3 their derivatives, degrees {1, 3, 5}.
struct LinSystem {
  Poly f1, f2, f3;
  Poly df1, df2, df3;
  int n_points = 0;
};

LinSystem build_lin_system(const SymPolyMat3& gram_linear, int n_points);
LinSystem build_lin_system(std::span<const AlignedPair> pairs);

/// Same layout as build_b_matrix with delta replaced by 1, acting on
/// [1, a, a^2, a^3, a^4].
PolyMat build_lin_b_matrix(const LinSystem& sys);

Mat3 evaluate_c_linear(std::span<const AlignedPair> pairs, double theta);

// Planar motion (t_y = 0): the x/z block of C.

/// With C2 the x/z block of C(y): trace C2 = t1 / delta and
/// det C2 = t2 / delta^2 (deg t1 = 2, deg t2 = 4). In b = delta * alpha the
/// stationary-point system is
///   b^2 - t1 b + t2 = 0,   k1 b - k2 = 0,
/// with k1 = t1' delta - 2y t1 and k2 = t2' delta - 4y t2.
struct PlanarSystem {
  Poly t1, t2;
  Poly k1, k2;
  int n_points = 0;
  double shift = 0.0;
  double scale = 1.0;
};

PlanarSystem build_planar_system(const SymPolyMat3& gram, int n_points, double shift = 0.0,
                                 double scale = 1.0);

/// 3x3 hidden-variable matrix acting on [1, b, b^2]:
///   [ t2  -t1   1 ]
///   [-k2   k1   0 ]
///   [  0  -k2  k1 ]
PolyMat build_planar_b_matrix(const PlanarSystem& sys);

}  // namespace gravipose
