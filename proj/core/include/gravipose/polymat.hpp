#pragma once

#include <vector>

#include "gravipose/poly.hpp"
#include "gravipose/types.hpp"

namespace gravipose {

/// Row-major grid of polynomials in one variable.
class PolyMat {
 public:
  PolyMat() = default;
  PolyMat(int rows, int cols) : rows_(rows), cols_(cols), e_(static_cast<std::size_t>(rows * cols)) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Poly& operator()(int r, int c) { return e_[static_cast<std::size_t>(r * cols_ + c)]; }
  const Poly& operator()(int r, int c) const { return e_[static_cast<std::size_t>(r * cols_ + c)]; }

  /// Largest entry degree, -1 for the zero matrix.
  int max_degree() const;

  MatX eval(double y) const;

  /// Matrices M_k with M(y) = sum_k y^k M_k, k = 0..max_degree().
  /// Coefficients past an entry's degree() are exactly zero.
  std::vector<MatX> coefficient_matrices() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Poly> e_;
};

/// Determinant of a square polynomial matrix (size <= 5) by Laplace
/// expansion, always expanding along the line with the most zero entries.
Poly polymat_det(const PolyMat& m);

/// Real roots of det M(y) = 0 obtained from the polynomial eigenvalue
/// problem sum_k y^k M_k w = 0.
struct PepRoots {
  std::vector<double> roots;
  /// Real parts of eigenvalues that are real up to kPepNearRealTol but not
  /// up to kRealEigenImagTol. A double root of det M perturbed by rounding
  /// turns into such a pair; callers may use these as extra seeds.
  std::vector<double> near_real;
  /// n * d before removing structurally zero columns.
  int full_size = 0;
  /// Size of the companion matrix whose eigenvalues were computed.
  int reduced_size = 0;
  /// Argument shift applied when M_0 was ill-conditioned (0 when unused).
  double shift = 0.0;
};

inline constexpr double kPepZeroEigenvalue = 1e-10;
inline constexpr double kPepMaxCondition = 1e12;
inline constexpr double kPepNearRealTol = 1e-4;

/// Linearises the PEP in z = 1/y as a block companion matrix
///
///   [ 0  I  ...  0 ]
///   [ .  .  ...  I ]
///   [ -M0^-1 M_d  ...  -M0^-1 M_1 ]
///
/// acting on [w, z w, ..., z^(d-1) w]. Columns that are identically zero are
/// removed with their rows (repeatedly, since each removal can expose another
/// one); real eigenvalues z with |z| > kPepZeroEigenvalue give roots y = 1/z.
/// When cond(M0) > kPepMaxCondition the problem is re-solved in y - s for a
/// deterministic small shift s. Throws NumericalFailure if the eigenvalue
/// iteration fails.
PepRoots pep_real_roots(const PolyMat& m);

}  // namespace gravipose
