#pragma once

#include <complex>
#include <vector>

#include "gravipose/types.hpp"

namespace gravipose {

struct EigenPair {
  double value = 0.0;
  Vec3 vector = Vec3::Zero();
};

/// Eigenvalues (ascending). `eigenpairs` is filled only by sym3_eigen.
struct EigenResult {
  std::vector<double> real_eigenvalues;
  std::vector<EigenPair> eigenpairs;
};

inline constexpr double kRealEigenImagTol = 1e-8;

/// Real eigenvalues of a dense square matrix (size <= 40) from its real Schur
/// form. An eigenvalue counts as real when |Im| <= kRealEigenImagTol times
/// the largest eigenvalue magnitude. Throws NumericalFailure if the QR
/// iteration does not converge.
EigenResult real_eigenvalues(const MatX& m);

/// All eigenvalues of a general square matrix (unsorted). Throws
/// NumericalFailure if the QR iteration does not converge.
std::vector<std::complex<double>> eigenvalues(const MatX& m);

/// Eigen-decomposition of a symmetric 3x3 matrix, eigenvalues ascending with
/// orthonormal eigenvectors.
EigenResult sym3_eigen(const Mat3& c);

/// Smallest eigenvalue of a symmetric 3x3 matrix via the closed-form
/// trigonometric solution of the characteristic cubic. Fast and accurate to
/// roughly 1e-15 * trace, suitable for dense scans.
double sym3_min_eigenvalue(const Mat3& c);

/// Characteristic-cubic coefficients of a 3x3 matrix: trace, sum of principal
/// 2x2 minors and determinant, so that eigenvalues solve
/// a^3 - f1 a^2 + f2 a - f3 = 0.
struct CharCubic {
  double f1 = 0.0;
  double f2 = 0.0;
  double f3 = 0.0;
};
CharCubic characteristic_cubic(const Mat3& c);

}  // namespace gravipose
