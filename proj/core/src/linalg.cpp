#include "gravipose/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "gravipose/error.hpp"

namespace gravipose {

std::vector<std::complex<double>> eigenvalues(const MatX& m) {
  if (m.rows() == 0) return {};
  Eigen::EigenSolver<MatX> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NumericalFailure("real_eigenvalues: real Schur iteration did not converge");
  const auto& ev = es.eigenvalues();
  return std::vector<std::complex<double>>(ev.data(), ev.data() + ev.size());
}

EigenResult real_eigenvalues(const MatX& m) {
  EigenResult out;
  const auto ev = eigenvalues(m);
  double scale = 0.0;
  for (const auto& z : ev) scale = std::max(scale, std::abs(z));
  const double tol = kRealEigenImagTol * std::max(scale, std::numeric_limits<double>::min());
  for (const auto& z : ev) {
    if (std::abs(z.imag()) <= tol) out.real_eigenvalues.push_back(z.real());
  }
  std::sort(out.real_eigenvalues.begin(), out.real_eigenvalues.end());
  return out;
}

EigenResult sym3_eigen(const Mat3& c) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(c);
  EigenResult out;
  for (int i = 0; i < 3; ++i) {
    out.real_eigenvalues.push_back(es.eigenvalues()(i));
    out.eigenpairs.push_back({es.eigenvalues()(i), es.eigenvectors().col(i)});
  }
  return out;
}

double sym3_min_eigenvalue(const Mat3& c) {
  const double off = c(0, 1) * c(0, 1) + c(0, 2) * c(0, 2) + c(1, 2) * c(1, 2);
  const double q = c.trace() / 3.0;
  if (off == 0.0) return c.diagonal().minCoeff();
  const double d0 = c(0, 0) - q, d1 = c(1, 1) - q, d2 = c(2, 2) - q;
  const double p = std::sqrt((d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * off) / 6.0);
  const Mat3 b = (c - q * Mat3::Identity()) / p;
  const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  return q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
}

CharCubic characteristic_cubic(const Mat3& c) {
  CharCubic out;
  out.f1 = c.trace();
  out.f2 = c(0, 0) * c(1, 1) + c(0, 0) * c(2, 2) + c(1, 1) * c(2, 2) - c(0, 1) * c(1, 0) -
           c(0, 2) * c(2, 0) - c(1, 2) * c(2, 1);
  out.f3 = c.determinant();
  return out;
}

}  // namespace gravipose
