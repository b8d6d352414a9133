#include "gravipose/polymat.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gravipose/error.hpp"
#include "gravipose/linalg.hpp"

namespace gravipose {

int PolyMat::max_degree() const {
  int d = -1;
  for (const Poly& p : e_) d = std::max(d, p.degree());
  return d;
}

MatX PolyMat::eval(double y) const {
  MatX out(rows_, cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) out(r, c) = (*this)(r, c).eval(y);
  }
  return out;
}

std::vector<MatX> PolyMat::coefficient_matrices() const {
  const int d = max_degree();
  std::vector<MatX> out(static_cast<std::size_t>(std::max(d + 1, 0)), MatX::Zero(rows_, cols_));
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      const Poly& p = (*this)(r, c);
      const int pd = p.degree();
      for (int k = 0; k <= pd; ++k) out[k](r, c) = p[k];
    }
  }
  return out;
}

namespace {

constexpr int kMaxDetSize = 5;

struct Minor {
  std::array<int, kMaxDetSize> rows{};
  std::array<int, kMaxDetSize> cols{};
  int n = 0;
};

Minor drop(const Minor& m, int row_pos, int col_pos) {
  Minor out;
  out.n = m.n - 1;
  for (int i = 0, k = 0; i < m.n; ++i) {
    if (i != row_pos) out.rows[k++] = m.rows[i];
  }
  for (int j = 0, k = 0; j < m.n; ++j) {
    if (j != col_pos) out.cols[k++] = m.cols[j];
  }
  return out;
}

Poly laplace(const PolyMat& a, const Minor& m) {
  auto at = [&](int i, int j) -> const Poly& { return a(m.rows[i], m.cols[j]); };
  if (m.n == 1) return at(0, 0);
  if (m.n == 2) return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);

  // Pick the sparsest row or column.
  int best_line = 0;
  bool best_is_row = true;
  int best_zeros = -1;
  for (int i = 0; i < m.n; ++i) {
    int zr = 0, zc = 0;
    for (int j = 0; j < m.n; ++j) {
      zr += at(i, j).is_zero();
      zc += at(j, i).is_zero();
    }
    if (zr > best_zeros) {
      best_zeros = zr;
      best_line = i;
      best_is_row = true;
    }
    if (zc > best_zeros) {
      best_zeros = zc;
      best_line = i;
      best_is_row = false;
    }
  }

  Poly det;
  for (int k = 0; k < m.n; ++k) {
    const int i = best_is_row ? best_line : k;
    const int j = best_is_row ? k : best_line;
    const Poly& entry = at(i, j);
    if (entry.is_zero()) continue;
    Poly term = entry * laplace(a, drop(m, i, j));
    if ((i + j) % 2) {
      det -= term;
    } else {
      det += term;
    }
  }
  return det;
}

}  // namespace

Poly polymat_det(const PolyMat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("polymat_det: matrix must be square");
  if (m.rows() == 0) return Poly{1.0};
  if (m.rows() > kMaxDetSize) throw std::invalid_argument("polymat_det: size above 5 not supported");
  Minor full;
  full.n = m.rows();
  for (int i = 0; i < full.n; ++i) full.rows[i] = full.cols[i] = i;
  return laplace(m, full);
}

namespace {

double condition_number(const MatX& m) {
  Eigen::JacobiSVD<MatX> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

// Fixed shift sequence so results stay reproducible.
constexpr std::array<double, 6> kShifts = {0.0, 0.1234, -0.2718, 0.3927, -0.5772, 0.7071};

PolyMat shifted(const PolyMat& m, double s) {
  PolyMat out(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) out(r, c) = poly_shift(m(r, c).trimmed(), s);
  }
  return out;
}

}  // namespace

PepRoots pep_real_roots(const PolyMat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("pep_real_roots: matrix must be square");
  const int n = m.rows();

  PepRoots out;
  PolyMat work;
  std::vector<MatX> coeffs;
  for (double s : kShifts) {
    work = s == 0.0 ? m : shifted(m, s);
    coeffs = work.coefficient_matrices();
    if (coeffs.empty()) throw DegenerateInput("pep_real_roots: zero polynomial matrix");
    if (condition_number(coeffs[0]) <= kPepMaxCondition) {
      out.shift = s;
      break;
    }
    out.shift = std::numeric_limits<double>::quiet_NaN();
  }
  if (std::isnan(out.shift)) throw NumericalFailure("pep_real_roots: constant coefficient matrix singular under all shifts");

  const int d = static_cast<int>(coeffs.size()) - 1;
  out.full_size = n * d;
  if (d == 0) return out;

  const int size = n * d;
  MatX big = MatX::Zero(size, size);
  for (int b = 0; b + 1 < d; ++b) big.block(b * n, (b + 1) * n, n, n).setIdentity();
  Eigen::PartialPivLU<MatX> lu(coeffs[0]);
  for (int j = 0; j < d; ++j) {
    big.block((d - 1) * n, j * n, n, n) = -lu.solve(coeffs[d - j]);
  }

  // Strip identically zero columns together with their rows.
  std::vector<char> active(static_cast<std::size_t>(size), 1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int c = 0; c < size; ++c) {
      if (!active[c]) continue;
      bool zero = true;
      for (int r = 0; r < size && zero; ++r) zero = !active[r] || big(r, c) == 0.0;
      if (zero) {
        active[c] = 0;
        changed = true;
      }
    }
  }
  std::vector<int> keep;
  for (int i = 0; i < size; ++i) {
    if (active[i]) keep.push_back(i);
  }
  out.reduced_size = static_cast<int>(keep.size());
  MatX reduced(out.reduced_size, out.reduced_size);
  for (int i = 0; i < out.reduced_size; ++i) {
    for (int j = 0; j < out.reduced_size; ++j) reduced(i, j) = big(keep[i], keep[j]);
  }

  const auto eig = eigenvalues(reduced);
  double scale = 0.0;
  for (const auto& z : eig) scale = std::max(scale, std::abs(z));
  const double real_tol = kRealEigenImagTol * std::max(scale, std::numeric_limits<double>::min());
  for (const auto& z : eig) {
    if (std::abs(z) <= kPepZeroEigenvalue) continue;
    const double im = std::abs(z.imag());
    if (im <= real_tol) {
      out.roots.push_back(1.0 / z.real() + out.shift);
    } else if (z.imag() > 0.0 && im <= kPepNearRealTol * std::abs(z)) {
      out.near_real.push_back((1.0 / z).real() + out.shift);
    }
  }
  std::sort(out.roots.begin(), out.roots.end());
  std::sort(out.near_real.begin(), out.near_real.end());
  return out;
}

}  // namespace gravipose
