#include "gravipose/solver_core.hpp"

#include <cmath>

namespace gravipose {

Mat3 SymPolyMat3::eval(double x) const {
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    for (int c = r; c < 3; ++c) m(r, c) = m(c, r) = (*this)(r, c).eval(x);
  }
  return m;
}

void SymPolyMat3::eval3(double x, Mat3& value, Mat3& d1, Mat3& d2) const {
  for (int r = 0; r < 3; ++r) {
    for (int c = r; c < 3; ++c) {
      double v, a, b;
      (*this)(r, c).eval3(x, v, a, b);
      value(r, c) = value(c, r) = v;
      d1(r, c) = d1(c, r) = a;
      d2(r, c) = d2(c, r) = b;
    }
  }
}

namespace {

// Column i of Ã as coefficient vectors: a(y) = a0 + a1 y + a2 y^2.
struct ColumnCoeffs {
  Vec3 a0, a1, a2;
};

// With y = s + k v the column becomes
// (a0 + s a1 + s^2 a2) + k (a1 + 2 s a2) v + k^2 a2 v^2.
ColumnCoeffs cayley_column(const AlignedPair& pr, double s, double k) {
  const Vec3& p = pr.p;
  const Vec3& q = pr.p_prime;
  const Vec3 a0 = q.cross(p);
  const Vec3 a1 = q.cross(Vec3(2.0 * p.z(), 0.0, -2.0 * p.x()));
  const Vec3 a2 = q.cross(Vec3(-p.x(), p.y(), -p.z()));
  if (s == 0.0 && k == 1.0) return {a0, a1, a2};
  return {a0 + s * a1 + (s * s) * a2, k * (a1 + (2.0 * s) * a2), (k * k) * a2};
}

Poly derivative_identity(const Poly& g, int power, double shift, double scale) {
  // g' delta - power * y * g (times scale in the variable v); the leading
  // terms cancel by construction.
  Poly h = poly_derivative(g) * delta_poly(shift, scale) -
           Poly{power * scale * shift, power * scale * scale} * g;
  h.trim();
  return h;
}

}  // namespace

PolyMat build_a_tilde(std::span<const AlignedPair> pairs) {
  PolyMat a(3, static_cast<int>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const ColumnCoeffs col = cayley_column(pairs[i], 0.0, 1.0);
    for (int r = 0; r < 3; ++r) a(r, static_cast<int>(i)) = Poly{col.a0(r), col.a1(r), col.a2(r)};
  }
  return a;
}

SymPolyMat3 build_gram(std::span<const AlignedPair> pairs, double shift, double scale) {
  std::array<std::array<double, 5>, 6> acc{};
  for (const auto& pr : pairs) {
    const ColumnCoeffs a = cayley_column(pr, shift, scale);
    int k = 0;
    for (int r = 0; r < 3; ++r) {
      for (int c = r; c < 3; ++c, ++k) {
        auto& e = acc[k];
        e[0] += a.a0(r) * a.a0(c);
        e[1] += a.a0(r) * a.a1(c) + a.a1(r) * a.a0(c);
        e[2] += a.a0(r) * a.a2(c) + a.a1(r) * a.a1(c) + a.a2(r) * a.a0(c);
        e[3] += a.a1(r) * a.a2(c) + a.a2(r) * a.a1(c);
        e[4] += a.a2(r) * a.a2(c);
      }
    }
  }
  SymPolyMat3 g;
  int k = 0;
  for (int r = 0; r < 3; ++r) {
    for (int c = r; c < 3; ++c, ++k) g(r, c) = Poly(std::vector<double>(acc[k].begin(), acc[k].end()));
  }
  return g;
}

CSystem build_c_system(const SymPolyMat3& c, int n_points, double shift, double scale) {
  const Poly& c11 = c(0, 0);
  const Poly& c12 = c(0, 1);
  const Poly& c13 = c(0, 2);
  const Poly& c22 = c(1, 1);
  const Poly& c23 = c(1, 2);
  const Poly& c33 = c(2, 2);

  const Poly minors = c11 * c22 + c11 * c33 + c22 * c33 - c12 * c12 - c13 * c13 - c23 * c23;
  const Poly det = c11 * (c22 * c33 - c23 * c23) - c12 * (c12 * c33 - c23 * c13) +
                   c13 * (c12 * c23 - c22 * c13);

  const Poly delta = delta_poly(shift, scale);
  CSystem sys;
  sys.n_points = n_points;
  sys.shift = shift;
  sys.scale = scale;
  sys.g1 = (c11 + c22 + c33).trimmed();
  // Remainders are judged against the entry products, not the result,
  // which cancels to noise when C is rank deficient.
  const double s1 = sys.g1.max_abs();
  ExactQuotient q2 = poly_exact_divide(minors, delta, kExactDivideEps, s1 * s1);
  ExactQuotient q3 = poly_exact_divide(det, delta * delta, kExactDivideEps, s1 * s1 * s1);
  sys.g2 = q2.quotient.trimmed();
  sys.g3 = q3.quotient.trimmed();
  sys.g2_remainder = q2.remainder_ratio;
  sys.g3_remainder = q3.remainder_ratio;
  sys.h1 = derivative_identity(sys.g1, 4, shift, scale);
  sys.h2 = derivative_identity(sys.g2, 6, shift, scale);
  sys.h3 = derivative_identity(sys.g3, 8, shift, scale);
  return sys;
}

CSystem build_c_system(std::span<const AlignedPair> pairs, double shift, double scale) {
  return build_c_system(build_gram(pairs, shift, scale), static_cast<int>(pairs.size()), shift, scale);
}

PolyMat build_b_matrix(const CSystem& s) {
  const Poly delta = delta_poly(s.shift, s.scale);
  PolyMat b(5, 5);
  b(0, 0) = -s.g3; b(0, 1) = s.g2;  b(0, 2) = -s.g1; b(0, 3) = delta;
  b(1, 0) = s.h3;  b(1, 1) = -s.h2; b(1, 2) = s.h1;
  b(2, 1) = -s.g3; b(2, 2) = s.g2;  b(2, 3) = -s.g1; b(2, 4) = delta;
  b(3, 1) = s.h3;  b(3, 2) = -s.h2; b(3, 3) = s.h1;
  b(4, 2) = s.h3;  b(4, 3) = -s.h2; b(4, 4) = s.h1;
  return b;
}

Mat3 evaluate_c(std::span<const AlignedPair> pairs, double y0) {
  const Mat3 Ry = cayley_rotation(y0);
  Mat3 c = Mat3::Zero();
  for (const auto& pr : pairs) {
    const Vec3 a = pr.p_prime.cross(Ry * pr.p);
    c.noalias() += a * a.transpose();
  }
  return c;
}

std::vector<AlignedPair> normalize_pairs(std::span<const AlignedPair> pairs) {
  std::vector<AlignedPair> out;
  out.reserve(pairs.size());
  for (const auto& pr : pairs) out.push_back({pr.p.normalized(), pr.p_prime.normalized()});
  return out;
}

SymPolyMat3 build_gram_linear(std::span<const AlignedPair> pairs, double shift, double scale) {
  std::array<std::array<double, 3>, 6> acc{};
  for (const auto& pr : pairs) {
    const Vec3& p = pr.p;
    const Vec3 d = pr.p_prime.cross(Vec3(p.z(), 0.0, -p.x()));
    const Vec3 a0 = pr.p_prime.cross(p) + shift * d;
    const Vec3 a1 = scale * d;
    int k = 0;
    for (int r = 0; r < 3; ++r) {
      for (int c = r; c < 3; ++c, ++k) {
        acc[k][0] += a0(r) * a0(c);
        acc[k][1] += a0(r) * a1(c) + a1(r) * a0(c);
        acc[k][2] += a1(r) * a1(c);
      }
    }
  }
  SymPolyMat3 g;
  int k = 0;
  for (int r = 0; r < 3; ++r) {
    for (int c = r; c < 3; ++c, ++k) g(r, c) = Poly(std::vector<double>(acc[k].begin(), acc[k].end()));
  }
  return g;
}

LinSystem build_lin_system(const SymPolyMat3& c, int n_points) {
  const Poly& c11 = c(0, 0);
  const Poly& c12 = c(0, 1);
  const Poly& c13 = c(0, 2);
  const Poly& c22 = c(1, 1);
  const Poly& c23 = c(1, 2);
  const Poly& c33 = c(2, 2);
  LinSystem s;
  s.n_points = n_points;
  s.f1 = (c11 + c22 + c33).trimmed();
  s.f2 = (c11 * c22 + c11 * c33 + c22 * c33 - c12 * c12 - c13 * c13 - c23 * c23).trimmed();
  s.f3 = (c11 * (c22 * c33 - c23 * c23) - c12 * (c12 * c33 - c23 * c13) + c13 * (c12 * c23 - c22 * c13))
             .trimmed();
  s.df1 = poly_derivative(s.f1);
  s.df2 = poly_derivative(s.f2);
  s.df3 = poly_derivative(s.f3);
  return s;
}

LinSystem build_lin_system(std::span<const AlignedPair> pairs) {
  return build_lin_system(build_gram_linear(pairs), static_cast<int>(pairs.size()));
}

PolyMat build_lin_b_matrix(const LinSystem& s) {
  const Poly one{1.0};
  PolyMat b(5, 5);
  b(0, 0) = -s.f3;  b(0, 1) = s.f2;   b(0, 2) = -s.f1;  b(0, 3) = one;
  b(1, 0) = s.df3;  b(1, 1) = -s.df2; b(1, 2) = s.df1;
  b(2, 1) = -s.f3;  b(2, 2) = s.f2;   b(2, 3) = -s.f1;  b(2, 4) = one;
  b(3, 1) = s.df3;  b(3, 2) = -s.df2; b(3, 3) = s.df1;
  b(4, 2) = s.df3;  b(4, 3) = -s.df2; b(4, 4) = s.df1;
  return b;
}

Mat3 evaluate_c_linear(std::span<const AlignedPair> pairs, double theta) {
  Mat3 r = Mat3::Identity();
  r(0, 2) = theta;
  r(2, 0) = -theta;
  Mat3 c = Mat3::Zero();
  for (const auto& pr : pairs) {
    const Vec3 a = pr.p_prime.cross(r * pr.p);
    c.noalias() += a * a.transpose();
  }
  return c;
}

PlanarSystem build_planar_system(const SymPolyMat3& c, int n_points, double shift, double scale) {
  const Poly delta = delta_poly(shift, scale);
  PlanarSystem s;
  s.n_points = n_points;
  s.shift = shift;
  s.scale = scale;
  const Poly tr = c(0, 0) + c(2, 2);
  const double st = tr.max_abs();
  s.t1 = poly_exact_divide(tr, delta).quotient.trimmed();
  s.t2 = poly_exact_divide(c(0, 0) * c(2, 2) - c(0, 2) * c(0, 2), delta * delta, kExactDivideEps, st * st)
             .quotient.trimmed();
  s.k1 = derivative_identity(s.t1, 2, shift, scale);
  s.k2 = derivative_identity(s.t2, 4, shift, scale);
  return s;
}

PolyMat build_planar_b_matrix(const PlanarSystem& s) {
  PolyMat b(3, 3);
  b(0, 0) = s.t2;  b(0, 1) = -s.t1; b(0, 2) = Poly{1.0};
  b(1, 0) = -s.k2; b(1, 1) = s.k1;
  b(2, 1) = -s.k2; b(2, 2) = s.k1;
  return b;
}

}  // namespace gravipose
