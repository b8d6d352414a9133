#include <Eigen/SVD>
#include <chrono>
#include <cmath>

#include "gravipose/error.hpp"
#include "gravipose/solvers.hpp"

namespace gravipose {

namespace {

// Hartley normalisation: centroid to the origin, mean distance sqrt(2).
Mat3 hartley_transform(std::span<const Correspondence> corrs, bool second) {
  Vec2 c = Vec2::Zero();
  for (const auto& k : corrs) c += (second ? k.m_prime : k.m).head<2>();
  c /= static_cast<double>(corrs.size());
  double d = 0.0;
  for (const auto& k : corrs) d += ((second ? k.m_prime : k.m).head<2>() - c).norm();
  d /= static_cast<double>(corrs.size());
  const double s = d > 0.0 ? std::sqrt(2.0) / d : 1.0;
  Mat3 t;
  t << s, 0.0, -s * c.x(), 0.0, s, -s * c.y(), 0.0, 0.0, 1.0;
  return t;
}

int count_in_front(std::span<const Correspondence> corrs, const Mat3& R, const Vec3& t) {
  int n = 0;
  for (const auto& k : corrs) {
    Eigen::Matrix<double, 3, 2> a;
    a.col(0) = -(R * k.m);
    a.col(1) = k.m_prime;
    const Vec2 depth = (a.transpose() * a).ldlt().solve(a.transpose() * t);
    if (depth(0) > 0.0 && depth(1) > 0.0) ++n;
  }
  return n;
}

}  // namespace

SolverReport solve_8pt(std::span<const Correspondence> corrs, const Alignment& alignment) {
  const auto start = std::chrono::steady_clock::now();
  if (corrs.size() < 8) throw DegenerateInput("solve_8pt: needs at least 8 correspondences");
  SolverReport report;
  report.method = Method::EightPoint;

  const Mat3 T1 = hartley_transform(corrs, false);
  const Mat3 T2 = hartley_transform(corrs, true);
  MatX design(static_cast<Eigen::Index>(corrs.size()), 9);
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    const Vec3 x = T1 * corrs[i].m;
    const Vec3 xp = T2 * corrs[i].m_prime;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) design(static_cast<Eigen::Index>(i), 3 * r + c) = xp(r) * x(c);
    }
  }
  Eigen::JacobiSVD<MatX> dsvd(design, Eigen::ComputeFullV);
  const auto& sv = dsvd.singularValues();
  if (sv.size() < 9 || sv(7) <= 1e-12 * sv(0)) throw DegenerateInput("solve_8pt: rank-deficient design matrix");
  const VecX e = dsvd.matrixV().col(8);
  Mat3 En;
  En << e(0), e(1), e(2), e(3), e(4), e(5), e(6), e(7), e(8);
  Mat3 E = T2.transpose() * En * T1;

  Eigen::JacobiSVD<Mat3> svd(E, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 U = svd.matrixU();
  Mat3 V = svd.matrixV();
  if (U.determinant() < 0.0) U = -U;
  if (V.determinant() < 0.0) V = -V;
  E = U * Eigen::Vector3d(1.0, 1.0, 0.0).asDiagonal() * V.transpose();

  Mat3 W;
  W << 0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0;
  const Mat3 Rs[2] = {U * W * V.transpose(), U * W.transpose() * V.transpose()};
  const Vec3 tu = U.col(2);
  int best = -1;
  Mat3 R_best = Mat3::Identity();
  Vec3 t_best = tu;
  for (const Mat3& R : Rs) {
    for (double sgn : {1.0, -1.0}) {
      const int n = count_in_front(corrs, R, sgn * tu);
      if (n > best) {
        best = n;
        R_best = R;
        t_best = sgn * tu;
      }
    }
  }

  RelativePose& pose = report.best;
  pose.R_rel = R_best;
  pose.t_rel = t_best.normalized();
  const Mat3 Ra = alignment.R_prime * R_best * alignment.R.transpose();
  pose.theta = std::atan2(Ra(0, 2) - Ra(2, 0), Ra(0, 0) + Ra(2, 2));
  pose.y = std::tan(0.5 * pose.theta);
  pose.t_aligned = alignment.R_prime * pose.t_rel;
  pose.score = sv(8) * sv(8);
  report.positive_depths = best;

  PoseCandidate cand;
  cand.y = pose.y;
  cand.theta = pose.theta;
  cand.alpha_min = pose.score;
  cand.t_aligned = pose.t_aligned;
  report.candidates.push_back(cand);
  report.time_us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace gravipose
