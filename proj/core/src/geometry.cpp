#include "gravipose/geometry.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gravipose {

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return s;
}

Mat3 gravity_to_rotation(const GravityObservation& obs) {
  const Vec3& g = obs.g;
  if (std::abs(g.norm() - 1.0) > 1e-9) throw std::invalid_argument("gravity_to_rotation: gravity must be a unit vector");
  const Vec3 ey = Vec3::UnitY();
  const Vec3 axis = g.cross(ey);
  const double s = axis.norm();
  const double c = g.dot(ey);
  if (s < 1e-15) {
    if (c > 0.0) return Mat3::Identity();
    return Eigen::AngleAxisd(std::numbers::pi, Vec3::UnitX()).toRotationMatrix();
  }
  return Eigen::AngleAxisd(std::atan2(s, c), axis / s).toRotationMatrix();
}

std::vector<AlignedPair> align_correspondences(std::span<const Correspondence> corrs,
                                               const Mat3& R, const Mat3& R_prime) {
  std::vector<AlignedPair> out;
  out.reserve(corrs.size());
  for (const auto& c : corrs) out.push_back({R * c.m, R_prime * c.m_prime});
  return out;
}

Mat3 cayley_rotation(double y) {
  const double d = 1.0 + y * y;
  Mat3 r;
  r << 1.0 - y * y, 0.0, 2.0 * y, 0.0, d, 0.0, -2.0 * y, 0.0, 1.0 - y * y;
  return r / d;
}

Mat3 rotation_about_y(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat3 r;
  r << c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c;
  return r;
}

RelativePose compose_pose(double y, const Vec3& t_aligned, const Mat3& R, const Mat3& R_prime) {
  RelativePose pose;
  pose.y = y;
  pose.theta = 2.0 * std::atan(y);
  pose.t_aligned = t_aligned.normalized();
  pose.R_rel = R_prime.transpose() * cayley_rotation(y) * R;
  pose.t_rel = R_prime.transpose() * pose.t_aligned;
  return pose;
}

CheiralityResult cheirality_resolve(std::span<const AlignedPair> pairs, double y, const Vec3& t) {
  const Mat3 Ry = cayley_rotation(y);
  CheiralityResult out;
  out.depths.reserve(pairs.size());
  for (const auto& pr : pairs) {
    // [-R_y p, p'] [lambda; lambda'] = t
    Eigen::Matrix<double, 3, 2> a;
    a.col(0) = -(Ry * pr.p);
    a.col(1) = pr.p_prime;
    const Mat2 ata = a.transpose() * a;
    const Vec2 atb = a.transpose() * t;
    Vec2 sol = Vec2::Zero();
    const double det = ata.determinant();
    if (std::abs(det) > 1e-300) sol = ata.inverse() * atb;
    out.depths.push_back({sol(0), sol(1)});
    if (sol(0) > 0.0 && sol(1) > 0.0) ++out.positive_count;
    if (sol(0) < 0.0 && sol(1) < 0.0) ++out.negative_count;
  }
  if (out.negative_count > out.positive_count) {
    out.t = -t;
    for (auto& d : out.depths) {
      d.lambda = -d.lambda;
      d.lambda_prime = -d.lambda_prime;
    }
    std::swap(out.positive_count, out.negative_count);
  } else {
    out.t = t;
  }
  return out;
}

double rad_to_deg(double r) { return r * 180.0 / std::numbers::pi; }
double deg_to_rad(double d) { return d * std::numbers::pi / 180.0; }

double rotation_error(const Mat3& R_g, const Mat3& R_e) {
  // Same angle as arccos((tr - 1) / 2) but without the loss of precision of
  // arccos near 1.
  const Mat3 d = R_g * R_e.transpose();
  const Vec3 w(d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1));
  const double c = std::clamp((d.trace() - 1.0) / 2.0, -1.0, 1.0);
  return rad_to_deg(std::atan2(0.5 * w.norm(), c));
}

double translation_error(const Vec3& t_g, const Vec3& t_e) {
  const Vec3 a = t_g.normalized(), b = t_e.normalized();
  return rad_to_deg(std::atan2(a.cross(b).norm(), a.dot(b)));
}

}  // namespace gravipose
