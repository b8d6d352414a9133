#pragma once

#include <span>
#include <vector>

#include "gravipose/types.hpp"

namespace gravipose {

/// A 2D-2D match in calibrated homogeneous form [u, v, 1].
struct Correspondence {
  Vec3 m = Vec3::UnitZ();
  Vec3 m_prime = Vec3::UnitZ();

  static Correspondence from_uv(double u, double v, double u_prime, double v_prime) {
    return {Vec3(u, v, 1.0), Vec3(u_prime, v_prime, 1.0)};
  }
};

/// Unit gravity direction expressed in a camera frame.
struct GravityObservation {
  Vec3 g = Vec3::UnitY();
};

/// A correspondence after both rays were rotated into their gravity-aligned
/// frames: p = R m, p' = R' m'.
struct AlignedPair {
  Vec3 p = Vec3::UnitZ();
  Vec3 p_prime = Vec3::UnitZ();
};

/// Rotations taking each camera frame into its gravity-aligned frame.
struct Alignment {
  Mat3 R = Mat3::Identity();
  Mat3 R_prime = Mat3::Identity();
};

/// Relative pose. theta/y/t_aligned live in the aligned frames; R_rel/t_rel
/// act on the original camera frames so that lambda' m' = lambda R_rel m + t_rel.
struct RelativePose {
  double theta = 0.0;
  double y = 0.0;
  Vec3 t_aligned = Vec3::UnitX();
  Mat3 R_rel = Mat3::Identity();
  Vec3 t_rel = Vec3::UnitX();
  /// Smallest eigenvalue of C at the solution.
  double score = 0.0;
};

Mat3 skew(const Vec3& v);

/// Minimal-angle rotation with R g = e_y. For g = -e_y the rotation by pi
/// about the x-axis is returned. Throws std::invalid_argument when |g| is not
/// 1 within 1e-9.
Mat3 gravity_to_rotation(const GravityObservation& g);

std::vector<AlignedPair> align_correspondences(std::span<const Correspondence> corrs,
                                               const Mat3& R, const Mat3& R_prime);
inline std::vector<AlignedPair> align_correspondences(std::span<const Correspondence> corrs,
                                                      const Alignment& a) {
  return align_correspondences(corrs, a.R, a.R_prime);
}

/// Rotation about the vertical axis parameterised by y = tan(theta / 2).
Mat3 cayley_rotation(double y);

/// Rotation by theta about the y-axis.
Mat3 rotation_about_y(double theta);

/// Recompose (y, t_aligned) into the original camera frames:
/// R_rel = R'^T R_y R, t_rel = R'^T t_aligned.
RelativePose compose_pose(double y, const Vec3& t_aligned, const Mat3& R, const Mat3& R_prime);
inline RelativePose compose_pose(double y, const Vec3& t_aligned, const Alignment& a) {
  return compose_pose(y, t_aligned, a.R, a.R_prime);
}

struct Depths {
  double lambda = 0.0;
  double lambda_prime = 0.0;
};

struct CheiralityResult {
  Vec3 t = Vec3::UnitX();
  int positive_count = 0;
  int negative_count = 0;
  std::vector<Depths> depths;
};

/// Picks the sign of t that puts more points in front of both cameras. The
/// depths solve lambda' p' = lambda R_y p + s t in the least-squares sense;
/// ties go to s = +1.
CheiralityResult cheirality_resolve(std::span<const AlignedPair> pairs, double y, const Vec3& t);

/// arccos((tr(R_g R_e^T) - 1) / 2) in degrees.
double rotation_error(const Mat3& R_g, const Mat3& R_e);

/// Angle between translation directions in degrees. Not sign-invariant.
double translation_error(const Vec3& t_g, const Vec3& t_e);

double rad_to_deg(double r);
double deg_to_rad(double d);

}  // namespace gravipose
