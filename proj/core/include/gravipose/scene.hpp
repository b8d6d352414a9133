#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "gravipose/geometry.hpp"

namespace gravipose {

enum class MotionPreset {
  /// Translation direction uniform on the sphere.
  General,
  /// Translation along the first camera's optical axis.
  Forward,
  /// Translation in the horizontal plane (t_y = 0 in the aligned frame).
  Planar,
};

enum class SceneLayout {
  /// Points inside the first camera's frustum, theta uniform in +-rot_deg.
  Free,
  /// Point cloud around a fixed centre, second camera looking at it from an
  /// orbit position. Allows rotations up to 180 degrees with full overlap.
  Orbit,
};

struct SceneConfig {
  int n_world_points = 200;
  int n_pose_pairs = 200;
  double focal_px = 1000.0;
  double sigma_px = 1.0;
  /// Translation magnitude as a fraction of the mean scene depth.
  double baseline_frac = 0.05;
  int n_corrs = 20;
  double fov_deg = 90.0;
  /// Maximum roll / pitch perturbation of the observed gravity.
  double tau_deg = 0.0;
  std::uint64_t seed = 0;

  /// Rotation about the vertical, uniform in [-rot_deg, rot_deg].
  double rot_deg = 30.0;
  /// Raw roll and pitch of each camera, uniform in [-tilt_deg, tilt_deg].
  double tilt_deg = 15.0;
  double depth_min = 4.0;
  double depth_max = 8.0;
  /// Fraction of the returned correspondences replaced by random matches.
  double outlier_frac = 0.0;
  MotionPreset motion = MotionPreset::General;
  SceneLayout layout = SceneLayout::Free;

  /// Throws InputError when a field is out of range.
  void validate() const;
  double mean_depth() const { return 0.5 * (depth_min + depth_max); }
};

MotionPreset parse_motion(std::string_view name);
SceneLayout parse_layout(std::string_view name);
std::string_view motion_name(MotionPreset m);
std::string_view layout_name(SceneLayout l);

struct SceneTruth {
  /// lambda' m' = lambda R_rel m + t_rel with |t_rel| = baseline.
  Mat3 R_rel = Mat3::Identity();
  Vec3 t_rel = Vec3::UnitX();
  /// Rotation about the vertical between the true aligned frames.
  double theta = 0.0;
  /// Raw-to-aligned rotations of both cameras.
  Mat3 R1 = Mat3::Identity();
  Mat3 R2 = Mat3::Identity();
};

struct Scene {
  SceneTruth truth;
  /// Observed (possibly perturbed) gravity in each raw camera frame.
  GravityObservation g1, g2;
  /// Noisy calibrated correspondences, n_corrs of them.
  std::vector<Correspondence> corrs;
  /// Noise-free projections of the same points (outliers keep their clean
  /// projection here).
  std::vector<Correspondence> clean;
  /// false for correspondences replaced by outliers.
  std::vector<bool> inlier;
  /// 3D points in the first raw camera frame.
  std::vector<Vec3> points;
};

/// Deterministic in (cfg, trial): the RNG stream is seeded from
/// (cfg.seed, trial). Throws GenerationFailure if no pose with n_world_points
/// visible in both views is found in 1000 attempts.
Scene generate_scene(const SceneConfig& cfg, std::uint64_t trial = 0);

/// Rotates g by independent uniform roll and pitch angles in [-tau, tau]
/// degrees: g' = Rz(b) Rx(a) g, renormalised.
GravityObservation perturb_gravity(const GravityObservation& g, double tau_deg, std::mt19937_64& rng);
GravityObservation perturb_gravity(const GravityObservation& g, double tau_deg, std::uint64_t seed);

/// Rotation about the x (pitch) and z (roll) axes.
Mat3 rotation_about_x(double a);
Mat3 rotation_about_z(double a);

}  // namespace gravipose
