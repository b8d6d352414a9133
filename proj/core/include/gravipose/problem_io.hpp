#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gravipose/geometry.hpp"
#include "gravipose/solvers.hpp"

namespace gravipose {

struct Intrinsics {
  double focal = 1.0;
  Vec2 principal_point = Vec2::Zero();
};

struct GroundTruth {
  Mat3 R_rel = Mat3::Identity();
  /// Unit direction.
  Vec3 t_rel = Vec3::UnitX();
  /// Aligned-frame angle, consistent with the file's gravity vectors.
  std::optional<double> theta;
};

/// Text problem description:
///
///   # comment
///   focal = 1000                  (optional; absent means calibrated rows)
///   principal_point = 0 0         (optional)
///   gravity1 = gx gy gz
///   gravity2 = gx gy gz
///   truth_R = r00 r01 ... r22     (optional, row-major)
///   truth_t = tx ty tz            (optional)
///   truth_theta = radians         (optional)
///   [correspondences]
///   u,v,u_prime,v_prime[,inlier]
struct ProblemFile {
  std::vector<std::array<double, 4>> rows;
  /// Empty when the file has no inlier column.
  std::vector<bool> labels;
  std::optional<Intrinsics> intrinsics;
  GravityObservation gravity1, gravity2;
  std::optional<GroundTruth> truth;

  /// Rows in calibrated homogeneous form.
  std::vector<Correspondence> calibrated() const;
  /// Pixel distance to calibrated units (identity without intrinsics).
  double pixels_to_calibrated(double px) const;
};

inline constexpr double kGravityUnitTol = 1e-6;

/// Throws InputError (with the line number when applicable) for malformed
/// input, fewer than three correspondences or non-unit gravity.
ProblemFile read_problem(std::istream& in);
ProblemFile read_problem_file(const std::filesystem::path& path);
void write_problem(std::ostream& out, const ProblemFile& problem);

/// Solver output as key = value text with 17 significant digits, so that
/// reading it back reproduces every number exactly.
struct PoseReport {
  std::string command = "solve";
  std::string method = "opt";
  RelativePose pose;
  std::vector<PoseCandidate> candidates;
  double time_us = 0.0;
  int positive_depths = 0;
  int companion_size = 0;
  int poly_degree = -1;
  bool used_fallback = false;
  std::vector<std::string> warnings;
  /// Robust estimation only.
  std::optional<int> iterations;
  std::optional<int> lo_rounds;
  std::vector<bool> inlier_mask;
};

PoseReport make_pose_report(const SolverReport& rep);
void write_pose_report(std::ostream& out, const PoseReport& report);
PoseReport read_pose_report(std::istream& in);

}  // namespace gravipose
