#pragma once

#include <iosfwd>

#include "gravipose/geometry.hpp"
#include "gravipose/problem_io.hpp"
#include "gravipose/scene.hpp"

namespace gravipose::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kDegenerate = 2,
  kNoModel = 3,
};

/// Entry point of the gravipose tool. argv[0] is the program name.
/// Never throws; library errors are mapped to exit codes and reported on err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Angle of R' R_rel R^T about the vertical, with R, R' the minimal
/// alignments of the observed gravity vectors.
double aligned_theta(const Mat3& R_rel, const GravityObservation& g1, const GravityObservation& g2);

/// Problem file for a generated scene, with truth and inlier labels. With
/// pixels = true the rows are in pixels (principal point at the origin).
ProblemFile scene_to_problem(const Scene& scene, const SceneConfig& cfg, bool pixels);

}  // namespace gravipose::cli
