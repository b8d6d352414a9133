#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gravipose/geometry.hpp"
#include "gravipose/solvers.hpp"

namespace gravipose {

/// E = R'^T [t_aligned]_x R_y R, so that m'^T E m = 0 for exact matches.
Mat3 essential_from_pose(double y, const Vec3& t_aligned, const Mat3& R, const Mat3& R_prime);
/// E = [t_rel]_x R_rel.
Mat3 essential_from_pose(const RelativePose& pose);

/// First-order geometric error (squared, calibrated units). +inf when both
/// epipolar-line gradients vanish.
double sampson_error(const Mat3& E, const Correspondence& c);

struct RansacConfig {
  /// Inlier distance in calibrated units: a match is an inlier when
  /// sampson_error < threshold^2.
  double threshold = 1e-3;
  double confidence = 0.999;
  int max_iters = 10000;
  /// One of OptPep, OptSturm, LinPep, LinSturm.
  Method lo_method = Method::OptPep;
  std::uint64_t seed = 0;
};

struct RobustResult {
  RelativePose pose;
  std::vector<bool> inlier_mask;
  int iterations = 0;
  int lo_rounds = 0;
};

/// Number of samples needed to draw one all-inlier triple with probability
/// `confidence`, capped at max_iters.
int ransac_required_iterations(double inlier_ratio, double confidence, int max_iters);

/// LO-RANSAC over minimal three-point hypotheses with local optimisation by
/// cfg.lo_method on the inlier set. Throws NoModel when no hypothesis reaches
/// four inliers, DegenerateInput for fewer than four correspondences and
/// InputError for an unusable config.
RobustResult lo_ransac(std::span<const Correspondence> corrs, const GravityObservation& g1,
                       const GravityObservation& g2, const RansacConfig& cfg);

}  // namespace gravipose
