#pragma once

#include <span>

#include "gravipose/geometry.hpp"

namespace gravipose {

/// Brute-force minimiser of the smallest eigenvalue of C(theta).
struct OracleResult {
  double theta_star = 0.0;
  double alpha_star = 0.0;
  int grid_resolution = 0;
  bool refined = false;
  /// Exact objective at the best grid node (alpha_star never exceeds it).
  double best_grid_alpha = 0.0;
  /// trace C(theta_star), the scale for objective tolerances.
  double trace = 0.0;
  /// Largest jump between adjacent grid values and the Lipschitz bound it
  /// must respect; continuity_ok is false when the bound is violated.
  double max_jump = 0.0;
  double jump_bound = 0.0;
  bool continuity_ok = true;
};

inline constexpr double kOracleEdge = 1e-6;

/// Evaluates the objective on `grid_points` uniform nodes of
/// (-pi + 1e-6, pi - 1e-6), then golden-section refines the best cell to
/// width 1e-12. Pairs are rescaled to unit rays first, matching the solvers.
/// The grid uses trigonometric moment matrices, so its cost is independent of
/// N; refinement minimises the smallest singular value of A(theta).
/// Deterministic for any thread count, ties go to the smaller theta.
/// Throws std::invalid_argument for grid_points < 1000 or empty input.
OracleResult grid_search_theta(std::span<const AlignedPair> pairs, int grid_points = 100000);

/// Smallest eigenvalue of C(theta) on unit-normalised pairs, via an SVD of
/// the 3xN matrix A(theta).
double oracle_alpha(std::span<const AlignedPair> pairs, double theta);

/// Central difference (alpha(y0 + step) - alpha(y0 - step)) / (2 step) on
/// unit-normalised pairs, using evaluate_c and sym3_eigen.
double finite_diff_stationarity(std::span<const AlignedPair> pairs, double y0, double step);

}  // namespace gravipose
