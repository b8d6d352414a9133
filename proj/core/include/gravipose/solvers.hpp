#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gravipose/geometry.hpp"

namespace gravipose {

/// How the univariate stationary-point condition is solved.
enum class RootMethod { Sturm, Pep };

enum class Method {
  OptPep,
  OptSturm,
  LinPep,
  LinSturm,
  PlanarPep,
  PlanarSturm,
  Minimal3pc,
  EightPoint,
};

/// CLI-style name: opt, opt-sturm, lin, lin-sturm, planar, planar-sturm, 3pc, 8pt.
std::string_view method_name(Method m);
/// Inverse of method_name; also accepts opt-pep, lin-pep, planar-pep, 8pc.
/// Throws InputError on unknown names.
Method parse_method(std::string_view name);

struct PoseCandidate {
  /// tan(theta / 2).
  double y = 0.0;
  /// Rotation angle; for the first-order model this is the solved variable.
  double theta = 0.0;
  /// Smallest eigenvalue of C at the candidate (2x2 block for planar).
  double alpha_min = 0.0;
  /// Unit eigenvector of C for alpha_min (t_y = 0 for planar).
  Vec3 t_aligned = Vec3::UnitX();
  /// Guard candidate at the edge of the Cayley parameterisation.
  bool boundary = false;
  /// |y| > tan(89.5 deg): kept, but the Cayley parameterisation is poorly
  /// conditioned there.
  bool near_half_turn = false;
};

struct SolverReport {
  RelativePose best;
  std::vector<PoseCandidate> candidates;
  Method method = Method::OptPep;
  double time_us = 0.0;
  /// Degree of the univariate polynomial (Sturm paths and 3pc).
  int poly_degree = -1;
  /// Companion-matrix size after removing zero columns (PEP paths).
  int companion_size = 0;
  /// Points in front of both cameras for the reported pose.
  int positive_depths = 0;
  /// The eigenvalue path failed and the Sturm path was used instead.
  bool used_fallback = false;
  std::vector<std::string> warnings;
};

/// Candidates with |y| above this are flagged as near-180-degree rotations.
inline constexpr double kNearHalfTurnY = 114.58865012930961;  // tan(89.5 deg)

/// Globally optimal two-view pose with known vertical direction: minimises
/// the smallest eigenvalue of C(y) over every stationary point of the
/// system (cubic in alpha, its y-derivative), plus a guard candidate at
/// theta = pi - 1e-6. Pairs are rescaled to unit rays first, so the score is
/// the cost of the normalised problem.
///
/// Requires N >= 4. Throws DegenerateInput when C has rank < 2 at every
/// candidate. A NumericalFailure on the eigenvalue path triggers a retry on
/// the Sturm path (reported through used_fallback).
SolverReport solve_opt(std::span<const AlignedPair> pairs, RootMethod method = RootMethod::Pep,
                       const Alignment& alignment = {});

/// Same pipeline with the first-order rotation model; candidates are
/// angles theta and the reported rotation is the exact rotation by theta.
SolverReport solve_lin(std::span<const AlignedPair> pairs, RootMethod method = RootMethod::Pep,
                       const Alignment& alignment = {});

/// Planar motion (t_y = 0 in the aligned frame); N >= 3, up to 8 candidates.
SolverReport solve_planar(std::span<const AlignedPair> pairs, RootMethod method = RootMethod::Pep,
                          const Alignment& alignment = {});

/// Minimal solver for exactly three pairs: real roots of det Ã(y) / delta
/// (a quartic). Every candidate is returned; `best` is the candidate with
/// the most points in front of both cameras, then the smallest alpha.
/// Throws DegenerateInput when the three rays are linearly dependent.
SolverReport solve_minimal_3pc(std::span<const AlignedPair> pairs, const Alignment& alignment = {});

/// Fills a full pose for one candidate: cheirality-resolved translation
/// composed into the original frames.
RelativePose candidate_pose(std::span<const AlignedPair> pairs, const PoseCandidate& cand,
                            const Alignment& alignment);

/// Normalised eight-point baseline (Hartley normalisation, projection to the
/// essential manifold, four-fold decomposition by cheirality). Ignores
/// gravity; `alignment` only serves to express theta / t_aligned. N >= 8.
SolverReport solve_8pt(std::span<const Correspondence> corrs, const Alignment& alignment = {});

}  // namespace gravipose
