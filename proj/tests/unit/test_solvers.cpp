#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gravipose/error.hpp"
#include "gravipose/linalg.hpp"
#include "gravipose/oracle.hpp"
#include "gravipose/robust.hpp"
#include "gravipose/scene.hpp"
#include "gravipose/solver_core.hpp"
#include "gravipose/solvers.hpp"
#include "test_support.hpp"

using namespace gravipose;

namespace {

double angle_between(const Vec3& a, const Vec3& b) { return std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0)); }

void check_report_invariants(const SolverReport& r, std::span<const AlignedPair> pairs) {
  EXPECT_LE((r.best.R_rel.transpose() * r.best.R_rel - Mat3::Identity()).norm(), 1e-9);
  EXPECT_NEAR(r.best.R_rel.determinant(), 1.0, 1e-9);
  EXPECT_NEAR(r.best.t_rel.norm(), 1.0, 1e-12);
  EXPECT_NEAR(r.best.t_aligned.norm(), 1.0, 1e-12);
  if (std::abs(r.best.theta) < 3.1) EXPECT_NEAR(r.best.y, std::tan(r.best.theta / 2), 1e-12 * (1 + std::abs(r.best.y)));
  const auto q = normalize_pairs(pairs);
  for (const auto& c : r.candidates) {
    EXPECT_NEAR(c.t_aligned.norm(), 1.0, 1e-12);
    EXPECT_GE(c.alpha_min, -1e-9 * evaluate_c(q, c.y).trace());
  }
}

struct PathCase {
  RootMethod method;
  const char* name;
};

class OptPaths : public ::testing::TestWithParam<PathCase> {};

}  // namespace

TEST_P(OptPaths, NoiselessRecovery) {
  const auto pr = test::make_aligned(20, deg_to_rad(12), 0.0, 1);
  const SolverReport r = solve_opt(pr.pairs, GetParam().method);
  EXPECT_NEAR(r.best.theta, pr.theta, 1e-8);
  EXPECT_LE(angle_between(r.best.t_aligned, pr.t), 1e-7);
  EXPECT_LE(r.best.score, 1e-14 * evaluate_c(normalize_pairs(pr.pairs), r.best.y).trace());
  EXPECT_EQ(r.positive_depths, 20);
  check_report_invariants(r, pr.pairs);
}

TEST_P(OptPaths, PureSidewaysTranslation) {
  const auto pr = test::make_aligned(20, 0.0, 0.0, 2, Vec3::UnitX());
  EXPECT_LE(std::abs(solve_opt(pr.pairs, GetParam().method).best.theta), 1e-8);
}

TEST_P(OptPaths, GlobalOptimumAgainstGrid) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto pr = test::make_aligned(20, 0.5 * std::sin(seed * 1.3), 1e-3, 100 + seed);
    const SolverReport r = solve_opt(pr.pairs, GetParam().method);
    const OracleResult o = grid_search_theta(pr.pairs, 100000);
    EXPECT_LE(r.best.score, o.alpha_star + 1e-9 * o.trace) << "seed " << seed;
    EXPECT_LE(o.alpha_star, r.best.score + 1e-9 * o.trace) << "seed " << seed;
    check_report_invariants(r, pr.pairs);
  }
}

TEST_P(OptPaths, CandidateCountBound) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto pr = test::make_aligned(4 + seed, 0.3, 2e-3, seed);
    const SolverReport r = solve_opt(pr.pairs, GetParam().method);
    int interior = 0;
    for (const auto& c : r.candidates) interior += !c.boundary;
    EXPECT_LE(interior, 28);
  }
}

TEST_P(OptPaths, RejectsTooFewPoints) {
  const auto pr = test::make_aligned(3, 0.3, 0.0, 5);
  EXPECT_THROW(solve_opt(pr.pairs, GetParam().method), DegenerateInput);
}

TEST_P(OptPaths, PureRotationIsDegenerate) {
  const auto pr = test::make_aligned(20, 0.3, 0.0, 6, Vec3::UnitZ(), 0.0);
  EXPECT_THROW(solve_opt(pr.pairs, GetParam().method), DegenerateInput);
}

INSTANTIATE_TEST_SUITE_P(Solvers, OptPaths,
                         ::testing::Values(PathCase{RootMethod::Pep, "pep"}, PathCase{RootMethod::Sturm, "sturm"}),
                         [](const auto& info) { return std::string(info.param.name); });

TEST(SolveOpt, PepCompanionSizeAndSturmDegree) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto pr = test::make_aligned(20, 0.3, 1e-3, seed);
    const SolverReport p = solve_opt(pr.pairs, RootMethod::Pep);
    EXPECT_EQ(p.companion_size, 34);
    const SolverReport s = solve_opt(pr.pairs, RootMethod::Sturm);
    EXPECT_EQ(s.poly_degree, 28);
  }
}

TEST(SolveOpt, PathsAgree) {
  int agree = 0;
  const int trials = 100;
  for (std::uint64_t seed = 0; seed < trials; ++seed) {
    const auto pr = test::make_aligned(20, 0.5 * std::cos(seed * 0.7), 1e-3, 500 + seed);
    const SolverReport p = solve_opt(pr.pairs, RootMethod::Pep);
    const SolverReport s = solve_opt(pr.pairs, RootMethod::Sturm);
    if (std::abs(p.best.y - s.best.y) <= 1e-6 && test::rel_err(p.best.score, s.best.score) <= 1e-8) ++agree;
  }
  EXPECT_GE(agree, trials - 1);
}

TEST(SolveOpt, StationaryAtOptimum) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto pr = test::make_aligned(20, 0.3, 1e-3, 900 + seed);
    const auto q = normalize_pairs(pr.pairs);
    const SolverReport r = solve_opt(pr.pairs);
    const auto e = sym3_eigen(evaluate_c(q, r.best.y));
    if (e.real_eigenvalues[1] - e.real_eigenvalues[0] <= 1e-6 * e.real_eigenvalues[2]) continue;
    const double h = 1e-5;
    const double fd = finite_diff_stationarity(q, r.best.y, h);
    const double a0 = e.real_eigenvalues[0];
    const double ap = sym3_eigen(evaluate_c(q, r.best.y + h)).real_eigenvalues[0];
    const double am = sym3_eigen(evaluate_c(q, r.best.y - h)).real_eigenvalues[0];
    const double curvature = std::abs(ap - 2 * a0 + am) / (h * h);
    EXPECT_LE(std::abs(fd), 1e-3 * std::max(curvature, 1e-12)) << "seed " << seed;
  }
}

TEST(SolveOpt, FrameEquivariance) {
  // Rotating both aligned frames about the vertical by phi leaves R_rel, t_rel unchanged.
  const auto pr = test::make_aligned(20, 0.4, 1e-3, 31);
  std::vector<Correspondence> raw;
  for (const auto& p : pr.pairs) raw.push_back({p.p, p.p_prime});
  const SolverReport base = solve_opt(pr.pairs);
  for (double phi : {0.3, -1.2, 2.5}) {
    const Mat3 Rp = test::ry(phi);
    const Alignment al{Rp, Rp};
    const SolverReport r = solve_opt(align_correspondences(raw, al), RootMethod::Pep, al);
    EXPECT_LE((r.best.R_rel - base.best.R_rel).norm(), 1e-9);
    EXPECT_LE((r.best.t_rel - base.best.t_rel).norm(), 1e-9);
  }
}

TEST(SolveOpt, LargeRotations) {
  // Orbit layout keeps the point cloud in view for rotations up to 150 degrees.
  SceneConfig cfg;
  cfg.layout = SceneLayout::Orbit;
  cfg.rot_deg = 150;
  cfg.sigma_px = 0;
  cfg.n_corrs = 30;
  for (std::uint64_t trial = 0; trial < 40; ++trial) {
    const Scene s = generate_scene(cfg, trial);
    const Alignment al{gravity_to_rotation(s.g1), gravity_to_rotation(s.g2)};
    const auto pairs = align_correspondences(s.corrs, al);
    for (RootMethod m : {RootMethod::Pep, RootMethod::Sturm}) {
      const SolverReport r = solve_opt(pairs, m, al);
      EXPECT_LE(rotation_error(s.truth.R_rel, r.best.R_rel), 1e-6) << "trial " << trial;
      EXPECT_LE(translation_error(s.truth.t_rel, r.best.t_rel), 1e-6) << "trial " << trial;
    }
  }
}

TEST(SolveLin, ZeroRotationExact) {
  for (RootMethod m : {RootMethod::Pep, RootMethod::Sturm}) {
    const auto pr = test::make_aligned(20, 0.0, 0.0, 3);
    EXPECT_LE(std::abs(solve_lin(pr.pairs, m).best.theta), 1e-10);
  }
}

TEST(SolveLin, SmallRotationCloseToOpt) {
  for (RootMethod m : {RootMethod::Pep, RootMethod::Sturm}) {
    const auto pr = test::make_aligned(20, deg_to_rad(2), 0.0, 4);
    const double lin = solve_lin(pr.pairs, m).best.theta;
    const double opt = solve_opt(pr.pairs, m).best.theta;
    EXPECT_NEAR(opt, pr.theta, 1e-9);
    EXPECT_NEAR(lin, pr.theta, 1e-4);
  }
}

TEST(SolveLin, StructuralSizes) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto pr = test::make_aligned(20, 0.05, 1e-3, seed);
    const SolverReport p = solve_lin(pr.pairs, RootMethod::Pep);
    EXPECT_EQ(p.companion_size, 21);
    const SolverReport s = solve_lin(pr.pairs, RootMethod::Sturm);
    EXPECT_EQ(s.poly_degree, 15);
    int interior = 0;
    for (const auto& c : s.candidates) interior += !c.boundary;
    EXPECT_LE(interior, 15);
    EXPECT_NEAR(s.best.theta, p.best.theta, 1e-6);
    check_report_invariants(s, pr.pairs);
  }
}

// Default scenes whose linearised determinant has a tight cluster of real
// roots, where a chain built around the origin loses its sign count.
TEST(SolveLin, ClusteredRootsPathsAgree) {
  SceneConfig cfg;
  cfg.seed = 404;
  for (std::uint64_t trial : {40u, 122u, 147u}) {
    const Scene s = generate_scene(cfg, trial);
    const Alignment al{gravity_to_rotation(s.g1), gravity_to_rotation(s.g2)};
    const auto pairs = align_correspondences(s.corrs, al);
    const SolverReport p = solve_lin(pairs, RootMethod::Pep);
    const SolverReport r = solve_lin(pairs, RootMethod::Sturm);
    EXPECT_NEAR(r.best.theta, p.best.theta, 1e-6) << "trial " << trial;
  }
}

TEST(SolvePlanar, NoiselessPlanarScene) {
  for (RootMethod m : {RootMethod::Pep, RootMethod::Sturm}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto pr = test::make_aligned(20, 0.3, 0.0, seed, Vec3(std::cos(seed), 0.0, std::sin(seed)));
      const SolverReport r = solve_planar(pr.pairs, m);
      EXPECT_NEAR(r.best.theta, pr.theta, 1e-7);
      EXPECT_LE(angle_between(r.best.t_aligned, pr.t), 1e-7);
      EXPECT_EQ(r.best.t_aligned.y(), 0.0);
      int interior = 0;
      for (const auto& c : r.candidates) interior += !c.boundary;
      EXPECT_LE(interior, 8);
      if (m == RootMethod::Pep) EXPECT_EQ(r.companion_size, 10);
      if (m == RootMethod::Sturm) EXPECT_EQ(r.poly_degree, 8);
    }
  }
}

TEST(SolvePlanar, NonPlanarSceneScoresWorse) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Vec3 t = Vec3(std::cos(seed), 0.0, std::sin(seed)).normalized() * std::sqrt(1 - 0.09) + Vec3(0, 0.3, 0);
    const auto pr = test::make_aligned(20, 0.3, 1e-4, seed, t);
    EXPECT_GT(solve_planar(pr.pairs).best.score, solve_opt(pr.pairs).best.score);
  }
}

TEST(Minimal3pc, TruthAmongCandidates) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto pr = test::make_aligned(3, 0.6 * std::sin(seed * 0.37), 0.0, seed);
    const SolverReport r = solve_minimal_3pc(pr.pairs);
    const double y = std::tan(pr.theta / 2);
    double best = 1e9;
    for (const auto& c : r.candidates) best = std::min(best, std::abs(c.y - y));
    EXPECT_LE(best, 1e-9) << "seed " << seed;
  }
}

TEST(Minimal3pc, CountAndResiduals) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<AlignedPair> p(3);
    for (auto& x : p) x = {test::random_unit(rng), test::random_unit(rng)};
    SolverReport r;
    try {
      r = solve_minimal_3pc(p);
    } catch (const DegenerateInput&) {
      continue;
    }
    ASSERT_LE(r.candidates.size(), 4u);
    if (trial % 50 != 0) continue;
    const PolyMat A = build_a_tilde(p);
    PolyMat sq(3, 3);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) sq(i, j) = A(i, j);
    }
    const Poly det = polymat_det(sq);
    for (const auto& c : r.candidates) {
      double scale = 0.0, yp = 1.0;
      for (std::size_t k = 0; k < det.size(); ++k, yp *= std::abs(c.y)) scale += std::abs(det[static_cast<int>(k)]) * yp;
      EXPECT_LE(std::abs(det.eval(c.y)), 1e-9 * scale);
      const MatX a = A.eval(c.y) / (1 + c.y * c.y);
      EXPECT_LE((a.transpose() * c.t_aligned).norm(), 1e-8);
    }
  }
}

TEST(Minimal3pc, DegenerateTriple) {
  const AlignedPair same{Vec3(0.1, 0.2, 1).normalized(), Vec3(0.15, 0.2, 1).normalized()};
  const std::vector<AlignedPair> p{same, same, same};
  EXPECT_THROW(solve_minimal_3pc(p), DegenerateInput);
  const auto pr = test::make_aligned(4, 0.1, 0.0, 1);
  EXPECT_THROW(solve_minimal_3pc(pr.pairs), DegenerateInput);
}

TEST(EightPoint, NoiselessAndEssentialIdentities) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto pr = test::make_aligned(20, 0.3, 0.0, seed);
    std::vector<Correspondence> c;
    for (const auto& p : pr.pairs) c.push_back({p.p, p.p_prime});
    const SolverReport r = solve_8pt(c);
    EXPECT_LE(rotation_error(test::ry(pr.theta), r.best.R_rel), 1e-6);
    EXPECT_LE(rad_to_deg(angle_between(pr.t, r.best.t_rel)), 1e-6);
    const Mat3 E = essential_from_pose(r.best);
    EXPECT_LE(std::abs(E.determinant()), 1e-9);
    const Mat3 ident = 2 * E * E.transpose() * E - (E * E.transpose()).trace() * E;
    EXPECT_LE(ident.norm(), 1e-9);
  }
}

TEST(EightPoint, RejectsFewPoints) {
  std::vector<Correspondence> c(7);
  EXPECT_THROW(solve_8pt(c), DegenerateInput);
}

TEST(Methods, NamesRoundTrip) {
  for (Method m : {Method::OptPep, Method::OptSturm, Method::LinPep, Method::LinSturm, Method::PlanarPep,
                   Method::PlanarSturm, Method::Minimal3pc, Method::EightPoint}) {
    EXPECT_EQ(parse_method(method_name(m)), m);
  }
  EXPECT_EQ(parse_method("opt-pep"), Method::OptPep);
  EXPECT_EQ(parse_method("8pc"), Method::EightPoint);
  EXPECT_THROW(parse_method("5pt"), InputError);
}
