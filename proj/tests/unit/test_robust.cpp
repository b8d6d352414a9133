#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gravipose/bench.hpp"
#include "gravipose/error.hpp"
#include "gravipose/robust.hpp"
#include "gravipose/scene.hpp"
#include "test_support.hpp"

using namespace gravipose;

namespace {

double recall(const Scene& s, const std::vector<bool>& mask) {
  int truth = 0, hit = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!s.inlier[i]) continue;
    ++truth;
    hit += mask[i];
  }
  return static_cast<double>(hit) / truth;
}

SceneConfig outlier_config() {
  SceneConfig cfg;
  cfg.n_corrs = 100;
  cfg.outlier_frac = 0.3;
  cfg.sigma_px = 1.0;
  return cfg;
}

}  // namespace

TEST(Essential, IdentityIsCrossMatrix) {
  EXPECT_LE((essential_from_pose(0.0, Vec3::UnitX(), Mat3::Identity(), Mat3::Identity()) - skew(Vec3::UnitX())).norm(),
            1e-15);
}

TEST(Essential, NoiselessResidualAndManifold) {
  SceneConfig cfg;
  cfg.sigma_px = 0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    const Scene s = generate_scene(cfg, t);
    const Mat3 a = essential_from_pose(std::tan(s.truth.theta / 2), s.truth.R2 * s.truth.t_rel.normalized(),
                                       s.truth.R1, s.truth.R2);
    Eigen::JacobiSVD<Mat3> svd(a);
    const Vec3 sv = svd.singularValues();
    EXPECT_LE(std::abs(sv(0) - sv(1)), 1e-9 * sv(0));
    EXPECT_LE(sv(2), 1e-9 * sv(0));
    for (const auto& c : s.corrs) EXPECT_LE(std::abs(c.m_prime.dot(a * c.m)), 1e-10);
    RelativePose p;
    p.R_rel = s.truth.R_rel;
    p.t_rel = s.truth.t_rel.normalized();
    EXPECT_LE((essential_from_pose(p) - a).norm(), 1e-10);
  }
}

TEST(Sampson, NoiselessInlier) {
  SceneConfig cfg;
  cfg.sigma_px = 0;
  const Scene s = generate_scene(cfg, 0);
  RelativePose p;
  p.R_rel = s.truth.R_rel;
  p.t_rel = s.truth.t_rel.normalized();
  const Mat3 E = essential_from_pose(p);
  for (const auto& c : s.corrs) EXPECT_LE(sampson_error(E, c), 1e-18);
}

TEST(Sampson, MatchesIteratedGeometricError) {
  // Move m' off its epipolar line by d. The minimal squared image-plane
  // correction of both points that restores m'^T E m = 0 is found by iterating
  // linearised corrections to convergence; Sampson is its first-order value.
  SceneConfig cfg;
  cfg.sigma_px = 0;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1e-4, 1e-3);
  int checked = 0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    const Scene s = generate_scene(cfg, t);
    RelativePose p;
    p.R_rel = s.truth.R_rel;
    p.t_rel = s.truth.t_rel.normalized();
    const Mat3 E = essential_from_pose(p);
    for (const auto& c : s.corrs) {
      const Vec3 line = E * c.m;
      const double d = u(rng);
      Correspondence moved = c;
      moved.m_prime += d * Vec3(line.x(), line.y(), 0.0).normalized();
      Eigen::Vector4d x0(moved.m.x(), moved.m.y(), moved.m_prime.x(), moved.m_prime.y()), x = x0;
      for (int it = 0; it < 20; ++it) {
        const Vec3 a(x(0), x(1), 1), b(x(2), x(3), 1);
        const Vec3 ga = E.transpose() * b, gb = E * a;
        const Eigen::Vector4d J(ga.x(), ga.y(), gb.x(), gb.y());
        const double f = b.dot(E * a);
        x = x0 - J * (f + J.dot(x0 - x)) / J.squaredNorm();
      }
      const double gold = (x - x0).squaredNorm();
      EXPECT_NEAR(sampson_error(E, moved), gold, 0.1 * gold);
      EXPECT_LE(gold, d * d * (1 + 1e-9));
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(Sampson, GrossOutliersExceedThreshold) {
  SceneConfig cfg;
  cfg.sigma_px = 0;
  const Scene s = generate_scene(cfg, 1);
  RelativePose p;
  p.R_rel = s.truth.R_rel;
  p.t_rel = s.truth.t_rel.normalized();
  const Mat3 E = essential_from_pose(p);
  const double thr = RansacConfig{}.threshold;
  std::mt19937_64 rng(5);
  const double half = std::tan(deg_to_rad(cfg.fov_deg / 2));
  std::uniform_real_distribution<double> u(-half, half);
  const int n = 20000;
  int above = 0;
  for (int i = 0; i < n; ++i) {
    const auto c = Correspondence::from_uv(u(rng), u(rng), u(rng), u(rng));
    above += sampson_error(E, c) >= thr * thr;
  }
  EXPECT_GT(static_cast<double>(above) / n, 0.99);
}

TEST(Sampson, DegenerateGradientIsInfinite) {
  const Mat3 Z = Mat3::Zero();
  EXPECT_TRUE(std::isinf(sampson_error(Z, Correspondence::from_uv(0.1, 0.2, 0.3, 0.4))));
}

TEST(Ransac, CleanSceneAllInliers) {
  SceneConfig cfg;
  cfg.sigma_px = 0;
  cfg.n_corrs = 50;
  for (std::uint64_t t = 0; t < 10; ++t) {
    const Scene s = generate_scene(cfg, t);
    const RobustResult r = lo_ransac(s.corrs, s.g1, s.g2, {});
    EXPECT_TRUE(std::all_of(r.inlier_mask.begin(), r.inlier_mask.end(), [](bool b) { return b; }));
    EXPECT_LE(rotation_error(r.pose.R_rel, s.truth.R_rel), 1e-6);
    EXPECT_LE(translation_error(r.pose.t_rel, s.truth.t_rel), 1e-6);
  }
}

TEST(Ransac, ThirtyPercentOutliers) {
  const SceneConfig cfg = outlier_config();
  RansacConfig rc;
  rc.threshold = 3e-3;
  std::vector<double> rot, rec;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const Scene s = generate_scene(cfg, t);
    rc.seed = t;
    const RobustResult r = lo_ransac(s.corrs, s.g1, s.g2, rc);
    rot.push_back(rotation_error(r.pose.R_rel, s.truth.R_rel));
    rec.push_back(recall(s, r.inlier_mask));
  }
  EXPECT_LE(median(rot), 0.5);
  EXPECT_GE(median(rec), 0.95);
}

TEST(Ransac, OptAndLinNearTieOnSmallRotations) {
  SceneConfig cfg = outlier_config();
  cfg.rot_deg = 5;
  RansacConfig rc;
  rc.threshold = 3e-3;
  std::vector<double> eo, el;
  for (std::uint64_t t = 0; t < 60; ++t) {
    const Scene s = generate_scene(cfg, t);
    rc.seed = t;
    rc.lo_method = Method::OptPep;
    eo.push_back(rotation_error(lo_ransac(s.corrs, s.g1, s.g2, rc).pose.R_rel, s.truth.R_rel));
    rc.lo_method = Method::LinPep;
    el.push_back(rotation_error(lo_ransac(s.corrs, s.g1, s.g2, rc).pose.R_rel, s.truth.R_rel));
  }
  const double mo = median(eo), ml = median(el);
  EXPECT_LE(std::abs(mo - ml), 0.2 * std::max(mo, ml));
}

TEST(Ransac, MaskMatchesRescoring) {
  const SceneConfig cfg = outlier_config();
  RansacConfig rc;
  rc.threshold = 3e-3;
  for (std::uint64_t t = 0; t < 20; ++t) {
    const Scene s = generate_scene(cfg, t);
    const RobustResult r = lo_ransac(s.corrs, s.g1, s.g2, rc);
    const Mat3 E = essential_from_pose(r.pose);
    int count = 0;
    for (std::size_t i = 0; i < s.corrs.size(); ++i) {
      const bool in = sampson_error(E, s.corrs[i]) < rc.threshold * rc.threshold;
      EXPECT_EQ(in, r.inlier_mask[i]) << "trial " << t << " index " << i;
      count += in;
    }
    EXPECT_GE(count, 3);
    EXPECT_LE(r.lo_rounds, 10 * r.iterations + 1);
  }
}

TEST(Ransac, Deterministic) {
  const Scene s = generate_scene(outlier_config(), 4);
  RansacConfig rc;
  rc.seed = 11;
  const RobustResult a = lo_ransac(s.corrs, s.g1, s.g2, rc), b = lo_ransac(s.corrs, s.g1, s.g2, rc);
  EXPECT_EQ(a.inlier_mask, b.inlier_mask);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.lo_rounds, b.lo_rounds);
  EXPECT_EQ(a.pose.R_rel, b.pose.R_rel);
  EXPECT_EQ(a.pose.t_rel, b.pose.t_rel);
}

TEST(Ransac, NoModelOnPureNoise) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Correspondence> c;
  for (int i = 0; i < 40; ++i) c.push_back(Correspondence::from_uv(u(rng), u(rng), u(rng), u(rng)));
  RansacConfig rc;
  rc.threshold = 1e-7;
  rc.max_iters = 200;
  EXPECT_THROW(lo_ransac(c, {Vec3::UnitY()}, {Vec3::UnitY()}, rc), NoModel);
}

TEST(Ransac, InputChecks) {
  const Scene s = generate_scene(outlier_config(), 0);
  const std::vector<Correspondence> three(s.corrs.begin(), s.corrs.begin() + 3);
  EXPECT_THROW(lo_ransac(three, s.g1, s.g2, {}), DegenerateInput);
  RansacConfig rc;
  rc.threshold = 0;
  EXPECT_THROW(lo_ransac(s.corrs, s.g1, s.g2, rc), InputError);
  rc = {};
  rc.confidence = 1.0;
  EXPECT_THROW(lo_ransac(s.corrs, s.g1, s.g2, rc), InputError);
  rc = {};
  rc.lo_method = Method::EightPoint;
  EXPECT_THROW(lo_ransac(s.corrs, s.g1, s.g2, rc), InputError);
}

TEST(Ransac, RequiredIterations) {
  EXPECT_EQ(ransac_required_iterations(1.0, 0.999, 10000), 1);
  EXPECT_EQ(ransac_required_iterations(0.0, 0.999, 10000), 10000);
  // log(0.001) / log(1 - 0.343) = 16.4
  EXPECT_EQ(ransac_required_iterations(0.7, 0.999, 10000), 17);
}
