#include "gravipose/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gravipose/error.hpp"

namespace gravipose {

namespace {

// Independent RNG streams per trial so that sweeping one parameter (noise,
// gravity perturbation) leaves the other draws untouched.
enum Stream : std::uint64_t { kGeometry = 0, kNoise = 1, kGravity = 2, kOutliers = 3 };

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t trial, Stream s) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                    static_cast<std::uint32_t>(s)};
  return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    const Vec3 v(n(rng), n(rng), n(rng));
    if (v.norm() > 1e-6) return v.normalized();
  }
}

// Raw-to-aligned rotation for a camera with random roll and pitch. It is the
// minimal-angle alignment of the camera's own vertical, the same convention
// the solvers use, so truth.theta is exactly the angle they estimate.
Mat3 random_tilt(std::mt19937_64& rng, double tilt_deg) {
  const double t = deg_to_rad(tilt_deg);
  const double a = uniform(rng, -t, t);
  const double b = uniform(rng, -t, t);
  const Mat3 tilt = rotation_about_x(a) * rotation_about_z(b);
  return gravity_to_rotation({tilt.transpose() * Vec3::UnitY()});
}

bool visible(const Vec3& x, double half_tan, double min_depth) {
  return x.z() > min_depth && std::abs(x.x() / x.z()) <= half_tan && std::abs(x.y() / x.z()) <= half_tan;
}

}  // namespace

void SceneConfig::validate() const {
  if (n_world_points <= 0 || n_pose_pairs <= 0 || n_corrs <= 0) throw InputError("scene counts must be positive");
  if (n_corrs > n_world_points) throw InputError("n_corrs must not exceed n_world_points");
  if (!(focal_px > 0.0)) throw InputError("focal_px must be positive");
  if (!(sigma_px >= 0.0)) throw InputError("sigma_px must be non-negative");
  if (!(baseline_frac > 0.0)) throw InputError("baseline_frac must be positive");
  if (!(fov_deg > 10.0 && fov_deg < 170.0)) throw InputError("fov_deg must lie in (10, 170)");
  if (!(tau_deg >= 0.0)) throw InputError("tau_deg must be non-negative");
  if (!(rot_deg >= 0.0 && rot_deg <= 180.0)) throw InputError("rot_deg must lie in [0, 180]");
  if (!(tilt_deg >= 0.0 && tilt_deg < 90.0)) throw InputError("tilt_deg must lie in [0, 90)");
  if (!(depth_min > 0.0 && depth_max > depth_min)) throw InputError("depth range must satisfy 0 < depth_min < depth_max");
  if (!(outlier_frac >= 0.0 && outlier_frac <= 1.0)) throw InputError("outlier_frac must lie in [0, 1]");
}

MotionPreset parse_motion(std::string_view name) {
  if (name == "general") return MotionPreset::General;
  if (name == "forward") return MotionPreset::Forward;
  if (name == "planar") return MotionPreset::Planar;
  throw InputError("unknown motion preset '" + std::string(name) + "' (general, forward, planar)");
}

SceneLayout parse_layout(std::string_view name) {
  if (name == "free") return SceneLayout::Free;
  if (name == "orbit") return SceneLayout::Orbit;
  throw InputError("unknown scene layout '" + std::string(name) + "' (free, orbit)");
}

std::string_view motion_name(MotionPreset m) {
  switch (m) {
    case MotionPreset::General:
      return "general";
    case MotionPreset::Forward:
      return "forward";
    case MotionPreset::Planar:
      return "planar";
  }
  return "general";
}

std::string_view layout_name(SceneLayout l) { return l == SceneLayout::Orbit ? "orbit" : "free"; }

Mat3 rotation_about_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << 1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c;
  return r;
}

Mat3 rotation_about_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return r;
}

GravityObservation perturb_gravity(const GravityObservation& g, double tau_deg, std::mt19937_64& rng) {
  if (!(tau_deg > 0.0)) return g;
  const double t = deg_to_rad(tau_deg);
  const double a = uniform(rng, -t, t);
  const double b = uniform(rng, -t, t);
  return {(rotation_about_z(b) * rotation_about_x(a) * g.g).normalized()};
}

GravityObservation perturb_gravity(const GravityObservation& g, double tau_deg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return perturb_gravity(g, tau_deg, rng);
}

Scene generate_scene(const SceneConfig& cfg, std::uint64_t trial) {
  cfg.validate();
  std::mt19937_64 geo = stream(cfg.seed, trial, kGeometry);
  const double half_tan = std::tan(0.5 * deg_to_rad(cfg.fov_deg));
  const double near = 0.1 * cfg.depth_min;
  const double D = cfg.mean_depth();
  const int want = cfg.n_world_points;

  Scene scene;
  bool ok = false;
  for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
    SceneTruth truth;
    truth.theta = deg_to_rad(uniform(geo, -cfg.rot_deg, cfg.rot_deg));
    truth.R1 = random_tilt(geo, cfg.tilt_deg);
    truth.R2 = random_tilt(geo, cfg.tilt_deg);
    const Mat3 Ry = rotation_about_y(truth.theta);

    // Second camera centre o (first aligned frame); X2a = Ry (X1a - o).
    Vec3 o;
    Vec3 centre = Vec3::Zero();
    if (cfg.layout == SceneLayout::Orbit) {
      centre = Vec3(0.0, 0.0, D);
      const double h = uniform(geo, 0.05, 0.15) * D * (uniform(geo, 0.0, 1.0) < 0.5 ? -1.0 : 1.0);
      o = centre - D * (Ry.transpose() * Vec3::UnitZ()) + Vec3(0.0, h, 0.0);
    } else {
      const double d = cfg.baseline_frac * D;
      switch (cfg.motion) {
        case MotionPreset::General:
          o = d * random_unit(geo);
          break;
        case MotionPreset::Forward:
          o = d * (truth.R1 * Vec3::UnitZ());
          break;
        case MotionPreset::Planar: {
          const double phi = uniform(geo, -M_PI, M_PI);
          o = d * Vec3(std::cos(phi), 0.0, std::sin(phi));
          break;
        }
      }
    }
    const Vec3 t_aligned = -(Ry * o);
    truth.R_rel = truth.R2.transpose() * Ry * truth.R1;
    truth.t_rel = truth.R2.transpose() * t_aligned;

    std::vector<Vec3> pts;
    const int max_draws = 50 * want;
    for (int k = 0; k < max_draws && static_cast<int>(pts.size()) < want; ++k) {
      Vec3 x;
      if (cfg.layout == SceneLayout::Orbit) {
        Vec3 u;
        do u = Vec3(uniform(geo, -1.0, 1.0), uniform(geo, -1.0, 1.0), uniform(geo, -1.0, 1.0));
        while (u.squaredNorm() > 1.0);
        x = truth.R1.transpose() * (centre + 0.3 * D * u);
      } else {
        const double z = uniform(geo, cfg.depth_min, cfg.depth_max);
        x = Vec3(z * uniform(geo, -half_tan, half_tan), z * uniform(geo, -half_tan, half_tan), z);
      }
      if (!visible(x, half_tan, near)) continue;
      if (!visible(truth.R_rel * x + truth.t_rel, half_tan, near)) continue;
      pts.push_back(x);
    }
    if (static_cast<int>(pts.size()) < want) continue;
    scene.truth = truth;
    scene.points = std::move(pts);
    ok = true;
  }
  if (!ok) throw GenerationFailure("generate_scene: visibility could not be satisfied in 1000 attempts");

  const Vec3 g1 = scene.truth.R1.transpose() * Vec3::UnitY();
  const Vec3 g2 = scene.truth.R2.transpose() * Vec3::UnitY();
  std::mt19937_64 grav = stream(cfg.seed, trial, kGravity);
  scene.g1 = perturb_gravity({g1}, cfg.tau_deg, grav);
  scene.g2 = perturb_gravity({g2}, cfg.tau_deg, grav);

  std::mt19937_64 noise = stream(cfg.seed, trial, kNoise);
  std::normal_distribution<double> px(0.0, cfg.sigma_px > 0.0 ? cfg.sigma_px / cfg.focal_px : 1.0);
  auto jitter = [&](const Vec3& m) {
    if (!(cfg.sigma_px > 0.0)) return m;
    const double du = px(noise), dv = px(noise);
    return Vec3(m.x() + du, m.y() + dv, 1.0);
  };
  const int n = cfg.n_corrs;
  scene.corrs.reserve(n);
  scene.clean.reserve(n);
  for (int i = 0; i < n; ++i) {
    const Vec3& x = scene.points[i];
    const Vec3 x2 = scene.truth.R_rel * x + scene.truth.t_rel;
    const Correspondence c{x / x.z(), x2 / x2.z()};
    scene.clean.push_back(c);
    scene.corrs.push_back({jitter(c.m), jitter(c.m_prime)});
  }

  scene.inlier.assign(n, true);
  const int n_out = static_cast<int>(std::lround(cfg.outlier_frac * n));
  if (n_out > 0) {
    std::mt19937_64 orng = stream(cfg.seed, trial, kOutliers);
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), orng);
    for (int k = 0; k < n_out; ++k) {
      const int i = idx[k];
      scene.inlier[i] = false;
      scene.corrs[i].m_prime = Vec3(uniform(orng, -half_tan, half_tan), uniform(orng, -half_tan, half_tan), 1.0);
    }
  }
  return scene;
}

}  // namespace gravipose
