#include "gravipose/oracle.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gravipose/linalg.hpp"
#include "gravipose/parallel.hpp"
#include "gravipose/solver_core.hpp"

namespace gravipose {

namespace {

// With R(theta) p = u + cos(theta) v + sin(theta) w, each column of A is
// a0 + c a1 + s a2 and C = M0 + c M1 + s M2 + c^2 M3 + s^2 M4 + c s M5.
struct TrigMoments {
  std::array<Mat3, 6> m;

  explicit TrigMoments(std::span<const AlignedPair> pairs) {
    for (auto& x : m) x.setZero();
    for (const auto& pr : pairs) {
      const Vec3& p = pr.p;
      const Vec3& q = pr.p_prime;
      const Vec3 a0 = q.cross(Vec3(0.0, p.y(), 0.0));
      const Vec3 a1 = q.cross(Vec3(p.x(), 0.0, p.z()));
      const Vec3 a2 = q.cross(Vec3(p.z(), 0.0, -p.x()));
      m[0] += a0 * a0.transpose();
      m[1] += a0 * a1.transpose() + a1 * a0.transpose();
      m[2] += a0 * a2.transpose() + a2 * a0.transpose();
      m[3] += a1 * a1.transpose();
      m[4] += a2 * a2.transpose();
      m[5] += a1 * a2.transpose() + a2 * a1.transpose();
    }
  }

  Mat3 eval(double theta) const {
    const double c = std::cos(theta), s = std::sin(theta);
    return m[0] + c * m[1] + s * m[2] + (c * c) * m[3] + (s * s) * m[4] + (c * s) * m[5];
  }
};

double sigma_min(std::span<const AlignedPair> pairs, double theta) {
  const Mat3 R = rotation_about_y(theta);
  Eigen::Matrix<double, 3, Eigen::Dynamic> a(3, static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    a.col(static_cast<Eigen::Index>(i)) = pairs[i].p_prime.cross(R * pairs[i].p);
  }
  if (pairs.size() < 3) return 0.0;
  Eigen::JacobiSVD<Eigen::Matrix<double, 3, Eigen::Dynamic>> svd(a);
  return svd.singularValues()(2);
}

}  // namespace

double oracle_alpha(std::span<const AlignedPair> pairs, double theta) {
  const auto unit = normalize_pairs(pairs);
  const double s = sigma_min(unit, theta);
  return s * s;
}

OracleResult grid_search_theta(std::span<const AlignedPair> pairs, int grid_points) {
  if (grid_points < 1000) throw std::invalid_argument("grid_search_theta: grid_points must be >= 1000");
  if (pairs.empty()) throw std::invalid_argument("grid_search_theta: no pairs");
  const auto unit = normalize_pairs(pairs);
  const TrigMoments moments(unit);

  const double lo = -std::numbers::pi + kOracleEdge;
  const double hi = std::numbers::pi - kOracleEdge;
  const double h = (hi - lo) / (grid_points - 1);
  auto node = [&](int k) { return k == grid_points - 1 ? hi : lo + k * h; };

  std::vector<double> values(static_cast<std::size_t>(grid_points));
  const std::size_t chunks = 64;
  const std::size_t per = (values.size() + chunks - 1) / chunks;
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t end = std::min(values.size(), (c + 1) * per);
    for (std::size_t k = c * per; k < end; ++k) {
      values[k] = sym3_min_eigenvalue(moments.eval(node(static_cast<int>(k))));
    }
  });

  OracleResult r;
  r.grid_resolution = grid_points;
  int best = 0;
  for (int k = 1; k < grid_points; ++k) {
    if (values[k] < values[best]) best = k;
  }

  // |d alpha / d theta| <= ||dC/dtheta|| <= 2 sum |a_i| |a_i'| <= 2 sum |p|^2 |p'|^2
  // (= 2N for unit rays); a small allowance covers rounding in the closed form.
  double lip = 0.0;
  for (const auto& pr : unit) lip += 2.0 * pr.p.squaredNorm() * pr.p_prime.squaredNorm();
  r.jump_bound = lip * h * (1.0 + 1e-6) + 1e-12 * lip;
  for (int k = 1; k < grid_points; ++k) r.max_jump = std::max(r.max_jump, std::abs(values[k] - values[k - 1]));
  r.continuity_ok = r.max_jump <= r.jump_bound;

  double a = node(std::max(0, best - 1));
  double b = node(std::min(grid_points - 1, best + 1));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = sigma_min(unit, x1), f2 = sigma_min(unit, x2);
  while (b - a > 1e-12) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = sigma_min(unit, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = sigma_min(unit, x2);
    }
    if (x1 >= x2) break;
  }
  const double theta_ref = f1 <= f2 ? x1 : x2;
  const double s_ref = std::min(f1, f2);

  const double s_grid = sigma_min(unit, node(best));
  r.best_grid_alpha = s_grid * s_grid;
  if (s_ref <= s_grid) {
    r.theta_star = theta_ref;
    r.alpha_star = s_ref * s_ref;
    r.refined = true;
  } else {
    r.theta_star = node(best);
    r.alpha_star = r.best_grid_alpha;
    r.refined = false;
  }
  r.trace = moments.eval(r.theta_star).trace();
  return r;
}

double finite_diff_stationarity(std::span<const AlignedPair> pairs, double y0, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite_diff_stationarity: step must be positive");
  const auto unit = normalize_pairs(pairs);
  const double ap = sym3_eigen(evaluate_c(unit, y0 + step)).eigenpairs.front().value;
  const double am = sym3_eigen(evaluate_c(unit, y0 - step)).eigenpairs.front().value;
  return (ap - am) / (2.0 * step);
}

}  // namespace gravipose
