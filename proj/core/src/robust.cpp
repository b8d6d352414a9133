#include "gravipose/robust.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "gravipose/error.hpp"

namespace gravipose {

Mat3 essential_from_pose(double y, const Vec3& t_aligned, const Mat3& R, const Mat3& R_prime) {
  return R_prime.transpose() * skew(t_aligned) * cayley_rotation(y) * R;
}

Mat3 essential_from_pose(const RelativePose& pose) { return skew(pose.t_rel) * pose.R_rel; }

double sampson_error(const Mat3& E, const Correspondence& c) {
  const Vec3 em = E * c.m;
  const Vec3 etm = E.transpose() * c.m_prime;
  const double denom = em(0) * em(0) + em(1) * em(1) + etm(0) * etm(0) + etm(1) * etm(1);
  if (denom < 1e-18) return std::numeric_limits<double>::infinity();
  const double r = c.m_prime.dot(em);
  return r * r / denom;
}

int ransac_required_iterations(double inlier_ratio, double confidence, int max_iters) {
  const double w3 = std::pow(std::clamp(inlier_ratio, 0.0, 1.0), 3);
  if (w3 >= 1.0) return 1;
  if (w3 <= 0.0) return max_iters;
  const double k = std::log(1.0 - confidence) / std::log(1.0 - w3);
  if (!(k < max_iters)) return max_iters;
  return std::max(1, static_cast<int>(std::ceil(k)));
}

namespace {

struct Scored {
  RelativePose pose;
  std::vector<bool> mask;
  int count = 0;
  // Truncated cost, breaks ties between equal inlier counts.
  double cost = std::numeric_limits<double>::infinity();

  bool better_than(const Scored& o) const { return count > o.count || (count == o.count && cost < o.cost); }
};

Scored score_pose(std::span<const Correspondence> corrs, const RelativePose& pose, double thr2) {
  Scored s;
  s.pose = pose;
  s.mask.assign(corrs.size(), false);
  s.cost = 0.0;
  const Mat3 E = essential_from_pose(pose);
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    const double e = sampson_error(E, corrs[i]);
    if (e < thr2) {
      s.mask[i] = true;
      ++s.count;
      s.cost += e;
    } else {
      s.cost += thr2;
    }
  }
  return s;
}

std::optional<RelativePose> fit_inliers(std::span<const AlignedPair> pairs, const std::vector<bool>& mask,
                                        Method method, const Alignment& align) {
  std::vector<AlignedPair> sub;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (mask[i]) sub.push_back(pairs[i]);
  }
  if (sub.size() < 4) return std::nullopt;
  try {
    switch (method) {
      case Method::OptPep:
        return solve_opt(sub, RootMethod::Pep, align).best;
      case Method::OptSturm:
        return solve_opt(sub, RootMethod::Sturm, align).best;
      case Method::LinPep:
        return solve_lin(sub, RootMethod::Pep, align).best;
      case Method::LinSturm:
        return solve_lin(sub, RootMethod::Sturm, align).best;
      default:
        return std::nullopt;
    }
  } catch (const DegenerateInput&) {
    return std::nullopt;
  } catch (const NumericalFailure&) {
    return std::nullopt;
  }
}

}  // namespace

RobustResult lo_ransac(std::span<const Correspondence> corrs, const GravityObservation& g1,
                       const GravityObservation& g2, const RansacConfig& cfg) {
  if (!(cfg.threshold > 0.0)) throw InputError("ransac threshold must be positive");
  if (!(cfg.confidence > 0.0 && cfg.confidence < 1.0)) throw InputError("ransac confidence must lie in (0, 1)");
  if (cfg.max_iters < 1) throw InputError("ransac max_iters must be at least 1");
  switch (cfg.lo_method) {
    case Method::OptPep:
    case Method::OptSturm:
    case Method::LinPep:
    case Method::LinSturm:
      break;
    default:
      throw InputError("local optimisation method must be opt, opt-sturm, lin or lin-sturm");
  }
  if (corrs.size() < 4) throw DegenerateInput("lo_ransac: needs at least 4 correspondences");

  const Alignment align{gravity_to_rotation(g1), gravity_to_rotation(g2)};
  const std::vector<AlignedPair> pairs = align_correspondences(corrs, align);
  const double thr2 = cfg.threshold * cfg.threshold;
  const int n = static_cast<int>(corrs.size());

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> pick(0, n - 1);

  RobustResult out;
  Scored best;
  best.count = 0;
  int needed = cfg.max_iters;
  long attempts = 0;
  const long max_attempts = 10L * cfg.max_iters;

  auto local_optimise = [&]() {
    for (int round = 0; round < 10; ++round) {
      const auto fit = fit_inliers(pairs, best.mask, cfg.lo_method, align);
      if (!fit) return;
      Scored s = score_pose(corrs, *fit, thr2);
      ++out.lo_rounds;
      if (!s.better_than(best)) return;
      assert(s.count >= best.count);
      best = std::move(s);
    }
  };

  while (out.iterations < needed && attempts < max_attempts) {
    ++attempts;
    int idx[3];
    idx[0] = pick(rng);
    do idx[1] = pick(rng);
    while (idx[1] == idx[0]);
    do idx[2] = pick(rng);
    while (idx[2] == idx[0] || idx[2] == idx[1]);
    const AlignedPair sample[3] = {pairs[idx[0]], pairs[idx[1]], pairs[idx[2]]};

    SolverReport rep;
    try {
      rep = solve_minimal_3pc(sample, align);
    } catch (const DegenerateInput&) {
      continue;
    }
    ++out.iterations;

    bool improved = false;
    for (const auto& cand : rep.candidates) {
      Scored s = score_pose(corrs, candidate_pose(sample, cand, align), thr2);
      if (s.better_than(best)) {
        best = std::move(s);
        improved = true;
      }
    }
    if (improved && best.count >= 4) {
      local_optimise();
      needed = std::min(needed, ransac_required_iterations(static_cast<double>(best.count) / n, cfg.confidence,
                                                           cfg.max_iters));
    }
  }

  if (best.count < 4) throw NoModel("lo_ransac: no hypothesis reached 4 inliers");

  // Final polish on the final inlier set; the mask is always re-derived from
  // the reported pose.
  if (const auto fit = fit_inliers(pairs, best.mask, cfg.lo_method, align)) {
    Scored s = score_pose(corrs, *fit, thr2);
    if (s.count >= best.count) best = std::move(s);
  }
  out.pose = best.pose;
  out.inlier_mask = best.mask;
  return out;
}

}  // namespace gravipose
