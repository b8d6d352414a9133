#include "gravipose/solvers.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <functional>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gravipose/error.hpp"
#include "gravipose/linalg.hpp"
#include "gravipose/polymat.hpp"
#include "gravipose/solver_core.hpp"
#include "gravipose/sturm.hpp"

namespace gravipose {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::OptPep: return "opt";
    case Method::OptSturm: return "opt-sturm";
    case Method::LinPep: return "lin";
    case Method::LinSturm: return "lin-sturm";
    case Method::PlanarPep: return "planar";
    case Method::PlanarSturm: return "planar-sturm";
    case Method::Minimal3pc: return "3pc";
    case Method::EightPoint: return "8pt";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "opt" || name == "opt-pep") return Method::OptPep;
  if (name == "opt-sturm") return Method::OptSturm;
  if (name == "lin" || name == "lin-pep") return Method::LinPep;
  if (name == "lin-sturm") return Method::LinSturm;
  if (name == "planar" || name == "planar-pep") return Method::PlanarPep;
  if (name == "planar-sturm") return Method::PlanarSturm;
  if (name == "3pc") return Method::Minimal3pc;
  if (name == "8pt" || name == "8pc") return Method::EightPoint;
  throw InputError("unknown method '" + std::string(name) + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_us(Clock::time_point start) {
  return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}

// theta = pi - 1e-6, the edge of the Cayley parameterisation.
const double kGuardY = std::tan(0.5 * (std::numbers::pi - 1e-6));

constexpr int kPolishTop = 3;
constexpr int kPolishIters = 8;
constexpr double kTieEps = 1e-12;
constexpr double kRankEps = 1e-10;

// Objective models: C(x), dC/dx, d2C/dx2 for the solved variable x.

struct CayleyModel {
  static constexpr int K = 3;
  using Mat = Mat3;
  const SymPolyMat3& gram;

  void eval(double y, Mat& c, Mat& d1, Mat& d2) const {
    Mat3 g, g1, g2;
    gram.eval3(y, g, g1, g2);
    const double dl = 1.0 + y * y;
    const double i2 = 1.0 / (dl * dl), i3 = i2 / dl, i4 = i3 / dl;
    c = g * i2;
    d1 = g1 * i2 - 4.0 * y * i3 * g;
    d2 = g2 * i2 - 8.0 * y * i3 * g1 - 4.0 * i3 * g + 24.0 * y * y * i4 * g;
  }
  Mat value(double y) const {
    const double dl = 1.0 + y * y;
    return gram.eval(y) / (dl * dl);
  }
  static Vec3 embed(const Eigen::Vector3d& v) { return v; }
};

struct LinearModel {
  static constexpr int K = 3;
  using Mat = Mat3;
  const SymPolyMat3& gram;

  void eval(double th, Mat& c, Mat& d1, Mat& d2) const { gram.eval3(th, c, d1, d2); }
  Mat value(double th) const { return gram.eval(th); }
  static Vec3 embed(const Eigen::Vector3d& v) { return v; }
};

Mat2 xz_block(const Mat3& m) {
  Mat2 b;
  b << m(0, 0), m(0, 2), m(2, 0), m(2, 2);
  return b;
}

struct PlanarModel {
  static constexpr int K = 2;
  using Mat = Mat2;
  CayleyModel full;

  void eval(double y, Mat& c, Mat& d1, Mat& d2) const {
    Mat3 a, b, e;
    full.eval(y, a, b, e);
    c = xz_block(a);
    d1 = xz_block(b);
    d2 = xz_block(e);
  }
  Mat value(double y) const { return xz_block(full.value(y)); }
  static Vec3 embed(const Eigen::Vector2d& v) { return Vec3(v(0), 0.0, v(1)); }
};

struct Scored {
  PoseCandidate cand;
  double trace = 0.0;
  double second = 0.0;
};

template <class Model>
double min_eigenvalue(const typename Model::Mat& c) {
  Eigen::SelfAdjointEigenSolver<typename Model::Mat> es(c, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Newton iteration on d(alpha_min)/dx using first-order eigen-perturbation;
// steps are kept only while alpha_min does not increase.
template <class Model>
double polish(const Model& model, double x) {
  using Mat = typename Model::Mat;
  constexpr int K = Model::K;
  for (int it = 0; it < kPolishIters; ++it) {
    Mat c, d1, d2;
    model.eval(x, c, d1, d2);
    const double tr = c.trace();
    if (!(tr > 0.0)) break;
    Eigen::SelfAdjointEigenSolver<Mat> es(c);
    const auto& lam = es.eigenvalues();
    const auto& vec = es.eigenvectors();
    if (lam(1) - lam(0) <= 1e-12 * tr) break;
    const auto v = vec.col(0);
    const double slope = v.dot(d1 * v);
    double curv = v.dot(d2 * v);
    for (int j = 1; j < K; ++j) {
      const double w = vec.col(j).dot(d1 * v);
      curv -= 2.0 * w * w / (lam(j) - lam(0));
    }
    if (!(curv > 0.0)) break;
    double step = -slope / curv;
    const double limit = 0.25 * (1.0 + std::abs(x));
    step = std::clamp(step, -limit, limit);
    const double xn = x + step;
    const double an = min_eigenvalue<Model>(model.value(xn));
    if (!(an <= lam(0) + 1e-14 * tr)) break;
    x = xn;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(x))) break;
  }
  return x;
}

template <class Model>
Scored score(const Model& model, double x, bool x_is_theta) {
  Eigen::SelfAdjointEigenSolver<typename Model::Mat> es(model.value(x));
  Scored s;
  s.cand.alpha_min = es.eigenvalues()(0);
  s.cand.t_aligned = Model::embed(es.eigenvectors().col(0)).normalized();
  if (x_is_theta) {
    s.cand.theta = x;
    s.cand.y = std::tan(0.5 * x);
  } else {
    s.cand.y = x;
    s.cand.theta = 2.0 * std::atan(x);
  }
  s.cand.near_half_turn = std::abs(s.cand.y) > kNearHalfTurnY;
  s.trace = es.eigenvalues().sum();
  s.second = es.eigenvalues()(1);
  return s;
}

template <class Model>
std::vector<Scored> score_all(const Model& model, const std::vector<double>& xs, bool x_is_theta,
                              bool add_guard) {
  std::vector<Scored> out;
  out.reserve(xs.size() + 1);
  for (double x : xs) {
    if (std::isfinite(x)) out.push_back(score(model, x, x_is_theta));
  }
  std::vector<std::size_t> order(out.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return out[a].cand.alpha_min < out[b].cand.alpha_min; });
  for (std::size_t k = 0; k < order.size() && k < static_cast<std::size_t>(kPolishTop); ++k) {
    Scored& s = out[order[k]];
    const double x0 = x_is_theta ? s.cand.theta : s.cand.y;
    const double x1 = polish(model, x0);
    if (x1 != x0) s = score(model, x1, x_is_theta);
  }
  if (add_guard) {
    Scored g = score(model, kGuardY, false);
    g.cand.boundary = true;
    out.push_back(g);
  }
  return out;
}

void pick_best(SolverReport& report, const std::vector<Scored>& scored,
               std::span<const AlignedPair> q, const Alignment& alignment,
               double rank_scale_hint, const std::function<PoseCandidate(const PoseCandidate&)>& finalize) {
  if (scored.empty()) throw DegenerateInput("no real stationary point found");
  bool any_rank2 = false;
  for (const Scored& s : scored) {
    report.candidates.push_back(s.cand);
    if (s.trace > 0.0 && s.second > kRankEps * std::max(s.trace, rank_scale_hint)) any_rank2 = true;
  }
  if (!any_rank2) throw DegenerateInput("C has rank < 2 at every candidate (pure rotation or collinear points)");

  std::size_t best = 0;
  for (std::size_t i = 1; i < scored.size(); ++i) {
    if (scored[i].cand.alpha_min < scored[best].cand.alpha_min) best = i;
  }
  const double tie = kTieEps * std::max(scored[best].trace, 0.0);
  PoseCandidate chosen = finalize(scored[best].cand);
  CheiralityResult chir = cheirality_resolve(q, chosen.y, chosen.t_aligned);
  std::size_t chosen_idx = best;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (i == best || scored[i].cand.alpha_min > scored[best].cand.alpha_min + tie) continue;
    PoseCandidate other = finalize(scored[i].cand);
    CheiralityResult oc = cheirality_resolve(q, other.y, other.t_aligned);
    if (oc.positive_count > chir.positive_count) {
      chosen = other;
      chir = std::move(oc);
      chosen_idx = i;
    }
  }
  // Unit rays bound trace C by N. A near-zero second eigenvalue at the
  // optimum leaves the translation undetermined (pure rotation).
  if (scored[chosen_idx].second <= kRankEps * static_cast<double>(q.size())) {
    throw DegenerateInput("C has rank < 2 at the optimum (pure rotation or collinear points)");
  }
  if (chosen.near_half_turn) {
    std::ostringstream os;
    os << "selected rotation is close to a half-turn (y = " << chosen.y << ")";
    report.warnings.push_back(os.str());
  }
  report.best = compose_pose(chosen.y, chir.t, alignment);
  report.best.score = chosen.alpha_min;
  report.positive_depths = chir.positive_count;
}

PoseCandidate identity_finalize(const PoseCandidate& c) { return c; }

void require_points(std::span<const AlignedPair> pairs, std::size_t n, const char* who) {
  if (pairs.size() < n) {
    std::ostringstream os;
    os << who << ": needs at least " << n << " correspondences, got " << pairs.size();
    throw DegenerateInput(os.str());
  }
}

void check_companion(SolverReport& report, int expected) {
  if (report.companion_size != expected) {
    std::ostringstream os;
    os << "companion matrix reduced to " << report.companion_size << "x" << report.companion_size
       << ", expected " << expected << "x" << expected;
    report.warnings.push_back(os.str());
  }
}

// Union of both lists, sorted, with near-duplicates collapsed.
std::vector<double> merge_seeds(std::vector<double> roots, const std::vector<double>& extra) {
  roots.insert(roots.end(), extra.begin(), extra.end());
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double x : roots) {
    if (out.empty() || std::abs(out.back() - x) > 1e-9 * (1.0 + std::abs(x))) out.push_back(x);
  }
  return out;
}

// Gram entries have degree at most four, so substituting y = shift + scale * v
// loses little and avoids another pass over the points.
SymPolyMat3 reexpand(const SymPolyMat3& g, double shift, double scale) {
  SymPolyMat3 out;
  for (int r = 0; r < 3; ++r) {
    for (int c = r; c < 3; ++c) out(r, c) = poly_scale_argument(poly_shift(g(r, c), shift), scale);
  }
  return out;
}

// Hidden-variable matrix in v, where y = shift + scale * v.
using Builder = std::function<PolyMat(double shift, double scale)>;

// Monomial coefficients in y cannot resolve the cluster of stationary points
// around the minimum, where det M is tiny compared with its coefficients.
// Re-expanding in u = y - c restores the accuracy near c. Centres are the best
// root and, for the rational model, its half-turn partner -1/c, whose basin
// often mirrors the minimum.
template <class Model>
std::vector<double> refine_near_best(const Builder& build, const Model& model, std::vector<double> roots,
                                     bool mirror) {
  if (roots.empty()) return roots;
  double c = roots.front(), best = std::numeric_limits<double>::infinity();
  for (double r : roots) {
    const double a = min_eigenvalue<Model>(model.value(r));
    if (a < best) {
      best = a;
      c = r;
    }
  }
  std::vector<double> centres{polish(model, c)};
  if (mirror && std::abs(centres[0]) > 1e-12) centres.push_back(-1.0 / centres[0]);
  for (double centre : centres) {
    const double scale = 1.0 + std::abs(centre);
    const Poly det = polymat_det(build(centre, scale));
    if (det.degree() < 1) continue;
    constexpr double kWindow = 0.25;
    std::vector<double> out{centre};
    for (double r : roots) {
      if (std::abs(r - centre) > kWindow * scale) out.push_back(r);
    }
    for (double v : merge_seeds(sturm_real_roots_in(det, -kWindow, kWindow),
                                sturm_tangent_points_in(det, -kWindow, kWindow))) {
      out.push_back(centre + scale * v);
    }
    roots = std::move(out);
  }
  return merge_seeds(std::move(roots), {});
}

// Real roots of det M(y) by the requested path. PEP failures fall back to
// the Sturm path.
template <class Model>
std::vector<double> stationary_points(const Builder& build, const Model& model, RootMethod method,
                                      int expected_companion, bool mirror, SolverReport& report) {
  if (method == RootMethod::Pep) {
    try {
      PepRoots pep = pep_real_roots(build(0.0, 1.0));
      report.companion_size = pep.reduced_size;
      check_companion(report, expected_companion);
      return merge_seeds(std::move(pep.roots), pep.near_real);
    } catch (const NumericalFailure& e) {
      report.used_fallback = true;
      report.warnings.push_back(std::string("eigenvalue path failed, using Sturm path: ") + e.what());
    }
  }
  const Poly det = polymat_det(build(0.0, 1.0));
  report.poly_degree = det.degree();
  if (report.poly_degree < 1) throw DegenerateInput("hidden-variable determinant vanishes identically");
  return refine_near_best(build, model, sturm_real_roots(det), mirror);
}

}  // namespace

SolverReport solve_opt(std::span<const AlignedPair> pairs, RootMethod method, const Alignment& alignment) {
  const auto start = Clock::now();
  require_points(pairs, 4, "solve_opt");
  SolverReport report;
  report.method = method == RootMethod::Pep ? Method::OptPep : Method::OptSturm;

  const std::vector<AlignedPair> q = normalize_pairs(pairs);
  const SymPolyMat3 gram = build_gram(q);
  const int n = static_cast<int>(q.size());
  const CayleyModel model{gram};
  const Builder build = [&](double s, double k) {
    return build_b_matrix(build_c_system(s == 0.0 && k == 1.0 ? gram : reexpand(gram, s, k), n, s, k));
  };
  const std::vector<double> roots = stationary_points(build, model, method, 34, true, report);

  const auto scored = score_all(model, roots, false, true);
  pick_best(report, scored, q, alignment, 0.0, identity_finalize);
  report.time_us = elapsed_us(start);
  return report;
}

SolverReport solve_lin(std::span<const AlignedPair> pairs, RootMethod method, const Alignment& alignment) {
  const auto start = Clock::now();
  require_points(pairs, 4, "solve_lin");
  SolverReport report;
  report.method = method == RootMethod::Pep ? Method::LinPep : Method::LinSturm;

  const std::vector<AlignedPair> q = normalize_pairs(pairs);
  const SymPolyMat3 gram = build_gram_linear(q);
  const int n = static_cast<int>(q.size());
  const LinearModel model{gram};
  const Builder build = [&](double s, double k) {
    return build_lin_b_matrix(build_lin_system(s == 0.0 && k == 1.0 ? gram : reexpand(gram, s, k), n));
  };
  const std::vector<double> roots = stationary_points(build, model, method, 21, false, report);

  const auto scored = score_all(model, roots, true, false);
  // The first-order matrix is not a rotation: report the exact rotation by
  // the solved angle and take t from the exact C there.
  auto finalize = [&](const PoseCandidate& c) {
    PoseCandidate out = c;
    const EigenResult eig = sym3_eigen(evaluate_c(q, c.y));
    out.t_aligned = eig.eigenpairs[0].vector.normalized();
    return out;
  };
  pick_best(report, scored, q, alignment, 0.0, finalize);
  report.best.theta = 2.0 * std::atan(report.best.y);
  report.time_us = elapsed_us(start);
  return report;
}

SolverReport solve_planar(std::span<const AlignedPair> pairs, RootMethod method, const Alignment& alignment) {
  const auto start = Clock::now();
  require_points(pairs, 3, "solve_planar");
  SolverReport report;
  report.method = method == RootMethod::Pep ? Method::PlanarPep : Method::PlanarSturm;

  const std::vector<AlignedPair> q = normalize_pairs(pairs);
  const SymPolyMat3 gram = build_gram(q);
  const int n = static_cast<int>(q.size());
  const PlanarModel model{CayleyModel{gram}};
  const Builder build = [&](double s, double k) {
    return build_planar_b_matrix(build_planar_system(s == 0.0 && k == 1.0 ? gram : reexpand(gram, s, k), n, s, k));
  };
  const std::vector<double> roots = stationary_points(build, model, method, 10, true, report);

  const auto scored = score_all(model, roots, false, true);
  pick_best(report, scored, q, alignment, 0.0, identity_finalize);
  report.time_us = elapsed_us(start);
  return report;
}

RelativePose candidate_pose(std::span<const AlignedPair> pairs, const PoseCandidate& cand,
                            const Alignment& alignment) {
  const CheiralityResult chir = cheirality_resolve(pairs, cand.y, cand.t_aligned);
  RelativePose pose = compose_pose(cand.y, chir.t, alignment);
  pose.score = cand.alpha_min;
  return pose;
}

SolverReport solve_minimal_3pc(std::span<const AlignedPair> pairs, const Alignment& alignment) {
  const auto start = Clock::now();
  if (pairs.size() != 3) throw DegenerateInput("solve_minimal_3pc: needs exactly 3 correspondences");
  SolverReport report;
  report.method = Method::Minimal3pc;

  const std::vector<AlignedPair> q = normalize_pairs(pairs);
  const PolyMat a = build_a_tilde(q);
  const Poly det = polymat_det(a);
  double scale = 1.0;
  for (int c = 0; c < 3; ++c) {
    double col = 0.0;
    for (int r = 0; r < 3; ++r) col = std::max(col, a(r, c).max_abs());
    scale *= col;
  }
  if (det.max_abs() <= 1e-12 * scale) throw DegenerateInput("solve_minimal_3pc: aligned rays are linearly dependent");

  const Poly quartic = poly_exact_divide(det, delta_poly()).quotient.trimmed();
  report.poly_degree = quartic.degree();
  const std::vector<double> roots = quartic.degree() >= 1 ? sturm_real_roots(quartic) : std::vector<double>{};

  int best_count = -1;
  for (double y : roots) {
    const MatX ay = a.eval(y);
    Vec3 t = Vec3::Zero();
    double best_norm = -1.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        const Vec3 c = Vec3(ay.col(i)).cross(Vec3(ay.col(j)));
        if (c.norm() > best_norm) {
          best_norm = c.norm();
          t = c;
        }
      }
    }
    if (!(best_norm > 0.0)) continue;
    PoseCandidate cand;
    cand.y = y;
    cand.theta = 2.0 * std::atan(y);
    cand.t_aligned = t.normalized();
    cand.alpha_min = sym3_eigen(evaluate_c(q, y)).real_eigenvalues[0];
    report.candidates.push_back(cand);

    const CheiralityResult chir = cheirality_resolve(q, y, cand.t_aligned);
    if (chir.positive_count > best_count ||
        (chir.positive_count == best_count && cand.alpha_min < report.best.score)) {
      best_count = chir.positive_count;
      report.best = compose_pose(y, chir.t, alignment);
      report.best.score = cand.alpha_min;
      report.positive_depths = chir.positive_count;
    }
  }
  report.time_us = elapsed_us(start);
  return report;
}

}  // namespace gravipose
