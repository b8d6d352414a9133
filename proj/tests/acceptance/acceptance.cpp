// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gravipose/bench.hpp"
#include "gravipose/error.hpp"
#include "gravipose/linalg.hpp"
#include "gravipose/oracle.hpp"
#include "gravipose/polymat.hpp"
#include "gravipose/robust.hpp"
#include "gravipose/scene.hpp"
#include "gravipose/solver_core.hpp"
#include "gravipose/solvers.hpp"

using namespace gravipose;
using Clock = std::chrono::steady_clock;

namespace {

int g_failed = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("%s %d %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  g_failed += !pass;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Aligned {
  Alignment align;
  std::vector<AlignedPair> pairs;
};

Aligned align(const Scene& s) {
  Aligned a{{gravity_to_rotation(s.g1), gravity_to_rotation(s.g2)}, {}};
  a.pairs = align_correspondences(s.corrs, a.align);
  return a;
}

double rel_coeff_err(const Poly& a, const Poly& b) {
  const std::size_t n = std::max(a.size(), b.size());
  double num = 0.0;
  for (std::size_t k = 0; k < n; ++k) num = std::max(num, std::abs(a[static_cast<int>(k)] - b[static_cast<int>(k)]));
  const double den = std::max(a.max_abs(), b.max_abs());
  return den > 0.0 ? num / den : num;
}

void criterion1() {
  const auto t0 = Clock::now();
  SceneConfig cfg;
  cfg.sigma_px = 0;
  cfg.layout = SceneLayout::Orbit;
  cfg.rot_deg = 150;
  cfg.seed = 101;
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> n_dist(4, 100);
  int bad = 0;
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    SceneConfig c = cfg;
    c.n_corrs = n_dist(rng);
    const Scene s = generate_scene(c, static_cast<std::uint64_t>(t));
    const SolverReport r = estimate(s.corrs, s.g1, s.g2, Method::OptPep);
    const double e = std::max(rotation_error(s.truth.R_rel, r.best.R_rel), translation_error(s.truth.t_rel, r.best.t_rel));
    worst = std::max(worst, e);
    bad += !(e <= 1e-6);
  }
  const double secs = seconds_since(t0);
  report(1, "exact-recovery", bad == 0 && secs < 30.0,
         fmt("%d/1000 over 1e-6 deg, worst %.3g deg, %.1f s (budget 30 s)", bad, worst, secs));
}

void criterion2() {
  const auto t0 = Clock::now();
  const double sigmas[] = {0.5, 1.0, 2.0};
  int bad = 0;
  double worst = -INFINITY;
  for (int t = 0; t < 1000; ++t) {
    SceneConfig cfg;
    cfg.sigma_px = sigmas[t % 3];
    cfg.seed = 202;
    const Aligned a = align(generate_scene(cfg, static_cast<std::uint64_t>(t)));
    const OracleResult o = grid_search_theta(a.pairs);
    const SolverReport r = solve_opt(a.pairs, RootMethod::Pep, a.align);
    const double gap = (oracle_alpha(a.pairs, r.best.theta) - o.alpha_star) / o.trace;
    worst = std::max(worst, gap);
    bad += !(std::abs(gap) <= 1e-9);
  }
  const double secs = seconds_since(t0);
  report(2, "global-optimality", bad == 0 && secs < 300.0,
         fmt("%d/1000 outside 1e-9*trace, worst gap %.3g*trace, %.1f s (budget 300 s)", bad, worst, secs));
}

void criterion3() {
  int bad = 0;
  std::string first;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok && first.empty()) first = what;
    bad += !ok;
  };
  SceneConfig cfg;
  cfg.seed = 303;
  SceneConfig planar = cfg;
  planar.motion = MotionPreset::Planar;
  for (int t = 0; t < 100; ++t) {
    const Aligned a = align(generate_scene(cfg, static_cast<std::uint64_t>(t)));
    const auto q = normalize_pairs(a.pairs);
    const int det_opt = polymat_det(build_b_matrix(build_c_system(q))).degree();
    const int det_lin = polymat_det(build_lin_b_matrix(build_lin_system(q))).degree();
    check(det_opt == 28, fmt("det B degree %d", det_opt));
    check(det_lin == 15, fmt("linear det degree %d", det_lin));
    const SolverReport op = solve_opt(a.pairs, RootMethod::Pep), os = solve_opt(a.pairs, RootMethod::Sturm);
    const SolverReport lp = solve_lin(a.pairs, RootMethod::Pep), ls = solve_lin(a.pairs, RootMethod::Sturm);
    check(op.companion_size == 34, fmt("opt companion %d", op.companion_size));
    check(os.poly_degree == 28, fmt("opt sturm degree %d", os.poly_degree));
    check(lp.companion_size == 21, fmt("lin companion %d", lp.companion_size));
    check(ls.poly_degree == 15, fmt("lin sturm degree %d", ls.poly_degree));
    const SolverReport m = solve_minimal_3pc(std::span<const AlignedPair>(a.pairs.data(), 3));
    check(m.candidates.size() <= 4, fmt("3pc candidates %zu", m.candidates.size()));

    const Aligned p = align(generate_scene(planar, static_cast<std::uint64_t>(t)));
    const SolverReport pp = solve_planar(p.pairs, RootMethod::Pep), ps = solve_planar(p.pairs, RootMethod::Sturm);
    check(pp.companion_size == 10, fmt("planar companion %d", pp.companion_size));
    check(ps.poly_degree == 8, fmt("planar degree %d", ps.poly_degree));
    auto interior = [](const SolverReport& r) {
      return std::count_if(r.candidates.begin(), r.candidates.end(), [](const PoseCandidate& c) { return !c.boundary; });
    };
    check(interior(pp) <= 8 && interior(ps) <= 8, "planar candidates > 8");
  }
  report(3, "structural-degrees", bad == 0,
         bad == 0 ? "det 28 / 15, companion 34 / 21 / 10, 3pc <= 4, planar <= 8 on 100 instances each"
                  : fmt("%d violations, first: %s", bad, first.c_str()));
}

void criterion4() {
  SceneConfig cfg;
  cfg.seed = 404;
  struct Tally {
    int agree = 0, near_tie = 0, other = 0;
  } opt, lin;
  auto compare = [](const SolverReport& a, const SolverReport& b, double trace, Tally& t, const char* name, int trial) {
    const double ya = a.best.y, yb = b.best.y;
    const bool y_ok = std::abs(ya - yb) <= 1e-6 * std::max(1.0, std::abs(ya));
    const double sa = a.best.score, sb = b.best.score;
    const bool s_ok = std::abs(sa - sb) <= 1e-8 * std::max(std::abs(sa), 1e-300) || std::abs(sa - sb) <= 1e-15 * trace;
    if (y_ok && s_ok) {
      ++t.agree;
    } else if (std::abs(sa - sb) < 1e-6 * trace) {
      ++t.near_tie;
      std::printf("  note 4: %s trial %d near-tie, y %.10g vs %.10g, alpha gap %.3g*trace\n", name, trial, ya, yb,
                  std::abs(sa - sb) / trace);
    } else {
      ++t.other;
      std::printf("  note 4: %s trial %d disagrees, y %.10g vs %.10g, alpha %.6g vs %.6g\n", name, trial, ya, yb, sa,
                  sb);
    }
  };
  for (int t = 0; t < 500; ++t) {
    const Aligned a = align(generate_scene(cfg, static_cast<std::uint64_t>(t)));
    const double trace = evaluate_c(normalize_pairs(a.pairs), 0.0).trace();
    compare(solve_opt(a.pairs, RootMethod::Pep), solve_opt(a.pairs, RootMethod::Sturm), trace, opt, "opt", t);
    compare(solve_lin(a.pairs, RootMethod::Pep), solve_lin(a.pairs, RootMethod::Sturm), trace, lin, "lin", t);
  }
  const bool pass = opt.agree >= 498 && lin.agree >= 498 && opt.other == 0 && lin.other == 0;
  report(4, "path-agreement", pass,
         fmt("opt %d/500 agree (%d near-tie), lin %d/500 agree (%d near-tie), need >= 99.5%%", opt.agree, opt.near_tie,
             lin.agree, lin.near_tie));
}

void criterion5() {
  SceneConfig cfg;
  cfg.rot_deg = 5;
  cfg.seed = 505;
  std::vector<double> d;
  for (int t = 0; t < 200; ++t) {
    const Aligned a = align(generate_scene(cfg, static_cast<std::uint64_t>(t)));
    d.push_back(std::abs(solve_lin(a.pairs).best.theta - solve_opt(a.pairs).best.theta));
  }
  const double med = median(d);
  report(5, "linearization-regime", med <= 1e-3, fmt("median |theta_lin - theta_opt| = %.3g rad (<= 1e-3)", med));
}

void criterion6() {
  SceneConfig cfg;
  cfg.seed = 606;
  const Method methods[] = {Method::OptPep, Method::EightPoint};
  const auto s0 = summarize(run_sweep(cfg, {"tau_deg", {0.0, 0.2}}, methods, 200, false));
  const MethodSummary &opt0 = s0[0], &eight = s0[1], &opt2 = s0[2];
  const bool order = opt0.median_rot_deg <= eight.median_rot_deg && opt0.median_trans_deg <= eight.median_trans_deg;
  const bool tau = opt2.median_rot_deg <= 3.0 * opt0.median_rot_deg;
  report(6, "solver-ordering", order && tau,
         fmt("rot opt %.4g vs 8pt %.4g deg, trans opt %.4g vs 8pt %.4g deg, tau 0.2 rot %.4g (<= %.4g)",
             opt0.median_rot_deg, eight.median_rot_deg, opt0.median_trans_deg, eight.median_trans_deg,
             opt2.median_rot_deg, 3.0 * opt0.median_rot_deg));
}

void criterion7() {
  SceneConfig cfg;
  cfg.n_corrs = 100;
  cfg.outlier_frac = 0.3;
  cfg.seed = 707;
  RansacConfig rc;
  rc.threshold = 3e-3;  // 3 px at f = 1000
  std::vector<double> rot;
  int no_model = 0;
  long truth = 0, hit = 0;
  for (int t = 0; t < 100; ++t) {
    const Scene s = generate_scene(cfg, static_cast<std::uint64_t>(t));
    rc.seed = static_cast<std::uint64_t>(t);
    try {
      const RobustResult r = lo_ransac(s.corrs, s.g1, s.g2, rc);
      rot.push_back(rotation_error(s.truth.R_rel, r.pose.R_rel));
      for (std::size_t i = 0; i < s.corrs.size(); ++i) {
        truth += s.inlier[i];
        hit += s.inlier[i] && r.inlier_mask[i];
      }
    } catch (const NoModel&) {
      ++no_model;
    }
  }
  const double med = rot.empty() ? INFINITY : median(rot);
  const double recall = truth ? static_cast<double>(hit) / truth : 0.0;
  report(7, "robust-estimation", med <= 0.5 && recall >= 0.95 && no_model == 0,
         fmt("median rotation %.4g deg (<= 0.5), inlier recall %.4f (>= 0.95), NoModel %d", med, recall, no_model));
}

void criterion8() {
  // Methods are timed round-robin on the same problems so that drift in the
  // machine's speed affects all of them alike.
  using Solve = std::function<void(const std::vector<AlignedPair>&)>;
  const Solve solvers[] = {
      [](const auto& p) { solve_opt(p, RootMethod::Sturm); },
      [](const auto& p) { solve_opt(p, RootMethod::Pep); },
      [](const auto& p) { solve_lin(p, RootMethod::Sturm); },
      [](const auto& p) { solve_lin(p, RootMethod::Pep); },
  };
  const char* names[] = {"opt-sturm", "opt-pep", "lin-sturm", "lin-pep"};
  auto medians = [&](int n, int problems, int reps) {
    SceneConfig cfg;
    cfg.n_corrs = n;
    cfg.n_world_points = std::max(cfg.n_world_points, n);
    cfg.seed = 808;
    std::vector<std::vector<AlignedPair>> set;
    for (int t = 0; t < problems; ++t) set.push_back(align(generate_scene(cfg, static_cast<std::uint64_t>(t))).pairs);
    std::vector<std::vector<double>> us(4);
    for (int r = 0; r < reps; ++r) {
      for (const auto& p : set) {
        for (int m = 0; m < 4; ++m) {
          const auto t0 = Clock::now();
          solvers[m](p);
          us[m].push_back(1e6 * seconds_since(t0));
        }
      }
    }
    std::vector<double> out;
    for (auto& v : us) out.push_back(median(v));
    return out;
  };
  const auto t20 = medians(20, 20, 15), t200 = medians(200, 10, 6), t2000 = medians(2000, 5, 4);
  bool pass = t20[0] <= 1000 && t20[2] <= 1000 && t20[1] <= 10000 && t20[3] <= 10000;
  pass = pass && t20[0] < t20[1] && t20[2] < t20[3];
  // Fixed root-finding cost plus a linear term means time per point never
  // grows with N.
  bool linear = true;
  for (int m = 0; m < 4; ++m) {
    linear = linear && t200[m] / 200 <= 1.25 * t20[m] / 20 && t2000[m] / 2000 <= 1.25 * t200[m] / 200;
  }
  std::string detail;
  for (int m = 0; m < 4; ++m) detail += fmt("%s %.1f/%.1f/%.1f us, ", names[m], t20[m], t200[m], t2000[m]);
  detail += "at N = 20/200/2000";
  report(8, "performance", pass && linear, detail);
}

void criterion9() {
  SceneConfig cfg;
  cfg.seed = 909;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> yd(-3.0, 3.0);
  std::uniform_int_distribution<int> nd(4, 60);
  double worst_h = 0, worst_div = 0, worst_cubic = 0, worst_sv = 0, worst_ident = 0;
  const Poly delta{1.0, 0.0, 1.0}, y{0.0, 1.0};
  for (int t = 0; t < 1000; ++t) {
    SceneConfig c = cfg;
    c.n_corrs = nd(rng);
    const Scene s = generate_scene(c, static_cast<std::uint64_t>(t));
    const Aligned a = align(s);
    const auto q = normalize_pairs(a.pairs);
    const CSystem sys = build_c_system(q);
    worst_h = std::max({worst_h, rel_coeff_err(sys.h1, poly_derivative(sys.g1) * delta - 4.0 * y * sys.g1),
                        rel_coeff_err(sys.h2, poly_derivative(sys.g2) * delta - 6.0 * y * sys.g2),
                        rel_coeff_err(sys.h3, poly_derivative(sys.g3) * delta - 8.0 * y * sys.g3)});
    worst_div = std::max({worst_div, sys.g2_remainder, sys.g3_remainder});

    const Mat3 C = evaluate_c(q, yd(rng));
    const double f1 = C.trace();
    const double f2 = C(0, 0) * C(1, 1) - C(0, 1) * C(1, 0) + C(0, 0) * C(2, 2) - C(0, 2) * C(2, 0) +
                      C(1, 1) * C(2, 2) - C(1, 2) * C(2, 1);
    const double f3 = C.determinant();
    const double scale = std::max(f1, 1e-300);
    for (const auto& e : sym3_eigen(C).eigenpairs) {
      const double al = e.value;
      worst_cubic = std::max(worst_cubic, std::abs(al * al * al - f1 * al * al + f2 * al - f3) / (scale * scale * scale));
    }

    const SolverReport r = solve_opt(a.pairs, RootMethod::Pep, a.align);
    const Mat3 E = essential_from_pose(r.best);
    const Vec3 sv = Eigen::JacobiSVD<Mat3>(E).singularValues();
    worst_sv = std::max({worst_sv, std::abs(sv(0) - sv(1)) / sv(0), sv(2) / sv(0)});
    const Mat3 ident = 2.0 * E * E.transpose() * E - (E * E.transpose()).trace() * E;
    worst_ident = std::max({worst_ident, std::abs(E.determinant()), ident.cwiseAbs().maxCoeff()});
  }
  const bool pass = worst_h <= 1e-10 && worst_div <= 1e-10 && worst_cubic <= 1e-8 && worst_sv <= 1e-9 &&
                    worst_ident <= 1e-9;
  report(9, "algebraic-identities", pass,
         fmt("h identity %.2g (1e-10), division %.2g (1e-10), cubic %.2g (1e-8), singular values %.2g (1e-9), "
             "essential identities %.2g (1e-9)",
             worst_h, worst_div, worst_cubic, worst_sv, worst_ident));
}

}  // namespace

int main() {
  const std::function<void()> criteria[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                            criterion6, criterion7, criterion8, criterion9};
  int id = 1;
  for (const auto& c : criteria) {
    try {
      c();
    } catch (const std::exception& e) {
      report(id, "exception", false, e.what());
    }
    ++id;
  }
  std::printf("%d of 9 criteria failed\n", g_failed);
  return g_failed ? 1 : 0;
}
