#include "gravipose/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gravipose/bench.hpp"
#include "gravipose/error.hpp"
#include "gravipose/format.hpp"
#include "gravipose/oracle.hpp"
#include "gravipose/robust.hpp"

namespace gravipose::cli {

namespace fs = std::filesystem;

double aligned_theta(const Mat3& R_rel, const GravityObservation& g1, const GravityObservation& g2) {
  const Mat3 Ra = gravity_to_rotation(g2) * R_rel * gravity_to_rotation(g1).transpose();
  return std::atan2(Ra(0, 2) - Ra(2, 0), Ra(0, 0) + Ra(2, 2));
}

ProblemFile scene_to_problem(const Scene& scene, const SceneConfig& cfg, bool pixels) {
  ProblemFile pf;
  const double f = pixels ? cfg.focal_px : 1.0;
  for (const Correspondence& c : scene.corrs) {
    pf.rows.push_back({f * c.m.x() / c.m.z(), f * c.m.y() / c.m.z(), f * c.m_prime.x() / c.m_prime.z(),
                       f * c.m_prime.y() / c.m_prime.z()});
  }
  pf.labels = scene.inlier;
  if (pixels) pf.intrinsics = Intrinsics{cfg.focal_px, Vec2::Zero()};
  pf.gravity1 = scene.g1;
  pf.gravity2 = scene.g2;
  GroundTruth gt;
  gt.R_rel = scene.truth.R_rel;
  gt.t_rel = scene.truth.t_rel.normalized();
  gt.theta = aligned_theta(gt.R_rel, scene.g1, scene.g2);
  pf.truth = gt;
  return pf;
}

namespace {

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::vector<Method> parse_methods(const std::string& list) {
  std::vector<Method> methods;
  for (const auto& name : split(list, ',')) methods.push_back(parse_method(name));
  if (methods.empty()) throw InputError("--methods needs at least one method");
  return methods;
}

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw InputError("bad number '" + s + "' in " + what);
  return v;
}

SweepSpec parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw InputError("--sweep expects name=v1,v2,...");
  SweepSpec spec;
  spec.param = text.substr(0, eq);
  for (const auto& v : split(text.substr(eq + 1), ',')) spec.values.push_back(parse_number(v, "--sweep"));
  if (spec.values.empty()) throw InputError("--sweep " + spec.param + " has no values");
  return spec;
}

// Writes to the file at path, or to out when path is empty.
template <class F>
void emit(const std::string& path, std::ostream& out, F&& write) {
  if (path.empty()) {
    write(out);
    return;
  }
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path);
  write(f);
  if (!f) throw InputError("error writing " + path);
}

void print_truth_errors(std::ostream& out, const ProblemFile& pf, const RelativePose& pose) {
  if (!pf.truth) return;
  out << "rot_err_deg = " << fmt17(rotation_error(pf.truth->R_rel, pose.R_rel)) << '\n';
  out << "trans_err_deg = " << fmt17(translation_error(pf.truth->t_rel, pose.t_rel)) << '\n';
  if (pf.truth->theta) out << "theta_err_rad = " << fmt17(std::abs(pose.theta - *pf.truth->theta)) << '\n';
}

// ---- solve ----------------------------------------------------------------

struct SolveArgs {
  std::string input;
  std::string method = "opt";
  std::string out;
  bool no_timing = false;
};

int cmd_solve(const SolveArgs& a, Streams io) {
  const ProblemFile pf = read_problem_file(a.input);
  const Method method = parse_method(a.method);
  SolverReport rep = estimate(pf.calibrated(), pf.gravity1, pf.gravity2, method);
  if (a.no_timing) rep.time_us = 0.0;
  const PoseReport report = make_pose_report(rep);
  for (const auto& w : rep.warnings) io.err << "warning: " << w << '\n';
  emit(a.out, io.out, [&](std::ostream& o) { write_pose_report(o, report); });
  if (!a.out.empty()) {
    io.out << "theta = " << fmt17(rep.best.theta) << '\n';
    io.out << "alpha_min = " << fmt17(rep.best.score) << '\n';
    print_truth_errors(io.out, pf, rep.best);
  }
  return kOk;
}

// ---- oracle ---------------------------------------------------------------

struct OracleArgs {
  std::string input;
  int grid = 100000;
};

int cmd_oracle(const OracleArgs& a, Streams io) {
  const ProblemFile pf = read_problem_file(a.input);
  const std::vector<Correspondence> corrs = pf.calibrated();
  const Alignment al{gravity_to_rotation(pf.gravity1), gravity_to_rotation(pf.gravity2)};
  const std::vector<AlignedPair> pairs = align_correspondences(corrs, al);
  if (a.grid < 1000) throw InputError("--grid must be at least 1000");
  const OracleResult orc = grid_search_theta(pairs, a.grid);
  const double tol = 1e-9 * orc.trace;

  io.out << "theta_star = " << fmt17(orc.theta_star) << '\n';
  io.out << "alpha_star = " << fmt17(orc.alpha_star) << '\n';
  io.out << "trace = " << fmt17(orc.trace) << '\n';
  io.out << "grid = " << orc.grid_resolution << '\n';
  io.out << "continuity_ok = " << (orc.continuity_ok ? "true" : "false") << '\n';
  io.out << "tolerance = " << fmt17(tol) << '\n';

  std::optional<double> opt_gap;
  for (Method m : {Method::OptPep, Method::OptSturm, Method::LinPep, Method::LinSturm}) {
    const std::string name(method_name(m));
    try {
      const SolverReport rep = estimate(corrs, pf.gravity1, pf.gravity2, m);
      const double gap = oracle_alpha(pairs, rep.best.theta) - orc.alpha_star;
      io.out << "theta_" << name << " = " << fmt17(rep.best.theta) << '\n';
      io.out << "gap_" << name << " = " << fmt17(gap) << '\n';
      if (m == Method::OptPep) opt_gap = gap;
    } catch (const Error& e) {
      io.out << "gap_" << name << " = nan\n";
      io.err << name << ": " << e.what() << '\n';
    }
  }
  const bool pass = opt_gap && *opt_gap <= tol;
  io.out << "optimal = " << (pass ? "true" : "false") << '\n';
  return pass ? kOk : kNoModel;
}

// ---- ransac ---------------------------------------------------------------

struct RansacArgs {
  std::string input;
  std::optional<double> threshold_px;
  std::optional<double> threshold;
  std::string lo = "opt";
  std::uint64_t seed = 0;
  int max_iters = 10000;
  double confidence = 0.999;
  std::string out;
  bool no_timing = false;
};

int cmd_ransac(const RansacArgs& a, Streams io) {
  const ProblemFile pf = read_problem_file(a.input);
  RansacConfig cfg;
  cfg.lo_method = parse_method(a.lo);
  cfg.seed = a.seed;
  cfg.max_iters = a.max_iters;
  cfg.confidence = a.confidence;
  if (a.threshold_px && a.threshold) throw InputError("give either --threshold-px or --threshold");
  if (a.threshold) {
    cfg.threshold = *a.threshold;
  } else if (pf.intrinsics) {
    cfg.threshold = pf.pixels_to_calibrated(a.threshold_px.value_or(1.0));
  } else if (a.threshold_px) {
    throw InputError("--threshold-px needs a focal length in the input file; use --threshold");
  }

  const std::vector<Correspondence> corrs = pf.calibrated();
  const auto start = std::chrono::steady_clock::now();
  const RobustResult res = lo_ransac(corrs, pf.gravity1, pf.gravity2, cfg);
  const double us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count();

  PoseReport report;
  report.command = "ransac";
  report.method = std::string(method_name(cfg.lo_method));
  report.pose = res.pose;
  report.time_us = a.no_timing ? 0.0 : us;
  {
    const Alignment al{gravity_to_rotation(pf.gravity1), gravity_to_rotation(pf.gravity2)};
    std::vector<Correspondence> inl;
    for (std::size_t i = 0; i < corrs.size(); ++i) {
      if (res.inlier_mask[i]) inl.push_back(corrs[i]);
    }
    report.positive_depths =
        cheirality_resolve(align_correspondences(inl, al), res.pose.y, res.pose.t_aligned).positive_count;
  }
  report.iterations = res.iterations;
  report.lo_rounds = res.lo_rounds;
  report.inlier_mask = res.inlier_mask;
  emit(a.out, io.out, [&](std::ostream& o) { write_pose_report(o, report); });

  if (!a.out.empty()) {
    int inliers = 0;
    for (bool b : res.inlier_mask) inliers += b;
    io.out << "inliers = " << inliers << " / " << res.inlier_mask.size() << '\n';
    io.out << "iterations = " << res.iterations << '\n';
    if (pf.labels.size() == res.inlier_mask.size()) {
      int agree = 0;
      for (std::size_t i = 0; i < pf.labels.size(); ++i) agree += pf.labels[i] == res.inlier_mask[i];
      io.out << "label_agreement = " << fmt17(static_cast<double>(agree) / pf.labels.size()) << '\n';
    }
    print_truth_errors(io.out, pf, res.pose);
  }
  return kOk;
}

// ---- bench ----------------------------------------------------------------

struct BenchArgs {
  std::string config;
  std::vector<std::string> sweeps;
  std::vector<std::string> sets;
  std::string methods = "opt,opt-sturm,lin,lin-sturm,8pt";
  int trials = 200;
  std::optional<std::uint64_t> seed;
  std::string out = "bench_out";
  bool no_timing = false;
};

SceneConfig scene_config(const std::string& path, const std::vector<std::string>& sets) {
  SceneConfig cfg = path.empty() ? SceneConfig{} : read_scene_config_file(path);
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InputError("--set expects key=value, got '" + kv + "'");
    set_config_field(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

int cmd_bench(const BenchArgs& a, Streams io) {
  SceneConfig base = scene_config(a.config, a.sets);
  if (a.seed) base.seed = *a.seed;
  base.validate();
  if (a.trials < 1) throw InputError("--trials must be positive");
  const std::vector<Method> methods = parse_methods(a.methods);
  std::vector<SweepSpec> sweeps;
  for (const auto& s : a.sweeps) sweeps.push_back(parse_sweep(s));
  if (sweeps.empty()) sweeps.push_back({"sigma_px", {base.sigma_px}});

  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) throw InputError("cannot create " + a.out + ": " + ec.message());

  for (const SweepSpec& sweep : sweeps) {
    const std::vector<TrialResult> results = run_sweep(base, sweep, methods, a.trials, !a.no_timing);
    const fs::path stem = fs::path(a.out) / sweep.param;
    const std::string csv = stem.string() + "_results.csv";
    emit(csv, io.out, [&](std::ostream& o) { write_results_csv(o, results); });
    emit_cdf(results, stem.string() + "_cdf");

    io.out << "sweep " << sweep.param << " (" << a.trials << " trials) -> " << csv << '\n';
    io.out << std::left << std::setw(14) << "value" << std::setw(13) << "method" << std::setw(6) << "ok"
           << std::setw(8) << "failed" << std::setw(16) << "med_rot_deg" << std::setw(16) << "med_trans_deg"
           << "med_time_us" << '\n';
    for (const MethodSummary& s : summarize(results)) {
      std::ostringstream v, r, t, tm;
      v << std::setprecision(6) << s.sweep_value;
      r << std::setprecision(6) << s.median_rot_deg;
      t << std::setprecision(6) << s.median_trans_deg;
      tm << std::setprecision(6) << s.median_time_us;
      io.out << std::left << std::setw(14) << v.str() << std::setw(13) << method_name(s.method) << std::setw(6)
             << s.ok << std::setw(8) << s.failed << std::setw(16) << r.str() << std::setw(16) << t.str() << tm.str()
             << '\n';
    }
  }
  return kOk;
}

// ---- generate -------------------------------------------------------------

struct GenerateArgs {
  std::string config;
  std::vector<std::string> sets;
  std::uint64_t trial = 0;
  std::optional<std::uint64_t> seed;
  bool calibrated = false;
  std::string out;
};

int cmd_generate(const GenerateArgs& a, Streams io) {
  SceneConfig cfg = scene_config(a.config, a.sets);
  if (a.seed) cfg.seed = *a.seed;
  cfg.validate();
  const Scene scene = generate_scene(cfg, a.trial);
  const ProblemFile pf = scene_to_problem(scene, cfg, !a.calibrated);
  emit(a.out, io.out, [&](std::ostream& o) { write_problem(o, pf); });
  return kOk;
}

template <class F>
int guarded(F&& f, Streams io) {
  try {
    return f();
  } catch (const InputError& e) {
    io.err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const GenerationFailure& e) {
    io.err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const DegenerateInput& e) {
    io.err << "degenerate input: " << e.what() << '\n';
    return kDegenerate;
  } catch (const NoModel& e) {
    io.err << "no model: " << e.what() << '\n';
    return kNoModel;
  } catch (const NumericalFailure& e) {
    io.err << "numerical failure: " << e.what() << '\n';
    return kNoModel;
  } catch (const std::invalid_argument& e) {
    io.err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kNoModel;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Streams io{out, err};
  CLI::App app{"Relative pose from two views with a known vertical direction"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Estimate the relative pose of one problem file");
  s->add_option("input", solve.input, "Problem file")->required();
  s->add_option("-m,--method", solve.method, "opt, opt-sturm, lin, lin-sturm, planar, planar-sturm, 3pc or 8pt")
      ->capture_default_str();
  s->add_option("-o,--out", solve.out, "Pose report file (default: stdout)");
  s->add_flag("--no-timing", solve.no_timing, "Report time_us = 0 for reproducible output");

  OracleArgs oracle;
  auto* o = app.add_subcommand("oracle", "Check the optimal solvers against a dense grid search");
  o->add_option("input", oracle.input, "Problem file")->required();
  o->add_option("-g,--grid", oracle.grid, "Grid points over (-pi, pi)")->capture_default_str();

  RansacArgs ransac;
  auto* r = app.add_subcommand("ransac", "Robust estimation with LO-RANSAC");
  r->add_option("input", ransac.input, "Problem file")->required();
  r->add_option("--threshold-px", ransac.threshold_px, "Inlier threshold in pixels (default 1)");
  r->add_option("--threshold", ransac.threshold, "Inlier threshold in calibrated units");
  r->add_option("--lo", ransac.lo, "Local optimisation solver: opt, opt-sturm, lin, lin-sturm")->capture_default_str();
  r->add_option("--seed", ransac.seed, "Sampling seed")->capture_default_str();
  r->add_option("--max-iters", ransac.max_iters, "Iteration cap")->capture_default_str();
  r->add_option("--confidence", ransac.confidence, "Stopping confidence")->capture_default_str();
  r->add_option("-o,--out", ransac.out, "Report file (default: stdout)");
  r->add_flag("--no-timing", ransac.no_timing, "Report time_us = 0 for reproducible output");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Synthetic parameter sweeps");
  b->add_option("-c,--config", bench.config, "Scene config file (key = value)");
  b->add_option("--set", bench.sets, "Override a config field, key=value (repeatable)");
  b->add_option("-s,--sweep", bench.sweeps, "name=v1,v2,... (repeatable)");
  b->add_option("-m,--methods", bench.methods, "Comma-separated methods")->capture_default_str();
  b->add_option("-n,--trials", bench.trials, "Trials per value")->capture_default_str();
  b->add_option("--seed", bench.seed, "Override the config seed");
  b->add_option("-o,--out", bench.out, "Output directory")->capture_default_str();
  b->add_flag("--no-timing", bench.no_timing, "Record time_us = 0 so reruns are bit-identical");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a synthetic problem file with ground truth");
  g->add_option("-c,--config", gen.config, "Scene config file (key = value)");
  g->add_option("--set", gen.sets, "Override a config field, key=value (repeatable)");
  g->add_option("--trial", gen.trial, "Trial index within the seed's stream")->capture_default_str();
  g->add_option("--seed", gen.seed, "Override the config seed");
  g->add_flag("--calibrated", gen.calibrated, "Write calibrated coordinates instead of pixels");
  g->add_option("-o,--out", gen.out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  if (s->parsed()) return guarded([&] { return cmd_solve(solve, io); }, io);
  if (o->parsed()) return guarded([&] { return cmd_oracle(oracle, io); }, io);
  if (r->parsed()) return guarded([&] { return cmd_ransac(ransac, io); }, io);
  if (b->parsed()) return guarded([&] { return cmd_bench(bench, io); }, io);
  return guarded([&] { return cmd_generate(gen, io); }, io);
}

}  // namespace gravipose::cli
