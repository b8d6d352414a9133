#include "gravipose/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "gravipose/error.hpp"
#include "gravipose/format.hpp"
#include "gravipose/parallel.hpp"
#include "gravipose/robust.hpp"

namespace gravipose {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw InputError("invalid number '" + t + "' for " + std::string(key));
  }
  return v;
}

int checked_int(std::string_view key, double v) {
  if (v != std::floor(v) || std::abs(v) > 1e9) throw InputError(std::string(key) + " must be an integer");
  return static_cast<int>(v);
}

}  // namespace

SolverReport estimate(std::span<const Correspondence> corrs, const GravityObservation& g1,
                      const GravityObservation& g2, Method method) {
  const Alignment align{gravity_to_rotation(g1), gravity_to_rotation(g2)};
  if (method == Method::EightPoint) return solve_8pt(corrs, align);
  const auto pairs = align_correspondences(corrs, align);
  switch (method) {
    case Method::OptPep:
      return solve_opt(pairs, RootMethod::Pep, align);
    case Method::OptSturm:
      return solve_opt(pairs, RootMethod::Sturm, align);
    case Method::LinPep:
      return solve_lin(pairs, RootMethod::Pep, align);
    case Method::LinSturm:
      return solve_lin(pairs, RootMethod::Sturm, align);
    case Method::PlanarPep:
      return solve_planar(pairs, RootMethod::Pep, align);
    case Method::PlanarSturm:
      return solve_planar(pairs, RootMethod::Sturm, align);
    case Method::Minimal3pc: {
      if (pairs.size() < 3) throw DegenerateInput("3pc: needs at least 3 correspondences");
      const std::span<const AlignedPair> sample(pairs.data(), 3);
      SolverReport rep = solve_minimal_3pc(sample, align);
      if (rep.candidates.empty()) throw DegenerateInput("3pc: no real solution");
      double best_cost = std::numeric_limits<double>::infinity();
      for (const auto& cand : rep.candidates) {
        const RelativePose pose = candidate_pose(sample, cand, align);
        const Mat3 E = essential_from_pose(pose);
        double cost = 0.0;
        for (const auto& c : corrs) cost += std::min(sampson_error(E, c), 1.0);
        if (cost < best_cost) {
          best_cost = cost;
          rep.best = pose;
        }
      }
      return rep;
    }
    case Method::EightPoint:
      break;
  }
  throw InputError("estimate: unsupported method");
}

void apply_sweep_param(SceneConfig& cfg, std::string_view name, double value) {
  if (name == "sigma_px") {
    cfg.sigma_px = value;
  } else if (name == "baseline_frac") {
    cfg.baseline_frac = value;
  } else if (name == "n_corrs") {
    cfg.n_corrs = checked_int(name, value);
    cfg.n_world_points = std::max(cfg.n_world_points, cfg.n_corrs);
  } else if (name == "fov_deg") {
    cfg.fov_deg = value;
  } else if (name == "tau_deg") {
    cfg.tau_deg = value;
  } else {
    throw InputError("unknown sweep parameter '" + std::string(name) +
                     "' (sigma_px, baseline_frac, n_corrs, fov_deg, tau_deg)");
  }
}

void set_config_field(SceneConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "motion") {
    cfg.motion = parse_motion(trim(value));
    return;
  }
  if (key == "layout") {
    cfg.layout = parse_layout(trim(value));
    return;
  }
  if (key == "seed") {
    const std::string t = trim(value);
    std::uint64_t s = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), s);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) throw InputError("invalid seed '" + t + "'");
    cfg.seed = s;
    return;
  }
  const double v = parse_double(key, value);
  if (key == "n_world_points") {
    cfg.n_world_points = checked_int(key, v);
  } else if (key == "n_pose_pairs") {
    cfg.n_pose_pairs = checked_int(key, v);
  } else if (key == "focal_px") {
    cfg.focal_px = v;
  } else if (key == "rot_deg") {
    cfg.rot_deg = v;
  } else if (key == "tilt_deg") {
    cfg.tilt_deg = v;
  } else if (key == "depth_min") {
    cfg.depth_min = v;
  } else if (key == "depth_max") {
    cfg.depth_max = v;
  } else if (key == "outlier_frac") {
    cfg.outlier_frac = v;
  } else {
    apply_sweep_param(cfg, key, v);
  }
}

SceneConfig read_scene_config(std::istream& in, SceneConfig base) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw InputError("expected key = value", lineno);
    try {
      set_config_field(base, trim(t.substr(0, eq)), t.substr(eq + 1));
    } catch (const InputError& e) {
      throw InputError(e.what(), lineno);
    }
  }
  try {
    base.validate();
  } catch (const InputError& e) {
    throw InputError(std::string("invalid config: ") + e.what());
  }
  return base;
}

SceneConfig read_scene_config_file(const std::filesystem::path& path, SceneConfig base) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  try {
    return read_scene_config(in, base);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::vector<TrialResult> run_sweep(const SceneConfig& base, const SweepSpec& sweep, std::span<const Method> methods,
                                   int trials, bool record_timing) {
  if (trials < 0) throw InputError("trials must be non-negative");
  if (std::find(std::begin(kSweepParams), std::end(kSweepParams), sweep.param) == std::end(kSweepParams)) {
    SceneConfig probe = base;
    apply_sweep_param(probe, sweep.param, 0.0);  // throws with the list of names
  }
  const std::size_t nv = sweep.values.size(), nm = methods.size(), nt = static_cast<std::size_t>(trials);
  std::vector<TrialResult> out(nv * nm * nt);

  parallel_for(nv * nt, [&](std::size_t job) {
    const std::size_t v = job / nt, t = job % nt;
    SceneConfig cfg = base;
    apply_sweep_param(cfg, sweep.param, sweep.values[v]);
    auto row = [&](std::size_t m) -> TrialResult& {
      TrialResult& r = out[(v * nm + m) * nt + t];
      r.method = methods[m];
      r.sweep_param = sweep.param;
      r.sweep_value = sweep.values[v];
      r.trial = static_cast<int>(t);
      r.config = cfg;
      return r;
    };
    auto fail = [&](std::size_t m, const char* status) {
      TrialResult& r = row(m);
      r.status = status;
      r.rot_err_deg = r.trans_err_deg = kNaN;
      r.time_us = 0.0;
    };

    Scene scene;
    try {
      scene = generate_scene(cfg, t);
    } catch (const InputError&) {
      for (std::size_t m = 0; m < nm; ++m) fail(m, "invalid_config");
      return;
    } catch (const GenerationFailure&) {
      for (std::size_t m = 0; m < nm; ++m) fail(m, "generation");
      return;
    }
    const Vec3 t_true = scene.truth.t_rel.normalized();
    for (std::size_t m = 0; m < nm; ++m) {
      try {
        const SolverReport rep = estimate(scene.corrs, scene.g1, scene.g2, methods[m]);
        TrialResult& r = row(m);
        r.rot_err_deg = rotation_error(scene.truth.R_rel, rep.best.R_rel);
        r.trans_err_deg = translation_error(t_true, rep.best.t_rel);
        r.time_us = record_timing ? rep.time_us : 0.0;
        r.status = "ok";
      } catch (const DegenerateInput&) {
        fail(m, "degenerate");
      } catch (const NoModel&) {
        fail(m, "no_model");
      } catch (const NumericalFailure&) {
        fail(m, "numerical");
      } catch (const std::exception&) {
        fail(m, "error");
      }
    }
  });
  return out;
}

void write_results_csv(std::ostream& out, std::span<const TrialResult> results) {
  out << kResultsHeader << '\n';
  for (const auto& r : results) {
    out << method_name(r.method) << ',' << r.sweep_param << ',' << fmt17(r.sweep_value) << ',' << r.trial << ','
        << fmt17(r.rot_err_deg) << ',' << fmt17(r.trans_err_deg) << ',' << fmt17(r.time_us) << ',' << r.status
        << '\n';
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

std::vector<MethodSummary> summarize(std::span<const TrialResult> results) {
  struct Acc {
    MethodSummary s;
    std::vector<double> rot, trans, time;
  };
  std::vector<Acc> accs;
  for (const auto& r : results) {
    auto it = std::find_if(accs.begin(), accs.end(), [&](const Acc& a) {
      return a.s.method == r.method && a.s.sweep_value == r.sweep_value;
    });
    if (it == accs.end()) {
      accs.push_back({});
      it = accs.end() - 1;
      it->s.method = r.method;
      it->s.sweep_value = r.sweep_value;
    }
    if (r.ok()) {
      ++it->s.ok;
      it->rot.push_back(r.rot_err_deg);
      it->trans.push_back(r.trans_err_deg);
      it->time.push_back(r.time_us);
    } else {
      ++it->s.failed;
    }
  }
  std::vector<MethodSummary> out;
  for (auto& a : accs) {
    a.s.median_rot_deg = median(a.rot);
    a.s.median_trans_deg = median(a.trans);
    a.s.median_time_us = median(a.time);
    out.push_back(a.s);
  }
  return out;
}

std::vector<CdfPoint> empirical_cdf(std::vector<double> errors) {
  errors.erase(std::remove_if(errors.begin(), errors.end(), [](double e) { return !std::isfinite(e); }),
               errors.end());
  std::sort(errors.begin(), errors.end());
  std::vector<CdfPoint> out;
  const double n = static_cast<double>(errors.size());
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (i + 1 < errors.size() && errors[i + 1] == errors[i]) continue;
    out.push_back({errors[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

namespace {

std::string fmt3(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

void svg_panel(std::ostream& svg, double x0, const std::string& title,
               const std::vector<std::pair<Method, std::vector<CdfPoint>>>& curves) {
  const double w = 360.0, h = 300.0, left = 50.0, top = 30.0;
  double xmax = 0.0;
  for (const auto& [m, pts] : curves) {
    if (!pts.empty()) xmax = std::max(xmax, pts.back().error);
  }
  if (!(xmax > 0.0)) xmax = 1.0;
  auto px = [&](double e) { return x0 + left + w * (e / xmax); };
  auto py = [&](double f) { return top + h * (1.0 - f); };
  svg << "<g>\n<text x=\"" << x0 + left + w / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" << title
      << "</text>\n";
  svg << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(xmax) << "\" y2=\"" << py(0)
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(0) << "\" y2=\"" << py(1)
      << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << px(xmax / 2) << "\" y=\"" << py(0) + 32 << "\" text-anchor=\"middle\" font-size=\"12\">"
      << "error (deg)</text>\n";
  svg << "<text x=\"" << px(0) - 8 << "\" y=\"" << py(0) + 14 << "\" font-size=\"10\">0</text>\n";
  svg << "<text x=\"" << px(xmax) << "\" y=\"" << py(0) + 14 << "\" text-anchor=\"end\" font-size=\"10\">"
      << fmt3(xmax) << "</text>\n";
  svg << "<text x=\"" << px(0) - 6 << "\" y=\"" << py(1) + 4 << "\" text-anchor=\"end\" font-size=\"10\">1</text>\n";
  svg << "<text x=\"" << px(0) - 36 << "\" y=\"" << py(0.5)
      << "\" font-size=\"12\" transform=\"rotate(-90 " << px(0) - 36 << ' ' << py(0.5)
      << ")\" text-anchor=\"middle\">fraction</text>\n";
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto& [m, pts] = curves[c];
    svg << "<polyline fill=\"none\" stroke=\"" << kPalette[c % 8] << "\" stroke-width=\"1.5\" points=\"" << px(0)
        << ',' << py(0);
    double prev = 0.0;
    for (const auto& p : pts) {
      svg << ' ' << px(p.error) << ',' << py(prev) << ' ' << px(p.error) << ',' << py(p.fraction);
      prev = p.fraction;
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << x0 + left + w - 4 << "\" y=\"" << top + h - 14.0 * (curves.size() - c)
        << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << kPalette[c % 8] << "\">" << method_name(m)
        << "</text>\n";
  }
  svg << "</g>\n";
}

}  // namespace

void emit_cdf(std::span<const TrialResult> results, const std::filesystem::path& path) {
  if (results.empty()) throw std::invalid_argument("emit_cdf: no results");
  std::vector<Method> order;
  for (const auto& r : results) {
    if (std::find(order.begin(), order.end(), r.method) == order.end()) order.push_back(r.method);
  }
  std::vector<std::pair<Method, std::vector<CdfPoint>>> rot, trans;
  for (Method m : order) {
    std::vector<double> re, te;
    for (const auto& r : results) {
      if (r.method != m) continue;
      re.push_back(r.rot_err_deg);
      te.push_back(r.trans_err_deg);
    }
    rot.emplace_back(m, empirical_cdf(re));
    trans.emplace_back(m, empirical_cdf(te));
  }

  std::filesystem::path csv_path = path, svg_path = path;
  csv_path.replace_extension(".csv");
  svg_path.replace_extension(".svg");
  {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("emit_cdf: cannot write " + csv_path.string());
    csv << "method,metric,error_deg,fraction\n";
    auto dump = [&](const char* metric, const auto& curves) {
      for (const auto& [m, pts] : curves) {
        for (const auto& p : pts) csv << method_name(m) << ',' << metric << ',' << fmt17(p.error) << ',' << fmt17(p.fraction) << '\n';
      }
    };
    dump("rotation", rot);
    dump("translation", trans);
    if (!csv) throw std::runtime_error("emit_cdf: write failed for " + csv_path.string());
  }
  std::ofstream svg(svg_path);
  if (!svg) throw std::runtime_error("emit_cdf: cannot write " + svg_path.string());
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"860\" height=\"380\" font-family=\"sans-serif\">\n";
  svg << "<rect width=\"860\" height=\"380\" fill=\"white\"/>\n";
  svg_panel(svg, 0.0, "rotation error CDF", rot);
  svg_panel(svg, 430.0, "translation error CDF", trans);
  svg << "</svg>\n";
  if (!svg) throw std::runtime_error("emit_cdf: write failed for " + svg_path.string());
}

}  // namespace gravipose
