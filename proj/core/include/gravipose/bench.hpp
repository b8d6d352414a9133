#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gravipose/scene.hpp"
#include "gravipose/solvers.hpp"

namespace gravipose {

/// Aligns the correspondences with the observed gravity and runs `method`.
/// The minimal solver uses the first three correspondences and keeps the
/// candidate with the smallest total Sampson error over all of them.
SolverReport estimate(std::span<const Correspondence> corrs, const GravityObservation& g1,
                      const GravityObservation& g2, Method method);

struct TrialResult {
  Method method = Method::OptPep;
  std::string sweep_param;
  double sweep_value = 0.0;
  int trial = 0;
  /// NaN for failed trials.
  double rot_err_deg = 0.0;
  double trans_err_deg = 0.0;
  double time_us = 0.0;
  /// ok, degenerate, numerical, no_model, generation, invalid_config.
  std::string status = "ok";
  SceneConfig config;

  bool ok() const { return status == "ok"; }
};

struct SweepSpec {
  std::string param;
  std::vector<double> values;
};

/// Names accepted by run_sweep.
inline constexpr std::string_view kSweepParams[] = {"sigma_px", "baseline_frac", "n_corrs", "fov_deg", "tau_deg"};

/// Sets one of kSweepParams. Throws InputError for any other name.
void apply_sweep_param(SceneConfig& cfg, std::string_view name, double value);

/// Sets any SceneConfig field from its text value (config files).
void set_config_field(SceneConfig& cfg, std::string_view key, std::string_view value);

/// key = value lines, '#' comments. Throws InputError with line numbers.
SceneConfig read_scene_config(std::istream& in, SceneConfig base = {});
SceneConfig read_scene_config_file(const std::filesystem::path& path, SceneConfig base = {});

/// For each value x method x trial (in that order): generate the scene of
/// trial index t, solve, record errors. Every method sees the same scene for
/// a given (value, trial). Solver and generation errors become failed rows.
/// With record_timing = false time_us is 0, making the output bit-identical
/// across runs.
std::vector<TrialResult> run_sweep(const SceneConfig& base, const SweepSpec& sweep, std::span<const Method> methods,
                                   int trials, bool record_timing = true);

inline constexpr std::string_view kResultsHeader =
    "method,sweep_param,sweep_value,trial,rot_err_deg,trans_err_deg,time_us,status";

/// Header plus one row per result, numbers at 17 significant digits.
void write_results_csv(std::ostream& out, std::span<const TrialResult> results);

struct MethodSummary {
  Method method = Method::OptPep;
  double sweep_value = 0.0;
  int ok = 0;
  int failed = 0;
  double median_rot_deg = 0.0;
  double median_trans_deg = 0.0;
  double median_time_us = 0.0;
};

/// Medians over successful trials per (sweep value, method), in result order.
std::vector<MethodSummary> summarize(std::span<const TrialResult> results);

double median(std::vector<double> v);

struct CdfPoint {
  double error = 0.0;
  double fraction = 0.0;
};

/// Fraction of finite errors <= e at each distinct e, ascending.
std::vector<CdfPoint> empirical_cdf(std::vector<double> errors);

/// Writes <path>.csv (method,metric,error_deg,fraction) and <path>.svg (two
/// panels, one polyline per method and metric). Methods keep their order of
/// first appearance. Throws std::invalid_argument on empty input and
/// std::runtime_error naming the path on I/O failure.
void emit_cdf(std::span<const TrialResult> results, const std::filesystem::path& path);

}  // namespace gravipose
