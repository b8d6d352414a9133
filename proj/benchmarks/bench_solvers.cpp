#include <benchmark/benchmark.h>

#include <algorithm>
#include <map>

#include "gravipose/robust.hpp"
#include "gravipose/scene.hpp"
#include "gravipose/solvers.hpp"

using namespace gravipose;

namespace {

struct Problem {
  Scene scene;
  Alignment align;
  std::vector<AlignedPair> pairs;
};

// One default scene per size, built once.
const Problem& problem(int n, double outlier_frac = 0.0) {
  static std::map<std::pair<int, double>, Problem> cache;
  auto it = cache.find({n, outlier_frac});
  if (it == cache.end()) {
    SceneConfig cfg;
    cfg.n_corrs = n;
    cfg.n_world_points = std::max(cfg.n_world_points, n);
    cfg.outlier_frac = outlier_frac;
    cfg.seed = 7;
    Problem p;
    p.scene = generate_scene(cfg, 0);
    p.align = {gravity_to_rotation(p.scene.g1), gravity_to_rotation(p.scene.g2)};
    p.pairs = align_correspondences(p.scene.corrs, p.align);
    it = cache.emplace(std::make_pair(n, outlier_frac), std::move(p)).first;
  }
  return it->second;
}

template <SolverReport (*Solve)(std::span<const AlignedPair>, RootMethod, const Alignment&), RootMethod M>
void BM_Gravity(benchmark::State& state) {
  const Problem& p = problem(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Solve(p.pairs, M, p.align));
}

void BM_EightPoint(benchmark::State& state) {
  const Problem& p = problem(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_8pt(p.scene.corrs, p.align));
}

void BM_Minimal3pc(benchmark::State& state) {
  const Problem& p = problem(3);
  for (auto _ : state) benchmark::DoNotOptimize(solve_minimal_3pc(p.pairs, p.align));
}

void BM_LoRansac(benchmark::State& state) {
  const Problem& p = problem(static_cast<int>(state.range(0)), 0.3);
  RansacConfig cfg;
  cfg.threshold = 3e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lo_ransac(p.scene.corrs, p.scene.g1, p.scene.g2, cfg));
  }
}

}  // namespace

#define SIZES Arg(20)->Arg(200)->Arg(2000)->Unit(benchmark::kMicrosecond)

BENCHMARK(BM_Gravity<solve_opt, RootMethod::Pep>)->Name("opt/pep")->SIZES;
BENCHMARK(BM_Gravity<solve_opt, RootMethod::Sturm>)->Name("opt/sturm")->SIZES;
BENCHMARK(BM_Gravity<solve_lin, RootMethod::Pep>)->Name("lin/pep")->SIZES;
BENCHMARK(BM_Gravity<solve_lin, RootMethod::Sturm>)->Name("lin/sturm")->SIZES;
BENCHMARK(BM_EightPoint)->Name("8pt")->SIZES;
BENCHMARK(BM_Minimal3pc)->Name("3pc")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LoRansac)->Name("lo-ransac/outliers-0.3")->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
