#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <vector>

#include "ftl/experiments.hpp"
#include "ftl/forward_model.hpp"
#include "ftl/interpolation.hpp"
#include "ftl/planner.hpp"
#include "ftl/shape_library.hpp"

namespace {

using namespace ftl;

const StudyContext& context(std::size_t size) {
  static std::map<std::size_t, StudyContext> cache;
  auto it = cache.find(size);
  if (it == cache.end()) {
    LibraryConfig lc;
    lc.size = size;
    it = cache.emplace(size, make_context(ModelSpec{}, lc)).first;
  }
  return it->second;
}

void BM_PccForward(benchmark::State& state) {
  const ModelSpec spec;
  Configuration q;
  q << 0.3, -0.7, 1.1, 0.2, -0.4, 0.9;
  for (auto _ : state) benchmark::DoNotOptimize(pcc_forward(spec, q));
}
BENCHMARK(BM_PccForward);

void BM_Chamfer(benchmark::State& state) {
  const ModelSpec spec;
  Configuration q;
  q << 0.3, -0.7, 1.1, 0.2, -0.4, 0.9;
  const Shape shape = pcc_forward(spec, q);
  const std::vector<Vec3> a(shape.points().begin(), shape.points().end());
  const std::vector<Vec3> b(a.begin(), a.begin() + state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(shape_deviation(a, b));
}
BENCHMARK(BM_Chamfer)->Arg(3)->Arg(10)->Arg(61);

void BM_EvaluateCandidate(benchmark::State& state) {
  const StudyContext& ctx = context(1000);
  const WaypointPath path = gen_c_curve(3, 10);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        evaluate_candidate(ctx.library->shapes[i % ctx.library->size()], i, path, path.size()));
    ++i;
  }
}
BENCHMARK(BM_EvaluateCandidate);

void BM_PlanSparse(benchmark::State& state) {
  const StudyContext& ctx = context(static_cast<std::size_t>(state.range(0)));
  const WaypointPath path = gen_s_curve(4, 10);
  PlannerOptions opt;
  opt.mode = state.range(1) == 0 ? SearchMode::linear : SearchMode::clustered;
  for (auto _ : state) benchmark::DoNotOptimize(plan_sparse(*ctx.library, &ctx.clusters, path, opt));
  state.SetLabel(state.range(1) == 0 ? "linear" : "clustered");
}
BENCHMARK(BM_PlanSparse)
    ->Args({2000, 0})
    ->Args({2000, 1})
    ->Args({8000, 0})
    ->Args({8000, 1})
    ->Unit(benchmark::kMillisecond);

void BM_Interpolate(benchmark::State& state) {
  const StudyContext& ctx = context(2000);
  const WaypointPath path = gen_c_curve(9, 10);
  const SparsePlan sp = plan_sparse(*ctx.library, &ctx.clusters, path,
                                    [] {
                                      PlannerOptions o;
                                      o.mode = SearchMode::clustered;
                                      return o;
                                    }());
  const std::size_t h = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(interpolate(sp, path, h, *ctx.model));
}
BENCHMARK(BM_Interpolate)->Arg(10)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
