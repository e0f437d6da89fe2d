// Serial reference kernels against their OpenMP counterparts.
//
//   trl_bench --benchmark_filter=Assemble

#include <benchmark/benchmark.h>

#include <memory>

#include "trl/assembly.hpp"
#include "trl/fea.hpp"
#include "trl/sweep.hpp"

using namespace trl;

namespace {

std::shared_ptr<const geometry::TriMesh> trl_mesh(double edge) {
  geometry::TrlSpec spec;
  spec.triangle_count = 30;
  return std::make_shared<const geometry::TriMesh>(geometry::build_trl_mesh(spec, edge));
}

fea::ExecutionPolicy policy(const benchmark::State& state) {
  return state.range(0) ? fea::ExecutionPolicy::Parallel : fea::ExecutionPolicy::Serial;
}

void BM_Assemble(benchmark::State& state) {
  const auto mesh = trl_mesh(1.0);
  for (auto _ : state) {
    auto sys = fea::assemble(mesh, material::pa6(), {1e-3, policy(state)});
    benchmark::DoNotOptimize(sys.stiffness.nonZeros());
  }
  state.counters["elements"] = static_cast<double>(mesh->element_count());
}

void BM_RecoverStresses(benchmark::State& state) {
  const auto mesh = trl_mesh(1.0);
  const auto sys = fea::assemble(mesh, material::pa6());
  const auto r = fea::solve(sys, fea::LoadCase::torsion(5.0));
  Eigen::VectorXd u(6 * mesh->node_count());
  for (std::size_t n = 0; n < mesh->node_count(); ++n)
    for (int k = 0; k < 6; ++k) u[6 * n + k] = r.displacements[n][k];
  for (auto _ : state) {
    auto s = fea::recover_stresses(*mesh, material::pa6(), u, policy(state));
    benchmark::DoNotOptimize(s.data());
  }
}

void BM_SolveTorsion(benchmark::State& state) {
  const auto sys = fea::assemble(trl_mesh(1.0), material::pa6());
  fea::SolverOptions opt;
  opt.policy = policy(state);
  for (auto _ : state) {
    auto r = fea::solve(sys, fea::LoadCase::torsion(5.0), opt);
    benchmark::DoNotOptimize(r.angular_displacement_deg);
  }
}

void BM_SmallSweep(benchmark::State& state) {
  sweep::SweepPlan plan = sweep::default_trl_plan();
  plan.grid = {2, 4, 8, 16};
  plan.converge.initial_edge_mm = 4.0;
  plan.converge.tolerance = 0.1;
  plan.converge.dof_budget = 60'000;
  plan.parallelism = state.range(0) ? 0 : 1;
  for (auto _ : state) {
    auto t = sweep::run_sweep(plan);
    benchmark::DoNotOptimize(t.rows.data());
  }
}

}  // namespace

BENCHMARK(BM_Assemble)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RecoverStresses)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveTorsion)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SmallSweep)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
