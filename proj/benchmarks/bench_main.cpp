#include <benchmark/benchmark.h>

#include "stc/hole_optimizer.hpp"
#include "stc/one_dim.hpp"
#include "stc/shape_derivative.hpp"
#include "stc/trace_solver.hpp"

namespace {

using namespace stc;

double resolution_for(const benchmark::State& state) { return 1.0 / static_cast<double>(state.range(0)); }

void BM_MeshDisk(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(generate_mesh(Disk{1.0}, resolution_for(state)));
}
BENCHMARK(BM_MeshDisk)->Arg(10)->Arg(20)->Arg(40);

void BM_QuotientGradient(benchmark::State& state) {
  const Mesh m = generate_mesh(Disk{1.0}, resolution_for(state));
  ProblemConfig cfg;
  cfg.p = 3.0;
  const Field u(m.num_vertices(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(quotient_gradient(m, cfg, u));
  state.counters["vertices"] = static_cast<double>(m.num_vertices());
}
BENCHMARK(BM_QuotientGradient)->Arg(10)->Arg(20)->Arg(40);

void BM_TraceSolve(benchmark::State& state) {
  const Mesh m = generate_mesh(Disk{1.0}, resolution_for(state));
  const BoundaryHole hole = make_hole_from_arc(m, 0.0, 0.25 * m.boundary_measure());
  const ProblemConfig cfg;
  int iterations = 0;
  for (auto _ : state) {
    const TraceResult r = solve_trace_constant(m, cfg, hole);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.s_value);
  }
  state.counters["descent_iterations"] = iterations;
}
BENCHMARK(BM_TraceSolve)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_ShapeDerivative(benchmark::State& state) {
  const Mesh m = generate_mesh(Disk{1.0}, 0.05);
  const double P = m.boundary_measure();
  const ProblemConfig cfg;
  const BoundaryHole hole = make_hole_from_arc(m, 0.0, 0.25 * P);
  const TraceResult base = solve_trace_constant(m, cfg, hole);
  const TangentialField V = TangentialField::tube(m, periodic_bump(0.25 * P, 0.3, P));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_shape_derivative(m, cfg, hole, V, base).ds_dt);
}
BENCHMARK(BM_ShapeDerivative)->Unit(benchmark::kMillisecond);

void BM_LimitSolve(benchmark::State& state) {
  OneDimProblem pr;
  pr.cfg.p = static_cast<double>(state.range(1));
  pr.cfg.q = pr.cfg.p;
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_limit_problem(pr, 0.0, 0.5, n).value);
}
BENCHMARK(BM_LimitSolve)->Args({250, 2})->Args({1000, 2})->Args({250, 3})->Unit(benchmark::kMillisecond);

void BM_AlternatingOptimizer(benchmark::State& state) {
  const Mesh m = generate_mesh(Disk{1.0}, resolution_for(state));
  const ProblemConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(optimize_hole_alternating(m, cfg, 0.25).best_value);
}
BENCHMARK(BM_AlternatingOptimizer)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
