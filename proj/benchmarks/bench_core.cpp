#include <benchmark/benchmark.h>

#include <random>

#include "rsg/rsg.hpp"

using namespace rsg;

namespace {

Vector normal_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

/// 1/2 x^T Q x + b^T x on the box [-1, 1]^n with a random symmetric Q.
ProblemSpec box_qp(Index n) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  Matrix q(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) q(i, j) = nd(rng);
  q = 0.5 * (q + q.transpose()).eval();
  const Vector b = normal_vector(n, 4);
  ProblemSpec p;
  p.dim = n;
  p.objective.value = [q, b](const Vector& x) { return 0.5 * x.dot(q * x) + b.dot(x); };
  p.objective.gradient = [q, b](const Vector& x) -> Vector { return q * x + b; };
  for (Index i = 0; i < n; ++i) {
    SparseVector up(n), dn(n);
    up.insert(i) = 1.0;
    dn.insert(i) = -1.0;
    p.constraints.push_back(ConstraintFn::linear(up, 1.0));
    p.constraints.push_back(ConstraintFn::linear(dn, 1.0));
  }
  p.x0 = Vector::Zero(n);
  return p;
}

}  // namespace

static void BM_SampleSketch(benchmark::State& state) {
  const Index n = state.range(0), d = state.range(1);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_sketch(n, d, seed++));
}
BENCHMARK(BM_SampleSketch)->Args({200, 50})->Args({200, 200})->Args({1000, 200});

static void BM_SolveMultipliers(benchmark::State& state) {
  const Index d = state.range(0), k = state.range(1);
  Matrix g(d, k);
  for (Index j = 0; j < k; ++j) g.col(j) = normal_vector(d, 10 + j);
  const ActiveSetView a = ActiveSetView::from_sketched(g, 2 * d);
  const Vector grad = normal_vector(d, 99);
  for (auto _ : state) benchmark::DoNotOptimize(solve_multipliers(a, grad));
}
BENCHMARK(BM_SolveMultipliers)->Args({50, 5})->Args({200, 20})->Args({200, 150});

static void BM_LcStep(benchmark::State& state) {
  const ProblemSpec p = box_qp(state.range(0));
  LcConfig cfg;
  cfg.d_sub = state.range(1);
  cfg.h = 0.01;
  SolverState st = initial_state(p);
  for (auto _ : state) {
    st = lc_step(p, cfg, std::move(st));
    if (st.status != SolverStatus::running) {
      state.PauseTiming();
      st = initial_state(p);
      state.ResumeTiming();
    }
  }
}
BENCHMARK(BM_LcStep)->Args({200, 50})->Args({200, 200});

static void BM_SketchedGradient(benchmark::State& state) {
  const ProblemSpec p = box_qp(state.range(0));
  const SketchMatrix s = sample_sketch(p.dim, state.range(1), 5);
  const Vector x = 0.1 * normal_vector(p.dim, 6);
  const GradientMode mode =
      state.range(2) ? GradientMode::directional() : GradientMode::analytic();
  for (auto _ : state) benchmark::DoNotOptimize(sketched_objective_gradient(p, s, x, mode));
}
BENCHMARK(BM_SketchedGradient)->Args({200, 50, 0})->Args({200, 50, 1});

BENCHMARK_MAIN();
