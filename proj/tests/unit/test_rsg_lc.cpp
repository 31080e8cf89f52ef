#include <gtest/gtest.h>

#include <vector>

#include "rsg/diagnostics.hpp"
#include "rsg/errors.hpp"
#include "rsg/rsg_lc.hpp"
#include "rsg_harness/problems.hpp"

using namespace rsg;

namespace {

ProblemSpec shifted_quadratic(const Vector& c) {
  ProblemSpec p;
  p.dim = c.size();
  p.objective.value = [c](const Vector& x) { return 0.5 * (x - c).squaredNorm(); };
  p.objective.gradient = [c](const Vector& x) -> Vector { return x - c; };
  p.objective.smoothness = 1.0;
  p.x0 = Vector::Zero(c.size());
  return p;
}

void add_box(ProblemSpec& p, double lo, double hi) {
  for (Index i = 0; i < p.dim; ++i) {
    SparseVector up(p.dim);
    up.insert(i) = 1.0;
    p.constraints.push_back(ConstraintFn::linear(up, hi));
    SparseVector dn(p.dim);
    dn.insert(i) = -1.0;
    p.constraints.push_back(ConstraintFn::linear(dn, -lo));
  }
}

LcConfig identity_config(double h) {
  LcConfig c;
  c.sketch_mode = SketchMode::identity;
  c.h = h;
  return c;
}

std::vector<TraceRecord> collect(const std::function<SolveResult(const TraceSink&)>& run, SolveResult* out) {
  std::vector<TraceRecord> rows;
  *out = run([&](const TraceRecord& r) { rows.push_back(r); });
  return rows;
}

}  // namespace

TEST(LcConfig, Validation) {
  LcConfig c;
  EXPECT_NO_THROW(c.validate(10));
  c.beta = 1.0;
  EXPECT_THROW(c.validate(10), ParameterError);
  c = LcConfig{};
  c.d_sub = 11;
  EXPECT_THROW(c.validate(10), ParameterError);
  c = LcConfig{};
  c.delta1 = 0.0;
  EXPECT_THROW(c.validate(10), ParameterError);
  c = LcConfig{};
  c.h = -1.0;
  EXPECT_THROW(c.validate(10), ParameterError);
}

TEST(LcConfig, ReducedDimDefaults) {
  LcConfig c;
  EXPECT_EQ(c.reduced_dim(30), 30);
  c.d_sub = 7;
  EXPECT_EQ(c.reduced_dim(30), 7);
  c.sketch_mode = SketchMode::identity;
  EXPECT_EQ(c.reduced_dim(30), 30);
}

TEST(LcConfig, Delta1FromEps1) {
  EXPECT_NEAR(delta1_from_eps1(1e-3, 200, 200), std::sqrt(200 * 0.5 / (200.0 * 200.0)) * 1e-3, 1e-18);
  EXPECT_NEAR(delta1_from_eps1(2.0, 50, 100, 0.2), std::sqrt(50 * 0.8) / 100.0 * 2.0, 1e-15);
}

TEST(LcStep, InteriorReducesToGradientDescent) {
  ProblemSpec p = shifted_quadratic((Vector(3) << 0.1, -0.2, 0.3).finished());
  add_box(p, -10.0, 10.0);
  p.x0 = (Vector(3) << 1.0, 2.0, -1.0).finished();
  const LcConfig cfg = identity_config(0.5);
  SolverState st = initial_state(p);
  const Vector grad = p.objective.gradient(p.x0);
  st = lc_step(p, cfg, st);
  EXPECT_TRUE(st.active_indices.empty());
  EXPECT_LE((st.direction + grad).norm(), 1e-15);
  EXPECT_LE((st.x - (p.x0 - 0.5 * grad)).norm(), 1e-15);
  EXPECT_LT(st.f_val, p.objective.value(p.x0));
}

TEST(LcStep, FaceStepKeepsActiveConstraintValue) {
  ProblemSpec p = shifted_quadratic((Vector(2) << 3.0, 1.0).finished());
  p.constraints.push_back(ConstraintFn::linear((Vector(2) << 1.0, 0.0).finished(), 1.0));
  p.x0 = (Vector(2) << 1.0, 0.0).finished();
  const LcConfig cfg = identity_config(0.5);
  SolverState st = initial_state(p);
  st = lc_step(p, cfg, st);
  EXPECT_EQ(st.branch, Branch::dir1);
  EXPECT_EQ(st.direction[0], 0.0);
  EXPECT_EQ(p.constraints[0].value(st.x), p.constraints[0].value(p.x0));
}

TEST(LcStep, NegativeMultiplierTakesSecondDirection) {
  ProblemSpec p;
  p.dim = 2;
  p.objective.value = [](const Vector& x) { return x[0]; };
  p.objective.gradient = [](const Vector&) -> Vector { return Vector::Unit(2, 0); };
  p.constraints.push_back(ConstraintFn::linear((Vector(2) << 1.0, 0.0).finished(), 1.0));
  p.x0 = (Vector(2) << 1.0, 0.0).finished();
  const LcConfig cfg = identity_config(0.25);
  SolverState st = initial_state(p);
  st = lc_step(p, cfg, st);
  EXPECT_EQ(st.branch, Branch::dir2);
  ASSERT_TRUE(st.lambda);
  EXPECT_NEAR((*st.lambda)[0], -1.0, 1e-15);
  EXPECT_LE((st.direction + Vector::Unit(2, 0)).norm(), 1e-15);
  EXPECT_LT(p.constraints[0].value(st.x), 0.0);
  EXPECT_LT(st.f_val, 1.0);
}

TEST(LcSolve, HalflineReachesKktPair) {
  const ProblemSpec p = harness::make_halfline();
  LcConfig cfg = identity_config(1.0);
  cfg.delta1 = 1e-8;
  const SolveResult r = lc_solve(p, cfg);
  EXPECT_EQ(r.state.status, SolverStatus::converged_kkt);
  EXPECT_NEAR(r.state.x[0], -1.0, 1e-12);
  EXPECT_NEAR(r.eta[0], 1.0, 1e-12);
  const KktReport k = kkt_check(p, r.state.x, r.eta, 1e-6, 1e-6, 1e-8);
  EXPECT_TRUE(k.pass());
  EXPECT_LE(k.stationarity, 1e-6);
}

TEST(LcSolve, HalflineGaussianSketch) {
  const ProblemSpec p = harness::make_halfline();
  LcConfig cfg;
  cfg.h = 1.0;
  cfg.delta1 = 1e-8;
  cfg.seed = 3;
  const SolveResult r = lc_solve(p, cfg);
  EXPECT_EQ(r.state.status, SolverStatus::converged_kkt);
  EXPECT_NEAR(r.state.x[0], -1.0, 1e-6);
  EXPECT_LE(kkt_check(p, r.state.x, r.eta, 1e-6, 1e-6, 1e-6).stationarity, 1e-6);
}

TEST(LcSolve, InteriorOptimumHasZeroMultipliers) {
  const Vector c = (Vector(4) << 0.3, -0.5, 0.1, 0.7).finished();
  ProblemSpec p = shifted_quadratic(c);
  add_box(p, -1.0, 1.0);
  LcConfig cfg = identity_config(0.5);
  cfg.delta1 = 1e-10;
  const SolveResult r = lc_solve(p, cfg);
  EXPECT_EQ(r.state.status, SolverStatus::converged_kkt);
  EXPECT_LE((r.state.x - c).norm(), 1e-9);
  EXPECT_EQ(r.eta.norm(), 0.0);
}

TEST(LcSolve, InteriorOptimumGaussian) {
  const Vector c = (Vector(4) << 0.3, -0.5, 0.1, 0.7).finished();
  ProblemSpec p = shifted_quadratic(c);
  add_box(p, -1.0, 1.0);
  LcConfig cfg;
  cfg.h = 4.0;  // n / L
  cfg.delta1 = 1e-10;
  cfg.max_iters = 20000;
  const SolveResult r = lc_solve(p, cfg);
  EXPECT_EQ(r.state.status, SolverStatus::converged_kkt);
  EXPECT_LE((r.state.x - c).norm(), 1e-6);
}

TEST(LcSolve, TerminationPredicate) {
  const ProblemSpec p = harness::make_box_qp(20, 5);
  LcConfig cfg = identity_config(1.0 / *p.objective.smoothness);
  cfg.max_iters = 5000;
  SolveResult r;
  const auto rows = collect([&](const TraceSink& s) { return lc_solve(p, cfg, s); }, &r);
  ASSERT_EQ(r.state.status, SolverStatus::converged_kkt);
  EXPECT_LE(r.state.dir_norm, cfg.delta1);
  EXPECT_GE(r.state.min_lambda, -cfg.eps2);
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    EXPECT_NE(rows[k].branch, Branch::terminate);
    const bool stop = rows[k].dir_norm <= cfg.delta1 && rows[k].min_lambda >= -cfg.eps2;
    if (rows[k].branch == Branch::dir1) {
      EXPECT_FALSE(rows[k].dir_norm <= cfg.delta1);
    }
    EXPECT_FALSE(stop && rows[k].branch == Branch::dir1);
  }
  EXPECT_EQ(rows.back().branch, Branch::terminate);
}

TEST(LcSolve, BoxQpDeterministicKktWithDerivedDelta) {
  const ProblemSpec p = harness::make_box_qp(30, 2);
  LcConfig cfg = identity_config(1.0 / *p.objective.smoothness);
  const double eps1 = 1e-3;
  cfg.delta1 = eps1;  // identity sketch: the sketched residual is the full residual
  cfg.max_iters = 20000;
  const SolveResult r = lc_solve(p, cfg);
  ASSERT_EQ(r.state.status, SolverStatus::converged_kkt);
  const double eps3 = default_complementarity_budget(p, r.state.x, r.eta, cfg.eps0);
  const KktReport k = kkt_check(p, r.state.x, r.eta, eps1, cfg.eps2, eps3);
  EXPECT_TRUE(k.pass()) << "stationarity " << k.stationarity;
}

TEST(LcSolve, FeasibilityAndMonotoneDescent) {
  const ProblemSpec p = harness::make_box_qp(40, 1);
  LcConfig cfg;
  cfg.h = 40.0 / *p.objective.smoothness;
  cfg.max_iters = 1500;
  cfg.seed = 9;
  double prev = p.objective.value(p.x0);
  bool ok = true;
  const SolveResult r = lc_solve(p, cfg, [&](const TraceRecord& t) {
    if (t.branch == Branch::terminate) return;
    ok = ok && t.max_violation <= 1e-12;
    if (t.branch == Branch::dir1 && t.dir_norm > cfg.delta1) ok = ok && t.f <= prev + 1e-12;
    prev = t.f;
  });
  EXPECT_TRUE(ok);
  EXPECT_LE(max_violation(p, r.state.x), 1e-12);
  EXPECT_NE(r.state.status, SolverStatus::stalled);
  EXPECT_NE(r.state.status, SolverStatus::failed);
}

TEST(LcSolve, StallsWhenBacktrackingExhausted) {
  ProblemSpec p = shifted_quadratic((Vector(2) << 5.0, 0.0).finished());
  add_box(p, -1.0, 1.0);
  LcConfig cfg = identity_config(100.0);
  cfg.max_backtracks = 0;
  const SolveResult r = lc_solve(p, cfg);
  EXPECT_EQ(r.state.status, SolverStatus::stalled);
  EXPECT_EQ(r.state.iter, 1);
  EXPECT_EQ(r.state.x, p.x0);
}

TEST(LcSolve, PersistentRankDeficiencyFailsRun) {
  ProblemSpec p = shifted_quadratic((Vector(2) << 5.0, 0.0).finished());
  const Vector a = (Vector(2) << 1.0, 0.0).finished();
  p.constraints.push_back(ConstraintFn::linear(a, 0.0));
  p.constraints.push_back(ConstraintFn::linear(Vector(2.0 * a), 0.0));
  const SolveResult r = lc_solve(p, identity_config(0.5));
  EXPECT_EQ(r.state.status, SolverStatus::failed);
  EXPECT_NE(r.state.message.find("rank"), std::string::npos);
  EXPECT_EQ(r.state.x, p.x0);
}

TEST(LcSolve, InfeasibleStartRejected) {
  ProblemSpec p = shifted_quadratic(Vector::Zero(2));
  add_box(p, -1.0, 1.0);
  p.x0 = Vector::Constant(2, 2.0);
  EXPECT_THROW(lc_solve(p, identity_config(1.0)), InfeasibleStartError);
}

TEST(LcSolve, DirectionalDifferenceCounters) {
  const ProblemSpec p = harness::make_box_qp(20, 4);
  LcConfig cfg;
  cfg.d_sub = 5;
  cfg.h = 0.1;
  cfg.max_iters = 30;
  cfg.gradient_mode = GradientMode::directional();
  const SolveResult r = lc_solve(p, cfg);
  EXPECT_EQ(r.state.counters.f_evals, r.state.iter * (cfg.d_sub + 1));
  EXPECT_EQ(r.state.counters.grad_evals, 0);
}

TEST(LcSolve, GpmMatchesHandComputedFaceSteps) {
  // min 1/2 |x - (3, 0.5)|^2 s.t. x1 <= 1 from (1, 0): each step moves x2 by h (0.5 - x2).
  ProblemSpec p = shifted_quadratic((Vector(2) << 3.0, 0.5).finished());
  p.constraints.push_back(ConstraintFn::linear((Vector(2) << 1.0, 0.0).finished(), 1.0));
  p.x0 = (Vector(2) << 1.0, 0.0).finished();
  LcConfig base;
  base.h = 0.5;
  const LcConfig cfg = gpm_config(base);
  EXPECT_EQ(cfg.sketch_mode, SketchMode::identity);
  EXPECT_EQ(cfg.eps0, 1e-300);
  SolverState st = initial_state(p);
  double x2 = 0.0;
  for (int k = 0; k < 5; ++k) {
    st = lc_step(p, cfg, st);
    x2 += 0.5 * (0.5 - x2);
    EXPECT_NEAR(st.x[0], 1.0, 1e-12);
    EXPECT_NEAR(st.x[1], x2, 1e-12);
  }
}

TEST(LcSolve, SameSeedSameTrajectory) {
  const ProblemSpec p = harness::make_box_qp(15, 6);
  LcConfig cfg;
  cfg.h = 15.0 / *p.objective.smoothness;
  cfg.max_iters = 200;
  cfg.seed = 42;
  std::vector<TraceRecord> a, b;
  lc_solve(p, cfg, [&](const TraceRecord& r) { a.push_back(r); });
  lc_solve(p, cfg, [&](const TraceRecord& r) { b.push_back(r); });
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].f, b[k].f);
    EXPECT_EQ(a[k].dir_norm, b[k].dir_norm);
    EXPECT_EQ(a[k].alpha, b[k].alpha);
  }
}
