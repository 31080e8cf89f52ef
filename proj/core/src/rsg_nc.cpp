#include "rsg/rsg_nc.hpp"

#include <cmath>
#include <cstdio>

#include "driver_common.hpp"
#include "rsg/errors.hpp"
#include "rsg/projection.hpp"

namespace rsg {

namespace {

constexpr double kGradNormFloor = 1e-300;
constexpr double kBoundsTol = 1e-8;

/// Oblique direction R g against the orthogonal one Z g:
/// (2/3)|Zg|^2 <= <g,Rg> <= 2|Zg|^2 and |Zg|^2 <= |Rg|^2 <= 2|Zg|^2.
void verify_oblique_bounds(const ActiveSetView& view, const Vector& grad_sk, const Vector& dir) {
  const MultiplierSolve ms = solve_multipliers(view, grad_sk);
  const double z2 = ms.residual_sk.squaredNorm();
  const double inner = -grad_sk.dot(dir);
  const double r2 = dir.squaredNorm();
  // Near a KKT point Zg is a small difference of O(|g|) terms, so rounding scales with |g|^2.
  const double slack = kBoundsTol * z2 + 1e-13 * grad_sk.squaredNorm();
  const bool ok = inner >= (2.0 / 3.0) * z2 - slack && inner <= 2.0 * z2 + slack &&
                  r2 >= z2 - slack && r2 <= 2.0 * z2 + slack;
  if (!ok) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "oblique direction violates its sandwich bounds: |Zg|^2 = %.3e, <g,Rg> = %.3e, |Rg|^2 = %.3e", z2, inner, r2);
    throw NumericalAnomalyError(buf);
  }
}

}  // namespace

void NcConfig::validate(Index n) const {
  LcConfig::validate(n);
  if (!(mu_scale > 0.0 && mu_scale <= 0.5)) throw ParameterError("mu_scale must lie in (0, 0.5]");
}

SolverState nc_step(const ProblemSpec& p, const NcConfig& cfg, SolverState st) {
  if (st.status != SolverStatus::running) return st;
  const Index n = p.dim;
  const Index d = cfg.reduced_dim(n);

  const SketchMatrix s = iteration_sketch(cfg.sketch_mode, n, d, cfg.seed, st.iter);
  const SketchedGradient grad = sketched_objective_gradient(p, s, st.x, cfg.gradient_mode);
  st.counters.f_evals += grad.value_evals;
  st.counters.grad_evals += grad.gradient_evals;
  const Vector& g = grad.value;

  struct Attempt {
    ActiveSetView view;
    double eps0;
  };
  const Attempt at = detail::with_eps0_retry(cfg.eps0, [&](double eps0) {
    st.counters.g_evals += p.num_constraints();
    ActiveSetView view = compute_active_set(p, st.x, eps0, s, cfg.use_sketched_norms);
    if (!view.empty()) (void)view.least_squares(g);  // surfaces rank deficiency here
    return Attempt{std::move(view), eps0};
  });
  const ActiveSetView& view = at.view;

  st.iter += 1;
  st.eps0_used = at.eps0;
  st.active_indices = view.indices();
  st.lambda.reset();
  st.lambda_bar.reset();
  st.branch = Branch::dir1;
  st.min_lambda = std::numeric_limits<double>::infinity();

  Vector dir;
  if (view.empty()) {
    dir = -g;
  } else if (g.norm() <= kGradNormFloor) {
    dir = Vector::Zero(g.size());
  } else {
    const double mu = compute_mu(view, cfg.mu_scale);
    const ObliqueMultipliers ob = solve_oblique_multipliers(view, g, mu);
    dir = direction_oblique(view, g, ob.lambda_bar);
    if (cfg.verify_oblique_bounds) verify_oblique_bounds(view, g, dir);
    st.min_lambda = min_entry(ob.lambda_bar);
    st.lambda_bar = ob.lambda_bar;
  }
  st.dir_norm = dir.norm();

  if (st.dir_norm < cfg.delta1) {
    const MultiplierSolve ms = solve_multipliers(view, g);
    st.lambda = ms.lambda;
    st.min_lambda = min_entry(ms.lambda);
    if (st.min_lambda >= -cfg.eps2) {
      st.branch = Branch::terminate;
      st.direction = std::move(dir);
      st.alpha = 0.0;
      st.iter_backtracks = 0;
      st.status = SolverStatus::converged_kkt;
      return st;
    }
    const Vector dbar = select_dbar(ms.lambda, cfg.eps2);
    dir = direction_multiplier_fix_nc(view, dbar, cfg.eps2, d, n);
    st.branch = Branch::dir2;
    st.dir_norm = dir.norm();
  }

  const Vector step_x = s.apply(dir);
  st.direction = std::move(dir);
  detail::accept_step(p, step_x, cfg.h, cfg.beta, cfg.max_backtracks, st);
  return st;
}

SolveResult nc_solve(const ProblemSpec& p, const NcConfig& cfg, const TraceSink& sink) {
  cfg.validate(p.dim);
  return detail::run_solver(p, cfg.max_iters, cfg.eps0, true, sink,
                            [&](SolverState st) { return nc_step(p, cfg, std::move(st)); });
}

}  // namespace rsg
