#include "rsg/rsg_lc.hpp"

#include <cmath>
#include <string>

#include "driver_common.hpp"
#include "rsg/errors.hpp"
#include "rsg/projection.hpp"

namespace rsg {

Index LcConfig::reduced_dim(Index n) const noexcept {
  if (sketch_mode == SketchMode::identity || d_sub <= 0) return n;
  return d_sub;
}

void LcConfig::validate(Index n) const {
  if (!(h > 0.0)) throw ParameterError("h must be positive");
  if (!(beta > 0.0 && beta < 1.0)) throw ParameterError("beta must lie in (0,1)");
  if (!(delta1 > 0.0)) throw ParameterError("delta1 must be positive");
  if (!(eps0 > 0.0)) throw ParameterError("eps0 must be positive");
  if (!(eps2 > 0.0)) throw ParameterError("eps2 must be positive");
  if (max_backtracks < 0) throw ParameterError("max_backtracks must be non-negative");
  if (max_iters < 0) throw ParameterError("max_iters must be non-negative");
  if (sketch_mode == SketchMode::gaussian && d_sub > n) {
    throw ParameterError("reduced dimension d=" + std::to_string(d_sub) + " exceeds n=" +
                         std::to_string(n));
  }
}

double delta1_from_eps1(double eps1, Index d, Index n, double eps_jl) {
  const double dd = static_cast<double>(d);
  const double nn = static_cast<double>(n);
  return std::sqrt(dd * (1.0 - eps_jl) / (nn * nn)) * eps1;
}

LcConfig gpm_config(LcConfig base) {
  base.sketch_mode = SketchMode::identity;
  base.eps0 = 1e-300;
  return base;
}

SketchMatrix iteration_sketch(SketchMode mode, Index n, Index d, std::uint64_t seed,
                              std::int64_t iter) {
  if (mode == SketchMode::identity) return SketchMatrix::identity(n);
  return sample_sketch(n, d, derive_seed(seed, static_cast<std::uint64_t>(iter)));
}

SolverState lc_step(const ProblemSpec& p, const LcConfig& cfg, SolverState st) {
  if (st.status != SolverStatus::running) return st;
  const Index n = p.dim;
  const Index d = cfg.reduced_dim(n);

  const SketchMatrix s = iteration_sketch(cfg.sketch_mode, n, d, cfg.seed, st.iter);
  const SketchedGradient grad = sketched_objective_gradient(p, s, st.x, cfg.gradient_mode);
  st.counters.f_evals += grad.value_evals;
  st.counters.grad_evals += grad.gradient_evals;

  struct Attempt {
    ActiveSetView view;
    MultiplierSolve ms;
    double eps0;
  };
  const Attempt at = detail::with_eps0_retry(cfg.eps0, [&](double eps0) {
    st.counters.g_evals += p.num_constraints();
    ActiveSetView view = compute_active_set(p, st.x, eps0, s, cfg.use_sketched_norms);
    MultiplierSolve ms = solve_multipliers(view, grad.value);
    return Attempt{std::move(view), std::move(ms), eps0};
  });

  st.iter += 1;
  st.eps0_used = at.eps0;
  st.active_indices = at.view.indices();
  st.lambda = at.ms.lambda;
  st.lambda_bar.reset();
  st.min_lambda = min_entry(at.ms.lambda);
  st.branch = Branch::dir1;

  Vector dir = direction_projected(at.view, at.ms);
  st.dir_norm = dir.norm();
  if (st.dir_norm <= cfg.delta1) {
    if (st.min_lambda >= -cfg.eps2) {
      st.branch = Branch::terminate;
      st.direction = std::move(dir);
      st.alpha = 0.0;
      st.iter_backtracks = 0;
      st.status = SolverStatus::converged_kkt;
      return st;
    }
    dir = direction_multiplier_fix_lc(at.view, at.ms.lambda, d, n);
    st.branch = Branch::dir2;
    st.dir_norm = dir.norm();
  }

  const Vector step_x = s.apply(dir);
  st.direction = std::move(dir);
  detail::accept_step(p, step_x, cfg.h, cfg.beta, cfg.max_backtracks, st);
  return st;
}

SolveResult lc_solve(const ProblemSpec& p, const LcConfig& cfg, const TraceSink& sink) {
  cfg.validate(p.dim);
  return detail::run_solver(p, cfg.max_iters, cfg.eps0, true, sink,
                            [&](SolverState st) { return lc_step(p, cfg, std::move(st)); });
}

}  // namespace rsg
