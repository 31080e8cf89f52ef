#pragma once

#include <cstdint>

#include "rsg/problem.hpp"
#include "rsg/sketch.hpp"
#include "rsg/solver_state.hpp"

namespace rsg {

/// Parameters of the randomized subspace gradient method for linear constraints.
struct LcConfig {
  /// Initial step size; every iteration restarts the feasibility loop from h.
  double h = 1.0;
  /// Reduced dimension d; 0 means d = n. Ignored for identity sketches.
  Index d_sub = 0;
  double eps0 = 1e-6;
  double delta1 = 1e-4;
  double eps2 = 1e-6;
  double beta = 0.8;
  std::int64_t max_iters = 1000;
  int max_backtracks = 200;
  GradientMode gradient_mode;
  SketchMode sketch_mode = SketchMode::gaussian;
  std::uint64_t seed = 0;
  bool use_sketched_norms = false;

  /// Effective reduced dimension for a problem of dimension n.
  Index reduced_dim(Index n) const noexcept;
  /// Throws ParameterError on invalid settings.
  void validate(Index n) const;
};

/// delta1 = sqrt(d (1 - eps_jl) / n^2) eps1, the threshold that certifies an
/// eps1-stationary full-space residual under norm preservation.
double delta1_from_eps1(double eps1, Index d, Index n, double eps_jl = 0.5);

/// Deterministic gradient projection: identity sketch with a vanishing eps0.
LcConfig gpm_config(LcConfig base);

/// Sketch used at a given iteration (fresh Gaussian draw or identity).
SketchMatrix iteration_sketch(SketchMode mode, Index n, Index d, std::uint64_t seed,
                              std::int64_t iter);

/// One iteration: sketch, active set, projected direction, optional
/// multiplier-fix direction, feasibility backtracking, update.
/// Throws on rank deficiency or active-set overflow that survives one eps0 halving.
SolverState lc_step(const ProblemSpec& p, const LcConfig& cfg, SolverState st);

/// Iterates lc_step until KKT termination, the iteration cap, stalling or failure.
SolveResult lc_solve(const ProblemSpec& p, const LcConfig& cfg, const TraceSink& sink = {});

}  // namespace rsg
