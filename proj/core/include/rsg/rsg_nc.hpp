#pragma once

#include "rsg/rsg_lc.hpp"

namespace rsg {

/// Parameters of the randomized subspace gradient method for nonlinear constraints.
struct NcConfig : LcConfig {
  /// Scale r in mu = r / sqrt(s^T (G_sk^T G_sk)^{-1} s); must lie in (0, 0.5].
  double mu_scale = 0.5;
  /// Check the oblique-direction sandwich bounds at every direction-1 step.
  bool verify_oblique_bounds = false;

  void validate(Index n) const;
};

SolverState nc_step(const ProblemSpec& p, const NcConfig& cfg, SolverState st);

/// On KKT termination eta embeds the orthogonal multipliers, not the oblique ones.
SolveResult nc_solve(const ProblemSpec& p, const NcConfig& cfg, const TraceSink& sink = {});

}  // namespace rsg
