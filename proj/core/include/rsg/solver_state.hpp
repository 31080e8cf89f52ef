#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rsg/problem.hpp"
#include "rsg/types.hpp"

namespace rsg {

enum class SolverStatus { running, converged_kkt, converged_step, max_iters, stalled, failed };

enum class Branch { dir1, dir2, terminate };

std::string_view to_string(SolverStatus status) noexcept;
std::string_view to_string(Branch branch) noexcept;

struct SolverCounters {
  /// Objective value evaluations spent by the gradient oracle.
  std::int64_t f_evals = 0;
  /// Objective gradient evaluations.
  std::int64_t grad_evals = 0;
  /// Individual constraint evaluations (active-set scans and feasibility probes).
  std::int64_t g_evals = 0;
  /// Step-size reductions in the feasibility loop.
  std::int64_t backtracks = 0;
  /// Objective evaluations made only to monitor f at accepted iterates.
  std::int64_t monitor_f_evals = 0;
};

/// Iterate and bookkeeping carried between solver steps.
struct SolverState {
  Vector x;
  std::int64_t iter = 0;
  double f_val = 0.0;
  /// Orthogonal multipliers of the last iteration, aligned with `active_indices`.
  std::optional<Vector> lambda;
  /// Oblique multipliers of the last direction-1 step (nonlinear driver).
  std::optional<Vector> lambda_bar;
  std::vector<Index> active_indices;
  Vector direction;
  double alpha = 0.0;
  SolverCounters counters;
  SolverStatus status = SolverStatus::running;
  std::string message;

  // Diagnostics of the most recent iteration.
  Branch branch = Branch::dir1;
  double dir_norm = 0.0;
  double min_lambda = 0.0;
  int iter_backtracks = 0;
  double max_violation = 0.0;
  double eps0_used = 0.0;
};

/// One row of the per-iteration trace.
struct TraceRecord {
  std::int64_t iter = 0;
  double f = 0.0;
  double dir_norm = 0.0;
  double min_lambda = 0.0;
  std::int64_t active_size = 0;
  double alpha = 0.0;
  std::int64_t backtracks = 0;
  double max_violation = 0.0;
  std::int64_t f_evals_cum = 0;
  double wall_ms_cum = 0.0;
  Branch branch = Branch::dir1;
};

using TraceSink = std::function<void(const TraceRecord&)>;

/// State at x0 with f(x0) evaluated (counted as a monitor evaluation).
SolverState initial_state(const ProblemSpec& p);

TraceRecord make_trace_record(const SolverState& st, double wall_ms_cum);

struct SolveResult {
  SolverState state;
  /// Multipliers embedded into R^m (zero outside the final active set).
  Vector eta;
};

}  // namespace rsg
