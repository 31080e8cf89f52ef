#include "rsg/solver_state.hpp"

namespace rsg {

std::string_view to_string(SolverStatus status) noexcept {
  switch (status) {
    case SolverStatus::running: return "running";
    case SolverStatus::converged_kkt: return "converged_kkt";
    case SolverStatus::converged_step: return "converged_step";
    case SolverStatus::max_iters: return "max_iters";
    case SolverStatus::stalled: return "stalled";
    case SolverStatus::failed: return "failed";
  }
  return "unknown";
}

std::string_view to_string(Branch branch) noexcept {
  switch (branch) {
    case Branch::dir1: return "dir1";
    case Branch::dir2: return "dir2";
    case Branch::terminate: return "terminate";
  }
  return "unknown";
}

SolverState initial_state(const ProblemSpec& p) {
  SolverState st;
  st.x = p.x0;
  st.f_val = p.objective.value(p.x0);
  st.counters.monitor_f_evals = 1;
  st.max_violation = max_violation(p, p.x0);
  st.counters.g_evals = p.num_constraints();
  return st;
}

TraceRecord make_trace_record(const SolverState& st, double wall_ms_cum) {
  TraceRecord r;
  r.iter = st.iter;
  r.f = st.f_val;
  r.dir_norm = st.dir_norm;
  r.min_lambda = st.min_lambda;
  r.active_size = static_cast<std::int64_t>(st.active_indices.size());
  r.alpha = st.alpha;
  r.backtracks = st.iter_backtracks;
  r.max_violation = st.max_violation;
  r.f_evals_cum = st.counters.f_evals;
  r.wall_ms_cum = wall_ms_cum;
  r.branch = st.branch;
  return r;
}

}  // namespace rsg
