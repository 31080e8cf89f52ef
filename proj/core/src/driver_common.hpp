#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>

#include "rsg/diagnostics.hpp"
#include "rsg/errors.hpp"
#include "rsg/projection.hpp"
#include "rsg/rsg_lc.hpp"

namespace rsg::detail {

struct FeasibleStep {
  bool found = false;
  double alpha = 0.0;
  Vector x;
  double f = 0.0;
  double max_violation = 0.0;
  int backtracks = 0;
};

/// alpha = h, h beta, h beta^2, ... until every g_i(x + alpha step) <= 0 and the
/// objective there is finite. At most `max_backtracks` reductions.
inline FeasibleStep backtrack_feasible(const ProblemSpec& p, const Vector& x, const Vector& step,
                                       double h, double beta, int max_backtracks,
                                       SolverCounters& counters) {
  FeasibleStep out;
  double alpha = h;
  for (int k = 0; k <= max_backtracks; ++k) {
    if (k > 0) {
      alpha *= beta;
      ++counters.backtracks;
      ++out.backtracks;
    }
    const Vector trial = x + alpha * step;
    double worst = -std::numeric_limits<double>::infinity();
    bool feasible = true;
    for (const auto& c : p.constraints) {
      const double g = c.value(trial);
      ++counters.g_evals;
      if (!std::isfinite(g) || g > 0.0) {
        feasible = false;
        break;
      }
      worst = std::max(worst, g);
    }
    if (!feasible) continue;
    const double f = p.objective.value(trial);
    ++counters.monitor_f_evals;
    if (!std::isfinite(f)) continue;
    out.found = true;
    out.alpha = alpha;
    out.x = trial;
    out.f = f;
    out.max_violation = worst;
    return out;
  }
  return out;
}

/// Runs `attempt(eps0)`; on rank deficiency or overflow retries once with eps0 / 2.
template <class Attempt>
auto with_eps0_retry(double eps0, Attempt&& attempt) -> decltype(attempt(eps0)) {
  try {
    return attempt(eps0);
  } catch (const RankDeficiencyError&) {
  } catch (const ActiveSetOverflowError&) {
  }
  return attempt(eps0 / 2.0);
}

/// Accepts the feasible trial point or marks the state stalled.
inline void accept_step(const ProblemSpec& p, const Vector& step_x, double h, double beta,
                        int max_backtracks, SolverState& st) {
  FeasibleStep fs = backtrack_feasible(p, st.x, step_x, h, beta, max_backtracks, st.counters);
  st.iter_backtracks = fs.backtracks;
  if (!fs.found) {
    st.alpha = 0.0;
    st.status = SolverStatus::stalled;
    st.message = "feasibility backtracking exhausted";
    return;
  }
  st.alpha = fs.alpha;
  st.x = std::move(fs.x);
  st.f_val = fs.f;
  st.max_violation = fs.max_violation;
}

/// Shared outer loop of both drivers.
template <class Step>
SolveResult run_solver(const ProblemSpec& p, std::int64_t max_iters, double eps0, bool kkt_eta_from_lambda,
                       const TraceSink& sink, Step&& step) {
  validate_problem(p);
  const auto start = std::chrono::steady_clock::now();
  SolverState st = initial_state(p);
  while (st.status == SolverStatus::running) {
    if (st.iter >= max_iters) {
      st.status = SolverStatus::max_iters;
      break;
    }
    try {
      // Copy so that a throwing step leaves the last accepted iterate intact.
      st = step(SolverState(st));
    } catch (const Error& e) {
      st.status = SolverStatus::failed;
      st.message = e.what();
      break;
    }
    if (sink) {
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      sink(make_trace_record(st, ms));
    }
  }

  SolveResult result;
  if (st.status == SolverStatus::converged_kkt && kkt_eta_from_lambda && st.lambda) {
    result.eta = embed_multipliers(*st.lambda, st.active_indices, p.num_constraints());
  } else {
    result.eta = estimate_multipliers(p, st.x, eps0);
  }
  result.state = std::move(st);
  return result;
}

}  // namespace rsg::detail
