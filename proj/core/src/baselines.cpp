#include "rsg/baselines.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "rsg/diagnostics.hpp"
#include "rsg/errors.hpp"

namespace rsg {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kBoundMatchTol = 1e-12;

struct CoordinateBounds {
  Vector lower;
  Vector upper;
};

/// Reads single-coordinate linear constraints a x_i - b <= 0 into bounds.
CoordinateBounds collect_bounds(const ProblemSpec& p) {
  const double inf = std::numeric_limits<double>::infinity();
  CoordinateBounds cb{Vector::Constant(p.dim, -inf), Vector::Constant(p.dim, inf)};
  for (Index c = 0; c < p.num_constraints(); ++c) {
    const ConstraintFn& g = p.constraints[static_cast<std::size_t>(c)];
    if (!g.is_linear() || g.coefficients().nonZeros() != 1) {
      throw ParameterError("constraint " + std::to_string(c) + " is not a coordinate bound");
    }
    SparseVector::InnerIterator it(g.coefficients());
    const Index i = it.index();
    const double a = it.value();
    if (a == 0.0) throw ParameterError("constraint " + std::to_string(c) + " has a zero coefficient");
    const double bound = g.offset() / a;
    double& slot = a > 0.0 ? cb.upper[i] : cb.lower[i];
    if (std::isfinite(slot)) {
      throw ParameterError("coordinate " + std::to_string(i) + " is bounded twice on one side");
    }
    slot = bound;
  }
  return cb;
}

bool bounds_equal(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= kBoundMatchTol * (1.0 + std::abs(a));
}

void match_bounds(const ProblemSpec& p, const Vector& lower, const Vector& upper) {
  const CoordinateBounds cb = collect_bounds(p);
  for (Index i = 0; i < p.dim; ++i) {
    if (!bounds_equal(cb.lower[i], lower[i]) || !bounds_equal(cb.upper[i], upper[i])) {
      throw ParameterError("constraints do not match the set at coordinate " + std::to_string(i));
    }
  }
}

void match_ball(const ProblemSpec& p, double radius_sq) {
  if (p.num_constraints() != 1) throw ParameterError("ball set needs exactly one constraint");
  const ConstraintFn& g = p.constraints.front();
  std::mt19937_64 rng(0x5eedba11ULL);
  std::normal_distribution<double> normal;
  const double r = std::sqrt(radius_sq);
  for (int probe = 0; probe < 8; ++probe) {
    Vector u(p.dim);
    for (Index i = 0; i < p.dim; ++i) u[i] = normal(rng);
    u.normalize();
    for (double scale : {0.5, 0.99, 1.01, 2.0}) {
      const double v = g.value(scale * r * u);
      if ((scale < 1.0) != (v < 0.0)) {
        throw ParameterError("constraint does not describe a ball of the given radius");
      }
    }
  }
}

}  // namespace

void validate_set(const SimpleSet& set) {
  std::visit(Overloaded{
                 [](const Box& b) {
                   if (b.lower.size() != b.upper.size()) {
                     throw DimensionError("box bounds have different lengths");
                   }
                   if ((b.lower.array() > b.upper.array()).any()) {
                     throw ParameterError("box lower bound exceeds upper bound");
                   }
                 },
                 [](const L2Ball& b) {
                   if (!(b.radius_sq > 0.0)) throw ParameterError("radius_sq must be positive");
                 },
                 [](const NonNeg&) {},
             },
             set);
}

Vector project(const SimpleSet& set, const Vector& x) {
  return std::visit(Overloaded{
                        [&](const Box& b) -> Vector {
                          if (b.lower.size() != x.size()) throw DimensionError("box dimension mismatch");
                          return x.cwiseMax(b.lower).cwiseMin(b.upper);
                        },
                        [&](const L2Ball& b) -> Vector {
                          const double norm_sq = x.squaredNorm();
                          if (norm_sq <= b.radius_sq) return x;
                          return x * std::sqrt(b.radius_sq / norm_sq);
                        },
                        [&](const NonNeg&) -> Vector { return x.cwiseMax(0.0); },
                    },
                    set);
}

void check_set_matches(const ProblemSpec& p, const SimpleSet& set) {
  validate_set(set);
  std::visit(Overloaded{
                 [&](const Box& b) {
                   if (b.lower.size() != p.dim) throw DimensionError("box dimension mismatch");
                   match_bounds(p, b.lower, b.upper);
                 },
                 [&](const L2Ball& b) { match_ball(p, b.radius_sq); },
                 [&](const NonNeg&) {
                   match_bounds(p, Vector::Zero(p.dim),
                                Vector::Constant(p.dim, std::numeric_limits<double>::infinity()));
                 },
             },
             set);
}

SolveResult pgd_solve(const ProblemSpec& p, const SimpleSet& set, double step,
                      std::int64_t max_iters, const TraceSink& sink) {
  validate_problem(p);
  check_set_matches(p, set);
  if (!p.objective.has_gradient()) throw MissingGradientError();
  if (!(step > 0.0)) throw ParameterError("step must be positive");

  const auto start = std::chrono::steady_clock::now();
  SolverState st = initial_state(p);
  st.min_lambda = std::numeric_limits<double>::infinity();
  while (st.status == SolverStatus::running) {
    if (st.iter >= max_iters) {
      st.status = SolverStatus::max_iters;
      break;
    }
    const Vector grad = p.objective.gradient(st.x);
    ++st.counters.grad_evals;
    Vector next = project(set, st.x - step * grad);
    st.direction = next - st.x;
    st.dir_norm = st.direction.norm();
    st.x = std::move(next);
    st.f_val = p.objective.value(st.x);
    ++st.counters.monitor_f_evals;
    st.alpha = step;
    st.iter += 1;
    st.branch = Branch::dir1;

    st.active_indices.clear();
    st.max_violation = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < p.num_constraints(); ++i) {
      const double g = p.constraints[static_cast<std::size_t>(i)].value(st.x);
      st.max_violation = std::max(st.max_violation, g);
      if (g >= -kPgdActiveTol) st.active_indices.push_back(i);
    }
    st.counters.g_evals += p.num_constraints();

    if (!std::isfinite(st.f_val)) {
      st.status = SolverStatus::failed;
      st.message = "objective became non-finite";
    } else if (st.dir_norm <= kPgdStepTol) {
      st.status = SolverStatus::converged_step;
    }
    if (sink) {
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      sink(make_trace_record(st, ms));
    }
  }

  SolveResult result;
  result.eta = estimate_multipliers(p, st.x, 1e-6);
  result.state = std::move(st);
  return result;
}

}  // namespace rsg
