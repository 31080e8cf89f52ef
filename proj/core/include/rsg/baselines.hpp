#pragma once

#include <cstdint>
#include <variant>

#include "rsg/problem.hpp"
#include "rsg/solver_state.hpp"
#include "rsg/types.hpp"

namespace rsg {

struct Box {
  Vector lower;
  Vector upper;
};

struct L2Ball {
  double radius_sq = 1.0;
};

struct NonNeg {};

/// A set with a closed-form Euclidean projection.
using SimpleSet = std::variant<Box, L2Ball, NonNeg>;

/// Throws ParameterError on lower > upper or radius_sq <= 0.
void validate_set(const SimpleSet& set);

Vector project(const SimpleSet& set, const Vector& x);

/// Throws ParameterError unless the constraints of `p` describe exactly `set`.
/// Linear constraints are matched structurally; the ball is matched by sign
/// agreement of g on probe points inside and outside the sphere.
void check_set_matches(const ProblemSpec& p, const SimpleSet& set);

/// Constraints whose value is within this distance of zero are counted as
/// active in PGD traces.
inline constexpr double kPgdActiveTol = 1e-10;

/// Stops when |x_{k+1} - x_k| <= this.
inline constexpr double kPgdStepTol = 1e-10;

/// x <- project(set, x - step grad f(x)). Needs an analytic objective gradient.
SolveResult pgd_solve(const ProblemSpec& p, const SimpleSet& set, double step,
                      std::int64_t max_iters, const TraceSink& sink = {});

}  // namespace rsg
