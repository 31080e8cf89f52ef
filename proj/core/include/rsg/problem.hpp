#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rsg/sketch.hpp"
#include "rsg/types.hpp"

namespace rsg {

using ScalarFn = std::function<double(const Vector&)>;
using GradientFn = std::function<Vector(const Vector&)>;

/// One inequality constraint g(x) <= 0 with an analytic gradient.
///
/// Linear constraints keep their coefficients as a sparse vector so that box
/// and sign constraints cost O(1) per evaluation.
class ConstraintFn {
 public:
  enum class Kind { linear, smooth_nonlinear };

  /// g(x) = a^T x - b.
  static ConstraintFn linear(SparseVector a, double b);
  static ConstraintFn linear(const Vector& a, double b);
  static ConstraintFn smooth(ScalarFn value, GradientFn gradient);

  Kind kind() const noexcept { return kind_; }
  bool is_linear() const noexcept { return kind_ == Kind::linear; }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  /// Gradient as a sparse column (exact sparsity for linear constraints).
  SparseVector sparse_gradient(const Vector& x) const;
  double gradient_norm(const Vector& x) const;

  /// Linear constraints only.
  const SparseVector& coefficients() const noexcept { return a_; }
  double offset() const noexcept { return b_; }

 private:
  ConstraintFn() = default;

  Kind kind_ = Kind::linear;
  SparseVector a_;
  double b_ = 0.0;
  double a_norm_ = 0.0;
  ScalarFn value_;
  GradientFn gradient_;
};

struct ObjectiveOracle {
  ScalarFn value;
  /// Optional; directional finite differences work without it.
  GradientFn gradient;
  /// Optional smoothness constant L, used for step-size presets only.
  std::optional<double> smoothness;

  bool has_gradient() const noexcept { return static_cast<bool>(gradient); }
};

/// min f(x) s.t. g_i(x) <= 0, i = 1..m, started from a feasible x0.
struct ProblemSpec {
  std::string name;
  Index dim = 0;
  ObjectiveOracle objective;
  std::vector<ConstraintFn> constraints;
  Vector x0;

  Index num_constraints() const noexcept { return static_cast<Index>(constraints.size()); }
};

/// Absolute tolerance on g_i(x0) accepted at load time.
inline constexpr double kStartFeasibilityTol = 1e-12;

/// Checks dimensions and that x0 is feasible; throws otherwise.
void validate_problem(const ProblemSpec& p);

struct GradientMode {
  enum class Kind { analytic, directional_fd };
  enum class Scheme { forward, central };

  Kind kind = Kind::analytic;
  Scheme scheme = Scheme::forward;
  /// Absolute step scale; the step along column m_j is t_abs (1+|x|) / max(|m_j|, norm_floor).
  double t_abs = 1e-6;
  double norm_floor = 1e-12;

  static GradientMode analytic() { return {}; }
  static GradientMode directional(double t_abs = 1e-6, Scheme scheme = Scheme::forward) {
    GradientMode m;
    m.kind = Kind::directional_fd;
    m.scheme = scheme;
    m.t_abs = t_abs;
    return m;
  }
};

struct SketchedGradient {
  /// M^T grad f(x), exact or estimated.
  Vector value;
  /// Objective value evaluations consumed (d+1 forward, 2d central, 0 analytic).
  Index value_evals = 0;
  /// Objective gradient evaluations consumed (1 analytic, 0 otherwise).
  Index gradient_evals = 0;
  /// f(x) when the oracle evaluated it as a by-product.
  std::optional<double> f_at_x;
};

SketchedGradient sketched_objective_gradient(const ProblemSpec& p, const SketchMatrix& s,
                                             const Vector& x, const GradientMode& mode);

/// max_i g_i(x); -infinity when there are no constraints. NaN values count as +infinity.
double max_violation(const ProblemSpec& p, const Vector& x);

struct OracleReport {
  double objective_deviation = 0.0;
  std::vector<double> constraint_deviation;
  double tolerance = 1e-5;
  bool pass = true;
};

/// Compares central-difference directional derivatives with the analytic
/// gradients of f and every g_i at `num_probes` random feasible points.
/// Deviations are relative to |grad| |u| for unit probe directions u.
OracleReport check_oracle_consistency(const ProblemSpec& p, int num_probes, std::uint64_t seed,
                                      double tolerance = 1e-5);

/// Random feasible point obtained by backtracking from x0 along a random direction.
Vector random_feasible_point(const ProblemSpec& p, std::uint64_t seed, double radius = 1.0);

}  // namespace rsg
