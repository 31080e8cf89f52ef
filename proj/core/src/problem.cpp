#include "rsg/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "rsg/errors.hpp"

namespace rsg {

ConstraintFn ConstraintFn::linear(SparseVector a, double b) {
  ConstraintFn c;
  c.kind_ = Kind::linear;
  c.a_ = std::move(a);
  c.b_ = b;
  c.a_norm_ = c.a_.norm();
  return c;
}

ConstraintFn ConstraintFn::linear(const Vector& a, double b) {
  return linear(SparseVector(a.sparseView()), b);
}

ConstraintFn ConstraintFn::smooth(ScalarFn value, GradientFn gradient) {
  if (!value || !gradient) throw ParameterError("smooth constraint needs value and gradient");
  ConstraintFn c;
  c.kind_ = Kind::smooth_nonlinear;
  c.value_ = std::move(value);
  c.gradient_ = std::move(gradient);
  return c;
}

double ConstraintFn::value(const Vector& x) const {
  if (kind_ == Kind::linear) {
    if (a_.size() != x.size()) throw DimensionError("linear constraint dimension mismatch");
    return a_.dot(x) - b_;
  }
  return value_(x);
}

Vector ConstraintFn::gradient(const Vector& x) const {
  if (kind_ == Kind::linear) return Vector(a_);
  return gradient_(x);
}

SparseVector ConstraintFn::sparse_gradient(const Vector& x) const {
  if (kind_ == Kind::linear) return a_;
  return gradient_(x).sparseView();
}

double ConstraintFn::gradient_norm(const Vector& x) const {
  if (kind_ == Kind::linear) return a_norm_;
  return gradient_(x).norm();
}

void validate_problem(const ProblemSpec& p) {
  if (p.dim < 1) throw DimensionError("problem dimension must be positive");
  if (p.x0.size() != p.dim) throw DimensionError("x0 has wrong length");
  if (!p.objective.value) throw ParameterError("objective oracle has no value function");
  const double v = max_violation(p, p.x0);
  if (v > kStartFeasibilityTol) throw InfeasibleStartError(v);
}

SketchedGradient sketched_objective_gradient(const ProblemSpec& p, const SketchMatrix& s,
                                             const Vector& x, const GradientMode& mode) {
  if (s.ambient_dim() != p.dim) throw DimensionError("sketch and problem dimensions differ");
  if (x.size() != p.dim) throw DimensionError("point has wrong length");

  SketchedGradient out;
  if (mode.kind == GradientMode::Kind::analytic) {
    if (!p.objective.has_gradient()) throw MissingGradientError();
    out.value = s.apply_transpose(p.objective.gradient(x));
    out.gradient_evals = 1;
    return out;
  }

  const Index d = s.reduced_dim();
  const double scale = mode.t_abs * (1.0 + x.norm());
  out.value.resize(d);
  if (mode.scheme == GradientMode::Scheme::forward) {
    const double f0 = p.objective.value(x);
    out.f_at_x = f0;
    for (Index j = 0; j < d; ++j) {
      const Vector m = s.column(j);
      const double t = scale / std::max(m.norm(), mode.norm_floor);
      out.value[j] = (p.objective.value(x + t * m) - f0) / t;
    }
    out.value_evals = d + 1;
  } else {
    for (Index j = 0; j < d; ++j) {
      const Vector m = s.column(j);
      const double t = scale / std::max(m.norm(), mode.norm_floor);
      out.value[j] = (p.objective.value(x + t * m) - p.objective.value(x - t * m)) / (2.0 * t);
    }
    out.value_evals = 2 * d;
  }
  return out;
}

double max_violation(const ProblemSpec& p, const Vector& x) {
  if (x.size() != p.dim) throw DimensionError("point has wrong length");
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& c : p.constraints) {
    const double g = c.value(x);
    if (std::isnan(g)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, g);
  }
  return worst;
}

Vector random_feasible_point(const ProblemSpec& p, std::uint64_t seed, double radius) {
  std::mt19937_64 rng(derive_seed(seed, 0x5eedULL));
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector u(p.dim);
  for (Index i = 0; i < p.dim; ++i) u[i] = normal(rng);
  u.normalize();
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  double t = radius * unif(rng) * (1.0 + p.x0.norm());
  for (int k = 0; k < 200; ++k) {
    const Vector x = p.x0 + t * u;
    if (max_violation(p, x) <= 0.0) return x;
    t *= 0.5;
  }
  return p.x0;
}

namespace {

double directional_deviation(const ScalarFn& f, const Vector& grad, const Vector& x, const Vector& u) {
  const double h = 1e-5 * (1.0 + x.norm());
  const double fd = (f(x + h * u) - f(x - h * u)) / (2.0 * h);
  const double an = grad.dot(u);
  const double scale = std::max(grad.norm() * u.norm(), 1e-12);
  return std::abs(fd - an) / scale;
}

}  // namespace

OracleReport check_oracle_consistency(const ProblemSpec& p, int num_probes, std::uint64_t seed,
                                      double tolerance) {
  if (!p.objective.has_gradient()) throw MissingGradientError();
  OracleReport report;
  report.tolerance = tolerance;
  report.constraint_deviation.assign(p.constraints.size(), 0.0);

  std::mt19937_64 rng(derive_seed(seed, 0xc0ffeeULL));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int probe = 0; probe < num_probes; ++probe) {
    const Vector x = random_feasible_point(p, derive_seed(seed, static_cast<std::uint64_t>(probe)));
    Vector u(p.dim);
    for (Index i = 0; i < p.dim; ++i) u[i] = normal(rng);
    u.normalize();

    report.objective_deviation = std::max(
        report.objective_deviation,
        directional_deviation(p.objective.value, p.objective.gradient(x), x, u));
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
      const auto& c = p.constraints[i];
      const ScalarFn g = [&c](const Vector& y) { return c.value(y); };
      report.constraint_deviation[i] =
          std::max(report.constraint_deviation[i], directional_deviation(g, c.gradient(x), x, u));
    }
  }
  report.pass = report.objective_deviation <= tolerance;
  for (double dev : report.constraint_deviation) report.pass = report.pass && dev <= tolerance;
  return report;
}

}  // namespace rsg
