#include "rsg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rsg/errors.hpp"
#include "rsg/projection.hpp"

namespace rsg {

Vector embed_multipliers(const Vector& lambda, const std::vector<Index>& active_indices, Index m) {
  if (lambda.size() != static_cast<Index>(active_indices.size())) {
    throw DimensionError("embed_multipliers: lambda and index list differ in length");
  }
  Vector eta = Vector::Zero(m);
  for (std::size_t k = 0; k < active_indices.size(); ++k) {
    const Index i = active_indices[k];
    if (i < 0 || i >= m) throw DimensionError("embed_multipliers: index out of range");
    eta[i] = lambda[static_cast<Index>(k)];
  }
  return eta;
}

KktReport kkt_check(const ProblemSpec& p, const Vector& x, const Vector& eta, double eps1,
                    double eps2, double eps3, double feas_tol) {
  if (!p.objective.has_gradient()) throw MissingGradientError();
  if (x.size() != p.dim) throw DimensionError("kkt_check: point has wrong length");
  if (eta.size() != p.num_constraints()) throw DimensionError("kkt_check: eta has wrong length");

  KktReport r;
  Vector residual = p.objective.gradient(x);
  r.max_violation = -std::numeric_limits<double>::infinity();
  r.min_multiplier = std::numeric_limits<double>::infinity();
  r.max_complementarity = 0.0;
  for (Index i = 0; i < p.num_constraints(); ++i) {
    const ConstraintFn& c = p.constraints[static_cast<std::size_t>(i)];
    const double g = c.value(x);
    r.max_violation = std::max(r.max_violation, g);
    r.min_multiplier = std::min(r.min_multiplier, eta[i]);
    r.max_complementarity = std::max(r.max_complementarity, std::abs(eta[i] * g));
    if (eta[i] != 0.0) residual += eta[i] * c.gradient(x);
  }
  r.stationarity = residual.norm();

  r.stationarity_pass = r.stationarity <= eps1;
  r.feasibility_pass = r.max_violation <= feas_tol;
  r.multiplier_pass = r.min_multiplier >= -eps2;
  r.complementarity_pass = r.max_complementarity <= eps3;
  return r;
}

double default_complementarity_budget(const ProblemSpec& p, const Vector& x, const Vector& eta,
                                      double eps0) {
  double max_grad = 0.0;
  for (const auto& c : p.constraints) max_grad = std::max(max_grad, c.gradient_norm(x));
  return eps0 * max_grad * eta.norm() + 1e-8;
}

Vector estimate_multipliers(const ProblemSpec& p, const Vector& x, double eps0) {
  const Index m = p.num_constraints();
  if (m == 0 || !p.objective.has_gradient()) return Vector::Zero(m);
  try {
    const SketchMatrix identity = SketchMatrix::identity(p.dim);
    const ActiveSetView view = compute_active_set(p, x, std::max(eps0, 1e-300), identity);
    if (view.empty()) return Vector::Zero(m);
    const MultiplierSolve ms = solve_multipliers(view, p.objective.gradient(x));
    return embed_multipliers(ms.lambda, view.indices(), m);
  } catch (const Error&) {
    return Vector::Zero(m);
  }
}

}  // namespace rsg
