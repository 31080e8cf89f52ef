#pragma once

#include <vector>

#include "rsg/problem.hpp"
#include "rsg/types.hpp"

namespace rsg {

/// Approximate-KKT certificate for a point/multiplier pair (x, eta):
///
///   stationarity         |grad f(x) + sum_i eta_i grad g_i(x)|  <= eps1
///   feasibility          max_i g_i(x)                           <= feas_tol
///   multiplier sign      min_i eta_i                            >= -eps2
///   complementarity      max_i |eta_i g_i(x)|                   <= eps3
///
/// Everything is measured in the full space R^n with analytic gradients.
struct KktReport {
  double stationarity = 0.0;
  double max_violation = 0.0;
  double min_multiplier = 0.0;
  double max_complementarity = 0.0;

  bool stationarity_pass = false;
  bool feasibility_pass = false;
  bool multiplier_pass = false;
  bool complementarity_pass = false;

  bool pass() const noexcept {
    return stationarity_pass && feasibility_pass && multiplier_pass && complementarity_pass;
  }
};

/// Scatters lambda into R^m at `active_indices`, zero elsewhere.
Vector embed_multipliers(const Vector& lambda, const std::vector<Index>& active_indices, Index m);

KktReport kkt_check(const ProblemSpec& p, const Vector& x, const Vector& eta, double eps1,
                    double eps2, double eps3, double feas_tol = 1e-12);

/// eps0 * max_i |grad g_i(x)| * |eta| + 1e-8, the complementarity budget used
/// when no explicit eps3 is given.
double default_complementarity_budget(const ProblemSpec& p, const Vector& x, const Vector& eta,
                                      double eps0);

/// Least-squares multipliers of the full-space active set at x, embedded into
/// R^m. Returns zeros when the active set is rank deficient.
Vector estimate_multipliers(const ProblemSpec& p, const Vector& x, double eps0);

}  // namespace rsg
