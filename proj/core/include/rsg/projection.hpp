#pragma once

#include <vector>

#include <Eigen/QR>

#include "rsg/problem.hpp"
#include "rsg/sketch.hpp"
#include "rsg/types.hpp"

namespace rsg {

/// Relative threshold on the triangular-factor diagonal below which a column
/// of the sketched constraint stack counts as dependent.
inline constexpr double kRankTolerance = 1e-10;

/// Active constraints at a point together with their sketched gradients and a
/// cached QR factorization of the sketched stack G_sk = M^T G.
class ActiveSetView {
 public:
  /// Wraps an already sketched stack (d x k). `ambient_dim` is n.
  static ActiveSetView from_sketched(Matrix g_sk, Index ambient_dim,
                                     std::vector<Index> indices = {});

  const std::vector<Index>& indices() const noexcept { return indices_; }
  /// Full-space gradients, n x k, columns in index order.
  const SparseMatrix& G() const noexcept { return g_; }
  /// Sketched gradients M^T G, d x k.
  const Matrix& G_sk() const noexcept { return g_sk_; }
  /// Column norms of G_sk.
  const Vector& s() const noexcept { return s_; }

  Index size() const noexcept { return g_sk_.cols(); }
  bool empty() const noexcept { return size() == 0; }
  Index ambient_dim() const noexcept { return n_; }
  Index reduced_dim() const noexcept { return g_sk_.rows(); }
  Index rank() const noexcept { return rank_; }

  /// Minimizer of |G_sk y - rhs| (rhs in R^d). Throws RankDeficiencyError.
  Vector least_squares(const Vector& rhs) const;
  /// (G_sk^T G_sk)^{-1} rhs for rhs in R^k.
  Vector solve_gram(const Vector& rhs) const;
  /// v^T (G_sk^T G_sk)^{-1} v via one triangular solve.
  double inverse_gram_quadratic(const Vector& v) const;
  /// G_sk^T G_sk.
  Matrix gram() const;

 private:
  friend ActiveSetView compute_active_set(const ProblemSpec&, const Vector&, double,
                                          const SketchMatrix&, bool);
  ActiveSetView() = default;
  void factorize();
  void require_full_rank() const;

  std::vector<Index> indices_;
  SparseMatrix g_;
  Matrix g_sk_;
  Vector s_;
  Index n_ = 0;
  Index rank_ = 0;
  Eigen::HouseholderQR<Matrix> qr_;
};

/// Loose active set { i : [-g_i(x)]_+ <= eps0 |grad g_i(x)| }.
///
/// With `use_sketched_norms` the norm is |M^T grad g_i(x)| scaled by n/sqrt(d).
/// Throws ActiveSetOverflowError when more than d constraints are active and
/// DegenerateConstraintError for an active constraint with zero gradient.
ActiveSetView compute_active_set(const ProblemSpec& p, const Vector& x, double eps0,
                                 const SketchMatrix& s, bool use_sketched_norms = false);

struct MultiplierSolve {
  Vector lambda;
  /// grad_sk + G_sk lambda, the orthogonal projection of grad_sk onto range(G_sk)^perp.
  Vector residual_sk;
  Index factorization_rank = 0;
};

/// lambda = argmin |grad_sk + G_sk lambda|. With an empty active set lambda is
/// empty and the residual is grad_sk.
MultiplierSolve solve_multipliers(const ActiveSetView& a, const Vector& grad_sk);

/// Projected sketched direction -residual_sk.
Vector direction_projected(const ActiveSetView& a, const MultiplierSolve& ms);

/// Linear-constraint fallback -(d/n) G_sk (G_sk^T G_sk)^{-1} [-lambda]_+.
Vector direction_multiplier_fix_lc(const ActiveSetView& a, const Vector& lambda, Index d_sub,
                                   Index n);

/// mu = mu_scale / sqrt(s^T (G_sk^T G_sk)^{-1} s).
double compute_mu(const ActiveSetView& a, double mu_scale = 0.5);

struct ObliqueMultipliers {
  Vector lambda_bar;
  /// nu = mu s / |grad_sk|.
  Vector nu;
  /// nu^T lambda with lambda the orthogonal multipliers; |.| <= mu_scale in theory.
  double nu_dot_lambda = 0.0;
};

/// Solves (G_sk - grad_sk nu^T)^T G_sk lambda_bar = -(G_sk - grad_sk nu^T)^T grad_sk.
/// Throws NumericalAnomalyError when 1 + nu^T lambda is numerically zero.
ObliqueMultipliers solve_oblique_multipliers(const ActiveSetView& a, const Vector& grad_sk,
                                             double mu);

/// R v for the oblique projector defined by (grad_sk, mu): v + G_sk y where y
/// solves the same tilted normal equations with right-hand side v.
Vector apply_oblique_projector(const ActiveSetView& a, const Vector& grad_sk, double mu,
                               const Vector& v);

/// -(grad_sk + G_sk lambda_bar).
Vector direction_oblique(const ActiveSetView& a, const Vector& grad_sk, const Vector& lambda_bar);

/// Weights for the nonlinear-constraint fallback direction. Requires min lambda < -eps2.
Vector select_dbar(const Vector& lambda, double eps2);

/// -(eps2 d/n) G_sk (G_sk^T G_sk)^{-1} dbar.
Vector direction_multiplier_fix_nc(const ActiveSetView& a, const Vector& dbar, double eps2,
                                   Index d_sub, Index n);

/// Smallest entry, +infinity for an empty vector.
double min_entry(const Vector& v);

}  // namespace rsg
