#include "rsg/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rsg/errors.hpp"

namespace rsg {

namespace {

constexpr double kGradNormFloor = 1e-300;
constexpr double kObliqueSingularity = 1e-8;

void check_reduced(const ActiveSetView& a, const Vector& v, const char* what) {
  if (v.size() != a.reduced_dim()) {
    throw DimensionError(std::string(what) + ": expected a vector in R^" +
                         std::to_string(a.reduced_dim()));
  }
}

void check_active(const ActiveSetView& a, const Vector& v, const char* what) {
  if (v.size() != a.size()) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(a.size()) +
                         " multipliers, got " + std::to_string(v.size()));
  }
}

}  // namespace

ActiveSetView ActiveSetView::from_sketched(Matrix g_sk, Index ambient_dim,
                                           std::vector<Index> indices) {
  if (ambient_dim < g_sk.rows()) throw DimensionError("ambient dimension smaller than d");
  if (g_sk.cols() > g_sk.rows()) {
    throw ActiveSetOverflowError(static_cast<std::size_t>(g_sk.cols()),
                                 static_cast<std::size_t>(g_sk.rows()));
  }
  if (indices.empty()) {
    for (Index i = 0; i < g_sk.cols(); ++i) indices.push_back(i);
  }
  if (static_cast<Index>(indices.size()) != g_sk.cols()) {
    throw DimensionError("index list does not match the number of columns");
  }
  ActiveSetView view;
  view.indices_ = std::move(indices);
  view.n_ = ambient_dim;
  view.g_sk_ = std::move(g_sk);
  view.factorize();
  return view;
}

void ActiveSetView::factorize() {
  const Index k = g_sk_.cols();
  s_ = k > 0 ? Vector(g_sk_.colwise().norm().transpose()) : Vector();
  rank_ = 0;
  if (k == 0) return;
  qr_.compute(g_sk_);
  const auto diag = qr_.matrixQR().diagonal().cwiseAbs();
  const double largest = diag.maxCoeff();
  if (!(largest > 0.0)) return;
  for (Index i = 0; i < k; ++i) {
    if (diag[i] > kRankTolerance * largest) ++rank_;
  }
}

void ActiveSetView::require_full_rank() const {
  if (rank_ < size()) {
    throw RankDeficiencyError(static_cast<std::size_t>(rank_), static_cast<std::size_t>(size()));
  }
}

Vector ActiveSetView::least_squares(const Vector& rhs) const {
  check_reduced(*this, rhs, "least_squares");
  if (empty()) return Vector();
  require_full_rank();
  return qr_.solve(rhs);
}

Vector ActiveSetView::solve_gram(const Vector& rhs) const {
  check_active(*this, rhs, "solve_gram");
  if (empty()) return Vector();
  require_full_rank();
  const Index k = size();
  const auto r = qr_.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  Vector z = r.transpose().solve(rhs);
  return r.solve(z);
}

double ActiveSetView::inverse_gram_quadratic(const Vector& v) const {
  check_active(*this, v, "inverse_gram_quadratic");
  if (empty()) return 0.0;
  require_full_rank();
  const Index k = size();
  const auto r = qr_.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  return r.transpose().solve(v).squaredNorm();
}

Matrix ActiveSetView::gram() const { return g_sk_.transpose() * g_sk_; }

ActiveSetView compute_active_set(const ProblemSpec& p, const Vector& x, double eps0,
                                 const SketchMatrix& s, bool use_sketched_norms) {
  if (!(eps0 > 0.0)) throw ParameterError("eps0 must be positive");
  if (x.size() != p.dim || s.ambient_dim() != p.dim) {
    throw DimensionError("compute_active_set: dimension mismatch");
  }

  const bool sketched = use_sketched_norms && s.mode() == SketchMode::gaussian;
  const double norm_scale =
      sketched ? static_cast<double>(s.ambient_dim()) / std::sqrt(static_cast<double>(s.reduced_dim()))
               : 1.0;

  ActiveSetView view;
  view.n_ = p.dim;
  std::vector<SparseVector> columns;
  for (Index i = 0; i < p.num_constraints(); ++i) {
    const ConstraintFn& c = p.constraints[static_cast<std::size_t>(i)];
    const double slack = std::max(-c.value(x), 0.0);
    double norm = 0.0;
    SparseVector grad;
    if (sketched) {
      grad = c.sparse_gradient(x);
      norm = norm_scale * s.apply_transpose(Vector(grad)).norm();
    } else {
      norm = c.gradient_norm(x);
    }
    if (!(slack <= eps0 * norm)) continue;
    if (norm == 0.0) throw DegenerateConstraintError(static_cast<std::size_t>(i));
    if (!sketched) grad = c.sparse_gradient(x);
    view.indices_.push_back(i);
    columns.push_back(std::move(grad));
  }

  const Index k = static_cast<Index>(columns.size());
  if (k > s.reduced_dim()) {
    throw ActiveSetOverflowError(static_cast<std::size_t>(k),
                                 static_cast<std::size_t>(s.reduced_dim()));
  }

  view.g_.resize(p.dim, k);
  std::vector<Eigen::Triplet<double>> triplets;
  for (Index j = 0; j < k; ++j) {
    for (SparseVector::InnerIterator it(columns[static_cast<std::size_t>(j)]); it; ++it) {
      triplets.emplace_back(it.index(), j, it.value());
    }
  }
  view.g_.setFromTriplets(triplets.begin(), triplets.end());
  view.g_sk_ = k > 0 ? s.apply_transpose(view.g_) : Matrix(s.reduced_dim(), 0);
  view.factorize();
  return view;
}

MultiplierSolve solve_multipliers(const ActiveSetView& a, const Vector& grad_sk) {
  check_reduced(a, grad_sk, "solve_multipliers");
  MultiplierSolve ms;
  if (a.empty()) {
    ms.residual_sk = grad_sk;
    return ms;
  }
  ms.lambda = -a.least_squares(grad_sk);
  ms.residual_sk = grad_sk + a.G_sk() * ms.lambda;
  ms.factorization_rank = a.rank();
  return ms;
}

Vector direction_projected(const ActiveSetView& a, const MultiplierSolve& ms) {
  check_reduced(a, ms.residual_sk, "direction_projected");
  return -ms.residual_sk;
}

Vector direction_multiplier_fix_lc(const ActiveSetView& a, const Vector& lambda, Index d_sub,
                                   Index n) {
  check_active(a, lambda, "direction_multiplier_fix_lc");
  if (a.empty()) return Vector::Zero(a.reduced_dim());
  const Vector neg_part = (-lambda).cwiseMax(0.0);
  const Vector w = a.solve_gram(neg_part);
  return -(static_cast<double>(d_sub) / static_cast<double>(n)) * (a.G_sk() * w);
}

double compute_mu(const ActiveSetView& a, double mu_scale) {
  if (a.empty()) return 0.0;
  const double q = a.inverse_gram_quadratic(a.s());
  return mu_scale / std::sqrt(q);
}

namespace {

/// Solves (B^T B - nu (B^T g)^T) y = -(B^T v - nu g^T v).
Vector tilted_solve(const ActiveSetView& a, const Vector& grad_sk, const Vector& nu, const Vector& v) {
  const Matrix& b = a.G_sk();
  const Vector c = b.transpose() * grad_sk;
  const Matrix system = a.gram() - nu * c.transpose();
  const Vector rhs = -(b.transpose() * v - nu * grad_sk.dot(v));
  Eigen::FullPivLU<Matrix> lu(system);
  if (!lu.isInvertible()) throw NumericalAnomalyError("oblique multiplier system is singular");
  return lu.solve(rhs);
}

Vector make_nu(const ActiveSetView& a, const Vector& grad_sk, double mu) {
  return (mu / std::max(grad_sk.norm(), kGradNormFloor)) * a.s();
}

}  // namespace

ObliqueMultipliers solve_oblique_multipliers(const ActiveSetView& a, const Vector& grad_sk,
                                             double mu) {
  check_reduced(a, grad_sk, "solve_oblique_multipliers");
  ObliqueMultipliers out;
  if (a.empty()) return out;
  out.nu = make_nu(a, grad_sk, mu);
  const Vector lambda = -a.least_squares(grad_sk);
  out.nu_dot_lambda = out.nu.dot(lambda);
  if (!(1.0 + out.nu_dot_lambda > kObliqueSingularity)) {
    throw NumericalAnomalyError("1 + nu^T lambda = " + std::to_string(1.0 + out.nu_dot_lambda) +
                                " makes the oblique projector singular");
  }
  out.lambda_bar = tilted_solve(a, grad_sk, out.nu, grad_sk);
  return out;
}

Vector apply_oblique_projector(const ActiveSetView& a, const Vector& grad_sk, double mu,
                               const Vector& v) {
  check_reduced(a, grad_sk, "apply_oblique_projector");
  check_reduced(a, v, "apply_oblique_projector");
  if (a.empty()) return v;
  a.least_squares(grad_sk);  // rank check
  const Vector nu = make_nu(a, grad_sk, mu);
  return v + a.G_sk() * tilted_solve(a, grad_sk, nu, v);
}

Vector direction_oblique(const ActiveSetView& a, const Vector& grad_sk, const Vector& lambda_bar) {
  check_reduced(a, grad_sk, "direction_oblique");
  if (a.empty()) return -grad_sk;
  check_active(a, lambda_bar, "direction_oblique");
  return -(grad_sk + a.G_sk() * lambda_bar);
}

Vector select_dbar(const Vector& lambda, double eps2) {
  if (!(min_entry(lambda) < -eps2)) {
    throw ParameterError("select_dbar requires min lambda < -eps2");
  }
  if (-lambda.sum() >= eps2 / 2.0) return Vector::Ones(lambda.size());

  double neg_mass = 0.0;
  double pos_mass = 0.0;
  for (Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] <= 0.0) {
      neg_mass -= lambda[i];
    } else {
      pos_mass += lambda[i];
    }
  }
  if (!(pos_mass > 0.0)) throw NumericalAnomalyError("select_dbar: no positive multiplier mass");
  const double ratio = neg_mass / (2.0 * pos_mass);
  Vector dbar(lambda.size());
  for (Index i = 0; i < lambda.size(); ++i) dbar[i] = lambda[i] <= 0.0 ? 1.0 : ratio;
  return dbar;
}

Vector direction_multiplier_fix_nc(const ActiveSetView& a, const Vector& dbar, double eps2,
                                   Index d_sub, Index n) {
  check_active(a, dbar, "direction_multiplier_fix_nc");
  if (a.empty()) return Vector::Zero(a.reduced_dim());
  const Vector w = a.solve_gram(dbar);
  return -(eps2 * static_cast<double>(d_sub) / static_cast<double>(n)) * (a.G_sk() * w);
}

double min_entry(const Vector& v) {
  return v.size() == 0 ? std::numeric_limits<double>::infinity() : v.minCoeff();
}

}  // namespace rsg
