#pragma once

#include <cstdint>

#include "rsg/types.hpp"

namespace rsg {

enum class SketchMode { gaussian, identity };

/// Mixes a run seed and a stream index (typically the iteration number) into
/// an independent 64-bit seed. Same inputs always give the same output.
std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t stream) noexcept;

/// Random subspace embedding M = (1/n) P^T with P a d x n standard Gaussian
/// matrix, or the identity map on R^n.
///
/// `apply` maps the reduced space R^d into R^n (v -> M v) and
/// `apply_transpose` maps R^n into R^d (w -> M^T w). Immutable once built.
class SketchMatrix {
 public:
  static SketchMatrix identity(Index n);

  SketchMode mode() const noexcept { return mode_; }
  Index ambient_dim() const noexcept { return n_; }
  Index reduced_dim() const noexcept { return d_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// The raw Gaussian matrix P (d x n). Empty in identity mode.
  const RowMatrix& entries() const noexcept { return p_; }

  /// M v for v in R^d.
  Vector apply(const Vector& v) const;
  /// M^T w for w in R^n.
  Vector apply_transpose(const Vector& w) const;
  /// M^T W column by column; W is n x k.
  Matrix apply_transpose(const SparseMatrix& w) const;
  /// j-th column of M, i.e. M e_j in R^n.
  Vector column(Index j) const;

 private:
  friend SketchMatrix sample_sketch(Index n, Index d, std::uint64_t seed);

  SketchMatrix(SketchMode mode, Index n, Index d, std::uint64_t seed, RowMatrix p)
      : mode_(mode), n_(n), d_(d), seed_(seed), p_(std::move(p)) {}

  SketchMode mode_;
  Index n_;
  Index d_;
  std::uint64_t seed_;
  RowMatrix p_;
};

/// Draws a Gaussian sketch. Requires 1 <= d <= n.
SketchMatrix sample_sketch(Index n, Index d, std::uint64_t seed);

/// Fraction of `num_vectors` random unit vectors x (each with a fresh sketch)
/// satisfying (1-eps)|x|^2 <= |P x|^2 / d <= (1+eps)|x|^2.
/// Only defined for Gaussian sketches; identity mode is rejected.
double jl_concentration_test(Index n, Index d, Index num_vectors, double epsilon,
                             std::uint64_t seed, SketchMode mode = SketchMode::gaussian);

}  // namespace rsg
