#include "rsg/sketch.hpp"

#include <random>
#include <string>

#include <boost/random/normal_distribution.hpp>

#include "rsg/errors.hpp"

namespace rsg {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void fill_standard_normal(RowMatrix& p, std::mt19937_64& rng) {
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  double* data = p.data();
  const Index size = p.size();
  for (Index i = 0; i < size; ++i) data[i] = normal(rng);
}

void check_length(Index got, Index want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(want) +
                         ", got " + std::to_string(got));
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(run_seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

SketchMatrix SketchMatrix::identity(Index n) {
  if (n < 1) throw DimensionError("identity sketch needs n >= 1");
  return SketchMatrix(SketchMode::identity, n, n, 0, RowMatrix());
}

Vector SketchMatrix::apply(const Vector& v) const {
  check_length(v.size(), d_, "SketchMatrix::apply");
  if (mode_ == SketchMode::identity) return v;
  return (p_.transpose() * v) / static_cast<double>(n_);
}

Vector SketchMatrix::apply_transpose(const Vector& w) const {
  check_length(w.size(), n_, "SketchMatrix::apply_transpose");
  if (mode_ == SketchMode::identity) return w;
  return (p_ * w) / static_cast<double>(n_);
}

Matrix SketchMatrix::apply_transpose(const SparseMatrix& w) const {
  check_length(w.rows(), n_, "SketchMatrix::apply_transpose");
  if (mode_ == SketchMode::identity) return Matrix(w);
  Matrix out = p_ * w;
  out /= static_cast<double>(n_);
  return out;
}

Vector SketchMatrix::column(Index j) const {
  if (j < 0 || j >= d_) throw DimensionError("SketchMatrix::column index out of range");
  if (mode_ == SketchMode::identity) return Vector::Unit(n_, j);
  return p_.row(j).transpose() / static_cast<double>(n_);
}

SketchMatrix sample_sketch(Index n, Index d, std::uint64_t seed) {
  if (d < 1 || n < 1 || d > n) {
    throw DimensionError("sample_sketch requires 1 <= d <= n (n=" + std::to_string(n) +
                         ", d=" + std::to_string(d) + ")");
  }
  RowMatrix p(d, n);
  std::mt19937_64 rng(seed);
  fill_standard_normal(p, rng);
  return SketchMatrix(SketchMode::gaussian, n, d, seed, std::move(p));
}

double jl_concentration_test(Index n, Index d, Index num_vectors, double epsilon,
                             std::uint64_t seed, SketchMode mode) {
  if (mode != SketchMode::gaussian) {
    throw ParameterError("jl_concentration_test is defined for Gaussian sketches only");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0,1)");
  if (num_vectors < 1) throw ParameterError("num_vectors must be positive");

  std::mt19937_64 rng(derive_seed(seed, 0xffffffffULL));
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  Index inside = 0;
  for (Index t = 0; t < num_vectors; ++t) {
    Vector x(n);
    for (Index i = 0; i < n; ++i) x[i] = normal(rng);
    x.normalize();
    const SketchMatrix s = sample_sketch(n, d, derive_seed(seed, static_cast<std::uint64_t>(t)));
    const double ratio = (s.entries() * x).squaredNorm() / static_cast<double>(d);
    if (ratio >= 1.0 - epsilon && ratio <= 1.0 + epsilon) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(num_vectors);
}

}  // namespace rsg
