#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rsg {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched vector lengths or invalid sketch dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid solver or problem parameter.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The stacked sketched constraint gradients lost column rank.
class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(std::size_t rank, std::size_t columns)
      : Error("sketched active-constraint matrix is rank deficient: rank " + std::to_string(rank) +
              " < " + std::to_string(columns) + " columns"),
        rank_(rank),
        columns_(columns) {}

  std::size_t rank() const noexcept { return rank_; }
  std::size_t columns() const noexcept { return columns_; }

 private:
  std::size_t rank_;
  std::size_t columns_;
};

/// More active constraints than the reduced dimension can represent.
class ActiveSetOverflowError : public Error {
 public:
  ActiveSetOverflowError(std::size_t active, std::size_t reduced_dim)
      : Error("active set of size " + std::to_string(active) + " exceeds reduced dimension " +
              std::to_string(reduced_dim) + " (raise d or shrink eps0)"),
        active_(active),
        reduced_dim_(reduced_dim) {}

  std::size_t active() const noexcept { return active_; }
  std::size_t reduced_dim() const noexcept { return reduced_dim_; }

 private:
  std::size_t active_;
  std::size_t reduced_dim_;
};

/// An active constraint has a vanishing gradient.
class DegenerateConstraintError : public Error {
 public:
  explicit DegenerateConstraintError(std::size_t index)
      : Error("active constraint " + std::to_string(index) + " has a zero gradient"), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// A quantity that theory bounds away from a singularity came out singular.
class NumericalAnomalyError : public Error {
 public:
  using Error::Error;
};

/// The starting point violates a constraint.
class InfeasibleStartError : public Error {
 public:
  explicit InfeasibleStartError(double violation)
      : Error("starting point is infeasible: max violation " + std::to_string(violation)),
        violation_(violation) {}

  double violation() const noexcept { return violation_; }

 private:
  double violation_;
};

/// An analytic objective gradient was required but the oracle has none.
class MissingGradientError : public Error {
 public:
  MissingGradientError() : Error("objective oracle has no analytic gradient") {}
};

}  // namespace rsg
