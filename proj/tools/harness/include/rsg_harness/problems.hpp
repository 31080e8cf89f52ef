#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "rsg/baselines.hpp"
#include "rsg/problem.hpp"

namespace rsg::harness {

/// Dense data of f(x) = 1/2 x^T Q x + b^T x.
struct QuadraticData {
  Matrix Q;
  Vector b;
};

/// CSV: n rows, each holding Q(i,0..n-1) followed by b(i).
QuadraticData read_quadratic_csv(std::istream& in);
void write_quadratic_csv(std::ostream& out, const QuadraticData& data);

/// Binary: the 6 bytes "RSGQP1", uint64 n (little endian), n*n doubles of Q in
/// row-major order, then n doubles of b.
QuadraticData read_quadratic_binary(std::istream& in);
void write_quadratic_binary(std::ostream& out, const QuadraticData& data);

/// Reads either container, picked by the ".csv" extension.
QuadraticData load_quadratic(const std::string& path);

/// Q ~ N(0,1) entrywise then symmetrized, b ~ N(0,1).
QuadraticData sample_box_qp_data(Index n, std::uint64_t seed);

/// min 1/2 x^T Q x + b^T x s.t. -1 <= x <= 1, x0 = 0. Q is symmetrized.
ProblemSpec make_box_qp(const QuadraticData& data);
ProblemSpec make_box_qp(Index n, std::uint64_t seed);

struct NmfInstance {
  Index rows = 0;
  Index cols = 0;
  Index rank = 0;
  Matrix truth_u;
  Matrix truth_v;
  /// Observed entries (i, j, X_ij).
  std::vector<std::tuple<Index, Index, double>> observed;

  /// Packs factors as [U row-major; V row-major].
  Vector pack(const Matrix& u, const Matrix& v) const;
};

NmfInstance sample_nmf_instance(Index rows, Index cols, Index rank, double obs_fraction,
                                std::uint64_t seed);

/// min |P_Omega(X - U V^T)|^2 s.t. U >= 0, V >= 0, x0 = all ones.
ProblemSpec make_nmf_completion(const NmfInstance& inst);
ProblemSpec make_nmf_completion(Index rows, Index cols, Index rank, double obs_fraction,
                                std::uint64_t seed);

enum class BallObjective { quadratic, logistic_like };

struct BallOptions {
  BallObjective kind = BallObjective::quadratic;
  double radius_sq = 50.0;
  /// Adds x^T D x - ellipsoid_c <= 0 with a random positive diagonal D.
  bool ellipsoid = false;
  double ellipsoid_c = 50.0;
};

/// Smooth nonconvex objective on |x|^2 <= radius_sq, x0 = 0.
ProblemSpec make_ball_constrained(Index n, const BallOptions& opts, std::uint64_t seed);

/// min c^T x s.t. |x|^2 <= 1 with c ~ N(0,1); optimum -c/|c|, multiplier |c|/2.
ProblemSpec make_ball_lp(Index n, std::uint64_t seed, Vector* c_out = nullptr);

/// min x s.t. -x - 1 <= 0 on the real line, x0 = 0; KKT pair (-1, 1).
ProblemSpec make_halfline();

/// A registry entry: the problem, its projection set if one exists and the
/// tolerances the bundled experiments use.
struct BundledProblem {
  ProblemSpec spec;
  std::optional<SimpleSet> set;
  double eps0 = 1e-6;
  double delta1 = 1e-4;
  double eps2 = 1e-6;
  /// Step sizes used when neither h nor a smoothness constant is available.
  std::optional<double> h_gaussian;
  std::optional<double> h_identity;
};

using ParamMap = std::map<std::string, std::string>;

/// Known ids: box_qp, nmf_completion, ball, ball_lp, halfline.
/// `instance_seed` is added to the "seed" parameter. Throws ConfigError.
BundledProblem make_problem(const std::string& name, const ParamMap& params,
                            std::uint64_t instance_seed = 0);

bool is_known_problem(const std::string& name);

}  // namespace rsg::harness
