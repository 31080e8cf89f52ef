#include "rsg_harness/problems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/lexical_cast.hpp>
#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "rsg_harness/errors.hpp"

namespace rsg::harness {

namespace {

constexpr std::array<char, 6> kQpMagic{'R', 'S', 'G', 'Q', 'P', '1'};

using Engine = boost::random::mt19937_64;

Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
  return Engine(derive_seed(seed, stream));
}

Vector normal_vector(Engine& rng, Index n) {
  boost::random::normal_distribution<double> normal;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

double max_abs_eigenvalue(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

ConstraintFn sum_of_squares_constraint(double rhs) {
  return ConstraintFn::smooth([rhs](const Vector& x) { return x.squaredNorm() - rhs; },
                              [](const Vector& x) -> Vector { return 2.0 * x; });
}

void add_box(ProblemSpec& p, double lower, double upper) {
  p.constraints.reserve(p.constraints.size() + 2 * static_cast<std::size_t>(p.dim));
  for (Index i = 0; i < p.dim; ++i) {
    SparseVector up(p.dim);
    up.insert(i) = 1.0;
    p.constraints.push_back(ConstraintFn::linear(std::move(up), upper));
    SparseVector lo(p.dim);
    lo.insert(i) = -1.0;
    p.constraints.push_back(ConstraintFn::linear(std::move(lo), -lower));
  }
}

template <class T>
T param(const ParamMap& params, const std::string& key, T fallback) {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  try {
    return boost::lexical_cast<T>(it->second);
  } catch (const boost::bad_lexical_cast&) {
    throw ConfigError("bad value '" + it->second + "' for problem parameter '" + key + "'");
  }
}

bool param_flag(const ParamMap& params, const std::string& key, bool fallback) {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("bad boolean '" + v + "' for problem parameter '" + key + "'");
}

}  // namespace

QuadraticData read_quadratic_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError("bad number '" + cell + "' in quadratic CSV");
      }
    }
    rows.push_back(std::move(row));
  }
  const Index n = static_cast<Index>(rows.size());
  if (n == 0) throw ConfigError("empty quadratic CSV");
  QuadraticData data{Matrix(n, n), Vector(n)};
  for (Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Index>(row.size()) != n + 1) {
      throw ConfigError("quadratic CSV row " + std::to_string(i) + " needs " + std::to_string(n + 1) +
                        " values");
    }
    for (Index j = 0; j < n; ++j) data.Q(i, j) = row[static_cast<std::size_t>(j)];
    data.b[i] = row.back();
  }
  return data;
}

void write_quadratic_csv(std::ostream& out, const QuadraticData& data) {
  char buf[32];
  for (Index i = 0; i < data.Q.rows(); ++i) {
    for (Index j = 0; j < data.Q.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,", data.Q(i, j));
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", data.b[i]);
    out << buf << '\n';
  }
}

QuadraticData read_quadratic_binary(std::istream& in) {
  std::array<char, 6> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kQpMagic) throw ConfigError("quadratic binary: bad magic");
  std::array<unsigned char, 8> raw{};
  in.read(reinterpret_cast<char*>(raw.data()), raw.size());
  std::uint64_t n = 0;
  for (int k = 7; k >= 0; --k) n = (n << 8) | raw[static_cast<std::size_t>(k)];
  if (!in || n == 0 || n > (1u << 20)) throw ConfigError("quadratic binary: bad dimension");
  const Index dim = static_cast<Index>(n);
  RowMatrix q(dim, dim);
  Vector b(dim);
  in.read(reinterpret_cast<char*>(q.data()), static_cast<std::streamsize>(sizeof(double) * n * n));
  in.read(reinterpret_cast<char*>(b.data()), static_cast<std::streamsize>(sizeof(double) * n));
  if (!in) throw ConfigError("quadratic binary: truncated payload");
  return {Matrix(q), b};
}

void write_quadratic_binary(std::ostream& out, const QuadraticData& data) {
  out.write(kQpMagic.data(), kQpMagic.size());
  std::uint64_t n = static_cast<std::uint64_t>(data.b.size());
  std::array<unsigned char, 8> raw{};
  for (std::size_t k = 0; k < 8; ++k) raw[k] = static_cast<unsigned char>((n >> (8 * k)) & 0xff);
  out.write(reinterpret_cast<const char*>(raw.data()), raw.size());
  const RowMatrix q = data.Q;
  out.write(reinterpret_cast<const char*>(q.data()), static_cast<std::streamsize>(sizeof(double) * n * n));
  out.write(reinterpret_cast<const char*>(data.b.data()), static_cast<std::streamsize>(sizeof(double) * n));
}

QuadraticData load_quadratic(const std::string& path) {
  const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  std::ifstream in(path, csv ? std::ios::in : std::ios::binary);
  if (!in) throw ConfigError("cannot open quadratic data file '" + path + "'");
  return csv ? read_quadratic_csv(in) : read_quadratic_binary(in);
}

QuadraticData sample_box_qp_data(Index n, std::uint64_t seed) {
  if (n < 2) throw ConfigError("box_qp needs n >= 2");
  Engine rng = make_engine(seed, 1);
  boost::random::normal_distribution<double> normal;
  QuadraticData data{Matrix(n, n), Vector(n)};
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) data.Q(i, j) = normal(rng);
  data.b = normal_vector(rng, n);
  return data;
}

ProblemSpec make_box_qp(const QuadraticData& data) {
  const Index n = data.b.size();
  if (data.Q.rows() != n || data.Q.cols() != n) throw DimensionError("box_qp: Q must be n x n");
  auto q = std::make_shared<const Matrix>(0.5 * (data.Q + data.Q.transpose()));
  auto b = std::make_shared<const Vector>(data.b);
  ProblemSpec p;
  p.name = "box_qp";
  p.dim = n;
  p.objective.value = [q, b](const Vector& x) { return 0.5 * x.dot(*q * x) + b->dot(x); };
  p.objective.gradient = [q, b](const Vector& x) -> Vector { return *q * x + *b; };
  p.objective.smoothness = max_abs_eigenvalue(*q);
  add_box(p, -1.0, 1.0);
  p.x0 = Vector::Zero(n);
  return p;
}

ProblemSpec make_box_qp(Index n, std::uint64_t seed) { return make_box_qp(sample_box_qp_data(n, seed)); }

Vector NmfInstance::pack(const Matrix& u, const Matrix& v) const {
  Vector x(rank * (rows + cols));
  for (Index i = 0; i < rows; ++i)
    for (Index k = 0; k < rank; ++k) x[i * rank + k] = u(i, k);
  for (Index j = 0; j < cols; ++j)
    for (Index k = 0; k < rank; ++k) x[(rows + j) * rank + k] = v(j, k);
  return x;
}

NmfInstance sample_nmf_instance(Index rows, Index cols, Index rank, double obs_fraction,
                                std::uint64_t seed) {
  if (rows < 1 || cols < 1 || rank < 1 || rank > std::min(rows, cols)) {
    throw ConfigError("nmf_completion needs 1 <= rank <= min(rows, cols)");
  }
  if (!(obs_fraction > 0.0 && obs_fraction <= 1.0)) {
    throw ConfigError("nmf_completion needs obs_fraction in (0, 1]");
  }
  Engine rng = make_engine(seed, 2);
  boost::random::uniform_real_distribution<double> unif(0.0, 1.0);
  boost::random::bernoulli_distribution<double> coin(obs_fraction);
  NmfInstance inst;
  inst.rows = rows;
  inst.cols = cols;
  inst.rank = rank;
  inst.truth_u.resize(rows, rank);
  inst.truth_v.resize(cols, rank);
  for (Index i = 0; i < rows; ++i)
    for (Index k = 0; k < rank; ++k) inst.truth_u(i, k) = unif(rng);
  for (Index j = 0; j < cols; ++j)
    for (Index k = 0; k < rank; ++k) inst.truth_v(j, k) = unif(rng);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      if (coin(rng)) inst.observed.emplace_back(i, j, inst.truth_u.row(i).dot(inst.truth_v.row(j)));
    }
  }
  return inst;
}

ProblemSpec make_nmf_completion(const NmfInstance& inst) {
  auto data = std::make_shared<const NmfInstance>(inst);
  const Index r = inst.rank;
  const Index v_offset = inst.rows * r;
  ProblemSpec p;
  p.name = "nmf_completion";
  p.dim = (inst.rows + inst.cols) * r;
  p.objective.value = [data, r, v_offset](const Vector& x) {
    double f = 0.0;
    for (const auto& [i, j, xij] : data->observed) {
      const double res = x.segment(i * r, r).dot(x.segment(v_offset + j * r, r)) - xij;
      f += res * res;
    }
    return f;
  };
  p.objective.gradient = [data, r, v_offset](const Vector& x) -> Vector {
    Vector g = Vector::Zero(x.size());
    for (const auto& [i, j, xij] : data->observed) {
      const auto u = x.segment(i * r, r);
      const auto v = x.segment(v_offset + j * r, r);
      const double res = 2.0 * (u.dot(v) - xij);
      g.segment(i * r, r) += res * v;
      g.segment(v_offset + j * r, r) += res * u;
    }
    return g;
  };
  p.constraints.reserve(static_cast<std::size_t>(p.dim));
  for (Index i = 0; i < p.dim; ++i) {
    SparseVector a(p.dim);
    a.insert(i) = -1.0;
    p.constraints.push_back(ConstraintFn::linear(std::move(a), 0.0));
  }
  p.x0 = Vector::Ones(p.dim);
  return p;
}

ProblemSpec make_nmf_completion(Index rows, Index cols, Index rank, double obs_fraction,
                                std::uint64_t seed) {
  return make_nmf_completion(sample_nmf_instance(rows, cols, rank, obs_fraction, seed));
}

ProblemSpec make_ball_constrained(Index n, const BallOptions& opts, std::uint64_t seed) {
  if (n < 2) throw ConfigError("ball needs n >= 2");
  if (!(opts.radius_sq > 0.0)) throw ConfigError("ball needs radius_sq > 0");
  Engine rng = make_engine(seed, 3);
  ProblemSpec p;
  p.dim = n;
  if (opts.kind == BallObjective::quadratic) {
    p.name = "ball_quadratic";
    boost::random::normal_distribution<double> normal;
    Matrix g(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) g(i, j) = normal(rng);
    auto a = std::make_shared<const Matrix>((g + g.transpose()) / (2.0 * std::sqrt(static_cast<double>(n))));
    auto b = std::make_shared<const Vector>(normal_vector(rng, n));
    p.objective.value = [a, b](const Vector& x) { return 0.5 * x.dot(*a * x) + b->dot(x); };
    p.objective.gradient = [a, b](const Vector& x) -> Vector { return *a * x + *b; };
    p.objective.smoothness = max_abs_eigenvalue(*a);
  } else {
    p.name = "ball_logistic";
    const Index samples = 2 * n;
    static constexpr double kConcavity = 0.05;
    boost::random::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(n)));
    Matrix data(samples, n);
    for (Index i = 0; i < samples; ++i)
      for (Index j = 0; j < n; ++j) data(i, j) = normal(rng);
    const Vector w_true = normal_vector(rng, n);
    Vector labels = (data * w_true).unaryExpr([](double z) { return z >= 0.0 ? 1.0 : -1.0; });
    // Signed rows y_j a_j so that every loss term is softplus(-<row, x>).
    auto rows = std::make_shared<const Matrix>(labels.asDiagonal() * data);
    const double inv_m = 1.0 / static_cast<double>(samples);
    p.objective.value = [rows, inv_m](const Vector& x) {
      const Vector z = *rows * x;
      double s = 0.0;
      for (Index i = 0; i < z.size(); ++i) s += softplus(-z[i]);
      return inv_m * s - 0.5 * kConcavity * x.squaredNorm();
    };
    p.objective.gradient = [rows, inv_m](const Vector& x) -> Vector {
      const Vector z = *rows * x;
      const Vector w = z.unaryExpr([](double t) { return -sigmoid(-t); });
      return inv_m * (rows->transpose() * w) - kConcavity * x;
    };
    const Matrix gram = rows->transpose() * *rows;
    p.objective.smoothness = 0.25 * inv_m * max_abs_eigenvalue(gram) + kConcavity;
  }
  p.constraints.push_back(sum_of_squares_constraint(opts.radius_sq));
  if (opts.ellipsoid) {
    boost::random::uniform_real_distribution<double> unif(0.5, 2.0);
    Vector diag(n);
    for (Index i = 0; i < n; ++i) diag[i] = unif(rng);
    auto dd = std::make_shared<const Vector>(diag);
    const double c = opts.ellipsoid_c;
    p.constraints.push_back(ConstraintFn::smooth(
        [dd, c](const Vector& x) { return x.dot(dd->cwiseProduct(x)) - c; },
        [dd](const Vector& x) -> Vector { return 2.0 * dd->cwiseProduct(x); }));
  }
  p.x0 = Vector::Zero(n);
  return p;
}

ProblemSpec make_ball_lp(Index n, std::uint64_t seed, Vector* c_out) {
  if (n < 1) throw ConfigError("ball_lp needs n >= 1");
  Engine rng = make_engine(seed, 4);
  auto c = std::make_shared<const Vector>(normal_vector(rng, n));
  if (c_out) *c_out = *c;
  ProblemSpec p;
  p.name = "ball_lp";
  p.dim = n;
  p.objective.value = [c](const Vector& x) { return c->dot(x); };
  p.objective.gradient = [c](const Vector&) -> Vector { return *c; };
  p.constraints.push_back(sum_of_squares_constraint(1.0));
  p.x0 = Vector::Zero(n);
  return p;
}

ProblemSpec make_halfline() {
  ProblemSpec p;
  p.name = "halfline";
  p.dim = 1;
  p.objective.value = [](const Vector& x) { return x[0]; };
  p.objective.gradient = [](const Vector&) -> Vector { return Vector::Ones(1); };
  p.constraints.push_back(ConstraintFn::linear(Vector::Constant(1, -1.0), 1.0));
  p.x0 = Vector::Zero(1);
  return p;
}

namespace {

void require_known_params(const std::string& name, const ParamMap& params,
                          std::initializer_list<const char*> known) {
  for (const auto& [key, value] : params) {
    if (key == "seed") continue;
    if (std::find_if(known.begin(), known.end(), [&](const char* k) { return key == k; }) == known.end()) {
      throw ConfigError("unknown parameter '" + key + "' for problem '" + name + "'");
    }
  }
}

}  // namespace

bool is_known_problem(const std::string& name) {
  return name == "box_qp" || name == "nmf_completion" || name == "ball" || name == "ball_lp" ||
         name == "halfline";
}

BundledProblem make_problem(const std::string& name, const ParamMap& params,
                            std::uint64_t instance_seed) {
  const std::uint64_t seed = param<std::uint64_t>(params, "seed", 0) + instance_seed;
  BundledProblem out;
  if (name == "box_qp") {
    require_known_params(name, params, {"n", "data"});
    const auto file = params.find("data");
    out.spec = file != params.end() ? make_box_qp(load_quadratic(file->second))
                                    : make_box_qp(param<Index>(params, "n", 200), seed);
    out.set = Box{Vector::Constant(out.spec.dim, -1.0), Vector::Constant(out.spec.dim, 1.0)};
    out.eps0 = 1e-6;
    out.delta1 = 1e-4;
    out.eps2 = 1e-6;
  } else if (name == "nmf_completion") {
    require_known_params(name, params, {"rows", "cols", "rank", "obs_fraction"});
    out.spec = make_nmf_completion(param<Index>(params, "rows", 60), param<Index>(params, "cols", 80),
                                   param<Index>(params, "rank", 5),
                                   param<double>(params, "obs_fraction", 0.2), seed);
    out.set = NonNeg{};
    out.eps0 = 1e-4;
    out.delta1 = 1e-5;
    out.eps2 = 1e-5;
    out.h_gaussian = 0.1 * static_cast<double>(out.spec.dim);
    out.h_identity = 1e-2;
  } else if (name == "ball") {
    require_known_params(name, params, {"n", "kind", "radius_sq", "ellipsoid", "ellipsoid_c"});
    BallOptions opts;
    const std::string kind = param<std::string>(params, "kind", "quadratic");
    if (kind == "quadratic") {
      opts.kind = BallObjective::quadratic;
    } else if (kind == "logistic_like") {
      opts.kind = BallObjective::logistic_like;
    } else {
      throw ConfigError("unknown ball kind '" + kind + "'");
    }
    opts.radius_sq = param<double>(params, "radius_sq", 50.0);
    opts.ellipsoid = param_flag(params, "ellipsoid", false);
    opts.ellipsoid_c = param<double>(params, "ellipsoid_c", opts.radius_sq);
    out.spec = make_ball_constrained(param<Index>(params, "n", 500), opts, seed);
    if (!opts.ellipsoid) out.set = L2Ball{opts.radius_sq};
    out.eps0 = 1e-6;
    out.delta1 = 1e-8;
    out.eps2 = 1e-4;
  } else if (name == "ball_lp") {
    require_known_params(name, params, {"n"});
    out.spec = make_ball_lp(param<Index>(params, "n", 100), seed);
    out.set = L2Ball{1.0};
    out.eps0 = 1e-6;
    out.delta1 = 1e-8;
    out.eps2 = 1e-4;
    out.h_gaussian = static_cast<double>(out.spec.dim);
    out.h_identity = 1.0;
  } else if (name == "halfline") {
    require_known_params(name, params, {});
    out.spec = make_halfline();
    out.set = Box{Vector::Constant(1, -1.0),
                  Vector::Constant(1, std::numeric_limits<double>::infinity())};
    out.eps0 = 1e-6;
    out.delta1 = 1e-8;
    out.eps2 = 1e-6;
    out.h_gaussian = 1.0;
    out.h_identity = 1.0;
  } else {
    throw ConfigError("unknown problem id '" + name + "'");
  }
  return out;
}

}  // namespace rsg::harness
