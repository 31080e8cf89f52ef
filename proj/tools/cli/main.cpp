#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rsg/baselines.hpp"
#include "rsg/problem.hpp"
#include "rsg/sketch.hpp"
#include "rsg_harness/config.hpp"
#include "rsg_harness/errors.hpp"
#include "rsg_harness/experiment.hpp"
#include "rsg_harness/problems.hpp"

namespace fs = std::filesystem;
using namespace rsg;
using namespace rsg::harness;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRun = 1;

struct CommonOptions {
  std::string config;
  std::string out_dir;
  std::vector<std::string> overrides;
};

fs::path pick_out_dir(const CommonOptions& o, const ExperimentConfig& cfg) {
  if (!o.out_dir.empty()) return o.out_dir;
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  return default_out_dir();
}

void print_summary(const RunSummary& s) {
  std::printf("%s seed=%llu status=%s iters=%lld f=%.10g stationarity=%.3e kkt=%s wall_ms=%.1f\n",
              s.method.c_str(), static_cast<unsigned long long>(s.seed),
              std::string(to_string(s.status)).c_str(), static_cast<long long>(s.iterations), s.final_f,
              s.kkt.stationarity, s.kkt.pass() ? "pass" : "fail", s.wall_ms);
  if (!s.message.empty()) std::printf("  %s\n", s.message.c_str());
}

int cmd_solve(const CommonOptions& o, const std::string& method, std::optional<std::uint64_t> seed,
              const std::string& problem) {
  std::vector<std::string> ov = o.overrides;
  if (!problem.empty()) ov.push_back("problem.name=" + problem);
  if (!method.empty()) ov.push_back("grid.methods=" + method);
  ExperimentConfig cfg = load_config(o.config, ov);
  const std::uint64_t s = seed.value_or(cfg.seeds.front());
  const MethodSpec& m = cfg.methods.front();
  const BundledProblem bp = make_problem(cfg.problem, cfg.problem_params, instance_seed(cfg, s));

  const fs::path out = pick_out_dir(o, cfg);
  fs::create_directories(out / "traces");
  std::ofstream trace(out / "traces" / trace_file_name(m.id, s));
  TraceWriter writer(trace);
  RunOutcome r = run_single(bp, m, s, cfg.kkt_eps1, [&](const TraceRecord& t) { writer.write(t); });
  r.summary.trace_file = (fs::path("traces") / trace_file_name(m.id, s)).string();
  std::ofstream summary(out / "summary.json");
  write_summary(summary, cfg, {r.summary});
  print_summary(r.summary);
  const bool bad = r.summary.status == SolverStatus::stalled || r.summary.status == SolverStatus::failed;
  return bad ? kExitRun : 0;
}

int cmd_experiment(const CommonOptions& o, int workers) {
  ExperimentConfig cfg = load_config(o.config, o.overrides);
  if (workers > 0) cfg.workers = workers;
  const fs::path out = pick_out_dir(o, cfg);
  const ExperimentResult res = run_experiment(cfg, out);
  for (const auto& s : res.runs) print_summary(s);
  for (const auto& a : aggregate(res.runs)) {
    std::printf("%s: mean f = %.10g, std = %.3e over %zu runs\n", a.method.c_str(), a.mean_final_f,
                a.std_final_f, a.runs);
  }
  std::printf("wrote %s\n", (out / "summary.json").string().c_str());
  return res.exit_code;
}

int cmd_check(const CommonOptions& o, const std::string& problem, std::uint64_t seed, int probes) {
  ExperimentConfig cfg;
  if (!o.config.empty()) {
    std::vector<std::string> ov = o.overrides;
    if (!problem.empty()) ov.push_back("problem.name=" + problem);
    cfg = load_config(o.config, ov);
  } else {
    if (problem.empty()) throw ConfigError("check needs --problem or --config");
    cfg.problem = problem;
  }
  const BundledProblem bp = make_problem(cfg.problem, cfg.problem_params, seed);
  bool ok = true;

  const OracleReport rep = check_oracle_consistency(bp.spec, probes, seed);
  double worst_g = 0.0;
  for (double v : rep.constraint_deviation) worst_g = std::max(worst_g, v);
  std::printf("[%s] oracle consistency: objective dev %.3e, worst constraint dev %.3e (tol %.1e)\n",
              rep.pass ? "PASS" : "FAIL", rep.objective_deviation, worst_g, rep.tolerance);
  ok = ok && rep.pass;

  const Index n = bp.spec.dim;
  const Index d = std::min<Index>(n, 50);
  const SketchMatrix s = sample_sketch(n, d, seed);
  const Vector x = random_feasible_point(bp.spec, seed);
  const Vector exact = sketched_objective_gradient(bp.spec, s, x, GradientMode::analytic()).value;
  const Vector fd =
      sketched_objective_gradient(bp.spec, s, x, GradientMode::directional(1e-6, GradientMode::Scheme::central))
          .value;
  const double rel = (fd - exact).norm() / std::max(exact.norm(), 1e-300);
  const bool fd_ok = rel <= 1e-4;
  std::printf("[%s] sketched directional differences vs analytic: rel err %.3e (tol 1e-4)\n",
              fd_ok ? "PASS" : "FAIL", rel);
  ok = ok && fd_ok;

  const double viol = max_violation(bp.spec, bp.spec.x0);
  const bool x0_ok = viol <= kStartFeasibilityTol;
  std::printf("[%s] start point feasible: max g(x0) = %.3e\n", x0_ok ? "PASS" : "FAIL", viol);
  ok = ok && x0_ok;

  if (bp.set) {
    const Vector y = x + Vector::Constant(n, 3.0);
    const Vector px = project(*bp.set, x + y);
    const bool idem = (project(*bp.set, px) - px).norm() <= 1e-12 * (1.0 + px.norm());
    const bool feas = max_violation(bp.spec, px) <= 1e-12 * (1.0 + px.squaredNorm());
    std::printf("[%s] projection idempotent and feasible\n", idem && feas ? "PASS" : "FAIL");
    ok = ok && idem && feas;
  }
  return ok ? 0 : kExitRun;
}

int cmd_jl(Index n, Index d, Index vectors, double eps, std::uint64_t seed, double threshold) {
  const double frac = jl_concentration_test(n, d, vectors, eps, seed);
  const bool ok = frac >= threshold;
  std::printf("[%s] JL fraction %.4f for n=%lld d=%lld eps=%.3g over %lld vectors (threshold %.3g)\n",
              ok ? "PASS" : "FAIL", frac, static_cast<long long>(n), static_cast<long long>(d), eps,
              static_cast<long long>(vectors), threshold);
  return ok ? 0 : kExitRun;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized subspace gradient methods for constrained optimization"};
  app.require_subcommand(1);

  CommonOptions common;
  auto add_common = [&](CLI::App* sub, bool need_config) {
    auto* opt = sub->add_option("--config", common.config, "INI experiment file");
    if (need_config) opt->required();
    sub->add_option("--out-dir", common.out_dir, "Output directory (default $RSG_OUT_DIR or ./rsg_out)");
    sub->add_option("--set", common.overrides, "Override section.key=value")->take_all();
  };

  std::string method, problem;
  std::uint64_t seed = 0;
  int workers = 0;
  int probes = 5;

  auto* solve = app.add_subcommand("solve", "Single run: first method and seed of the config unless given");
  add_common(solve, true);
  solve->add_option("--method", method, "Method id");
  auto* solve_seed = solve->add_option("--seed", seed, "Run seed");
  solve->add_option("--problem", problem, "Problem id");

  auto* exp = app.add_subcommand("experiment", "Run the method x seed grid");
  add_common(exp, true);
  exp->add_option("--workers", workers, "Concurrent runs")->check(CLI::PositiveNumber);

  auto* check = app.add_subcommand("check", "Oracle consistency and invariant checks for a problem");
  add_common(check, false);
  check->add_option("--problem", problem, "Problem id");
  check->add_option("--seed", seed, "Instance and probe seed");
  check->add_option("--probes", probes, "Random probe points")->check(CLI::PositiveNumber);

  Index n = 1000, d = 200, vectors = 1000;
  double eps = 0.5, threshold = 0.99;
  auto* jl = app.add_subcommand("jl-test", "Norm-preservation self-test of the Gaussian sketch");
  jl->add_option("--n", n, "Ambient dimension");
  jl->add_option("--d", d, "Reduced dimension");
  jl->add_option("--vectors", vectors, "Number of random vectors");
  jl->add_option("--eps", eps, "Distortion");
  jl->add_option("--seed", seed, "Seed");
  jl->add_option("--threshold", threshold, "Required fraction");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      std::optional<std::uint64_t> s;
      if (solve_seed->count() > 0) s = seed;
      return cmd_solve(common, method, s, problem);
    }
    if (*exp) return cmd_experiment(common, workers);
    if (*check) return cmd_check(common, problem, seed, probes);
    if (*jl) return cmd_jl(n, d, vectors, eps, seed, threshold);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitConfig;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRun;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRun;
  }
  return 0;
}
