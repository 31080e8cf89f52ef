#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rsg/errors.hpp"
#include "rsg_harness/config.hpp"
#include "rsg_harness/errors.hpp"
#include "rsg_harness/experiment.hpp"
#include "rsg_harness/problems.hpp"

using namespace rsg;
using namespace rsg::harness;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rsg_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const char* kSmallGrid = R"(
[problem]
name = box_qp
n = 8
seed = 2

[grid]
methods = rsg-lc, rsg-lc-det, pgd
seeds = 0..9
workers = 3

[defaults]
max_iters = 200
)";

}  // namespace

TEST(SeedList, RangesAndLists) {
  EXPECT_EQ(parse_seed_list("0..3"), (std::vector<std::uint64_t>{0, 1, 2, 3}));
  EXPECT_EQ(parse_seed_list("4, 1 ,9"), (std::vector<std::uint64_t>{4, 1, 9}));
  EXPECT_EQ(parse_seed_list("7"), (std::vector<std::uint64_t>{7}));
  EXPECT_THROW(parse_seed_list("5..2"), ConfigError);
  EXPECT_THROW(parse_seed_list(""), ConfigError);
  EXPECT_THROW(parse_seed_list("a"), ConfigError);
}

TEST(Config, ParsesGrid) {
  const ExperimentConfig cfg = parse_config(kSmallGrid);
  EXPECT_EQ(cfg.problem, "box_qp");
  EXPECT_EQ(cfg.problem_params.at("n"), "8");
  ASSERT_EQ(cfg.methods.size(), 3u);
  EXPECT_EQ(cfg.methods[0].id, "rsg-lc");
  EXPECT_EQ(cfg.methods[1].base.sketch_mode, SketchMode::identity);
  EXPECT_EQ(cfg.methods[2].algorithm, Algorithm::pgd);
  EXPECT_EQ(cfg.methods[0].base.max_iters, 200);
  EXPECT_EQ(cfg.seeds.size(), 10u);
  EXPECT_EQ(cfg.workers, 3);
  EXPECT_TRUE(cfg.per_seed_instance);
}

TEST(Config, MethodSectionOverridesDefaults) {
  const ExperimentConfig cfg = parse_config(std::string(kSmallGrid) + R"(
[method.rsg-lc]
d = 4
max_iters = 50
sketch = gaussian
gradient_mode = directional_fd
)");
  EXPECT_EQ(cfg.methods[0].base.d_sub, 4);
  EXPECT_EQ(cfg.methods[0].base.max_iters, 50);
  EXPECT_EQ(cfg.methods[0].base.gradient_mode.kind, GradientMode::Kind::directional_fd);
  EXPECT_EQ(cfg.methods[1].base.max_iters, 200);
}

TEST(Config, CommandLineOverrides) {
  const ExperimentConfig cfg =
      parse_config(kSmallGrid, {"grid.methods=gpm", "problem.n=5", "method.gpm.h=0.25"});
  ASSERT_EQ(cfg.methods.size(), 1u);
  EXPECT_TRUE(cfg.methods[0].gpm);
  EXPECT_EQ(cfg.problem_params.at("n"), "5");
  ASSERT_TRUE(cfg.methods[0].h);
  EXPECT_EQ(*cfg.methods[0].h, 0.25);
  EXPECT_THROW(parse_config(kSmallGrid, {"novalue"}), ConfigError);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("[grid]\nmethods = pgd\n"), ConfigError);
  EXPECT_THROW(parse_config("[problem]\nname = nope\n[grid]\nmethods = pgd\n"), ConfigError);
  EXPECT_THROW(parse_config("[problem]\nname = box_qp\n[grid]\nseeds = 0\n"), ConfigError);
  EXPECT_THROW(parse_config("[problem]\nname = box_qp\n[grid]\nmethods = mystery\n"), ConfigError);
  EXPECT_THROW(parse_config(std::string(kSmallGrid) + "[extra]\nk = 1\n"), ConfigError);
  EXPECT_THROW(parse_config(std::string(kSmallGrid) + "[method.pgd]\nwhat = 1\n"), ConfigError);
  EXPECT_THROW(parse_config(std::string(kSmallGrid) + "[method.rsg-lc]\nbeta = x\n"), ConfigError);
  EXPECT_THROW(parse_config("[problem\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/file.ini"), ConfigError);
}

TEST(Config, StepPresets) {
  const BundledProblem bp = make_problem("box_qp", {{"n", "10"}, {"seed", "1"}});
  const double L = *bp.spec.objective.smoothness;
  MethodSpec gauss = default_method("rsg-lc");
  gauss.base.d_sub = 5;
  EXPECT_NEAR(resolve_method(gauss, bp, 0).h, 10.0 / L, 1e-15);
  MethodSpec det = default_method("rsg-lc-det");
  EXPECT_NEAR(resolve_method(det, bp, 0).h, 1.0 / L, 1e-15);
  EXPECT_NEAR(resolve_pgd_step(default_method("pgd"), bp), 1.0 / L, 1e-15);
  det.eps1 = 1e-3;
  EXPECT_EQ(resolve_method(det, bp, 0).delta1, 1e-3);
  gauss.eps1 = 1e-3;
  EXPECT_NEAR(resolve_method(gauss, bp, 0).delta1, delta1_from_eps1(1e-3, 5, 10), 1e-18);
}

TEST(Config, BundledConfigsParse) {
  for (const auto& entry : fs::directory_iterator(RSG_CONFIG_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    EXPECT_NO_THROW(load_config(entry.path().string())) << entry.path();
  }
}

TEST(QuadraticIo, CsvRoundTrip) {
  const QuadraticData d = sample_box_qp_data(6, 3);
  std::stringstream s;
  write_quadratic_csv(s, d);
  const QuadraticData back = read_quadratic_csv(s);
  EXPECT_EQ(back.Q, d.Q);
  EXPECT_EQ(back.b, d.b);
}

TEST(QuadraticIo, BinaryRoundTrip) {
  const QuadraticData d = sample_box_qp_data(7, 4);
  std::stringstream s(std::ios::in | std::ios::out | std::ios::binary);
  write_quadratic_binary(s, d);
  EXPECT_EQ(s.str().substr(0, 6), "RSGQP1");
  const QuadraticData back = read_quadratic_binary(s);
  EXPECT_EQ(back.Q, d.Q);
  EXPECT_EQ(back.b, d.b);
}

TEST(QuadraticIo, RejectsGarbage) {
  std::stringstream bad("XXXXXX");
  EXPECT_THROW(read_quadratic_binary(bad), Error);
  std::stringstream ragged("1,2,3\n4,5\n");
  EXPECT_THROW(read_quadratic_csv(ragged), Error);
}

TEST(Problems, BoxQp) {
  const QuadraticData d = sample_box_qp_data(9, 5);
  const ProblemSpec p = make_box_qp(d);
  EXPECT_EQ(p.num_constraints(), 18);
  EXPECT_EQ(p.objective.value(p.x0), 0.0);
  EXPECT_EQ(p.objective.gradient(p.x0), d.b);
  EXPECT_EQ(max_violation(p, p.x0), -1.0);
  const Vector e0 = Vector::Unit(9, 0);
  EXPECT_LE((p.objective.gradient(e0) - (0.5 * (d.Q + d.Q.transpose()) * e0 + d.b)).norm(), 1e-12);
}

TEST(Problems, NmfTruthIsGlobalMinimum) {
  const NmfInstance inst = sample_nmf_instance(6, 7, 2, 0.5, 9);
  const ProblemSpec p = make_nmf_completion(inst);
  EXPECT_EQ(p.dim, (6 + 7) * 2);
  const Vector truth = inst.pack(inst.truth_u, inst.truth_v);
  EXPECT_LE(p.objective.value(truth), 1e-24);
  EXPECT_LE(p.objective.gradient(truth).norm(), 1e-12);
  EXPECT_EQ(p.x0, Vector::Ones(p.dim));
  EXPECT_LE(max_violation(p, truth), 0.0);
}

TEST(Problems, BallConstraintGradient) {
  const ProblemSpec p = make_ball_constrained(12, BallOptions{}, 3);
  const Vector x = Vector::LinSpaced(12, -1.0, 1.0);
  EXPECT_LE((p.constraints[0].gradient(x) - 2.0 * x).norm(), 1e-15);
  EXPECT_NEAR(p.constraints[0].value(x), x.squaredNorm() - 50.0, 1e-12);
}

TEST(Problems, EveryBundledStartIsFeasible) {
  for (const char* name : {"box_qp", "nmf_completion", "ball", "ball_lp", "halfline"}) {
    const BundledProblem bp = make_problem(name, {}, 1);
    EXPECT_NO_THROW(validate_problem(bp.spec)) << name;
    EXPECT_LE(max_violation(bp.spec, bp.spec.x0), 0.0) << name;
  }
  EXPECT_THROW(make_problem("nope", {}), ConfigError);
  EXPECT_THROW(make_problem("box_qp", {{"bogus", "1"}}), ConfigError);
}

TEST(Problems, InstanceSeedChangesData) {
  const BundledProblem a = make_problem("box_qp", {{"n", "5"}}, 0);
  const BundledProblem b = make_problem("box_qp", {{"n", "5"}}, 1);
  const BundledProblem c = make_problem("box_qp", {{"n", "5"}}, 0);
  EXPECT_NE(a.spec.objective.gradient(a.spec.x0), b.spec.objective.gradient(b.spec.x0));
  EXPECT_EQ(a.spec.objective.gradient(a.spec.x0), c.spec.objective.gradient(c.spec.x0));
}

TEST(Trace, RoundTrip) {
  std::vector<TraceRecord> rows(3);
  rows[0].iter = 1;
  rows[0].f = -2.5;
  rows[0].min_lambda = std::numeric_limits<double>::infinity();
  rows[1].iter = 2;
  rows[1].f = 0.1 + 0.2;
  rows[1].branch = Branch::dir2;
  rows[1].active_size = 4;
  rows[2].iter = 3;
  rows[2].branch = Branch::terminate;
  rows[2].max_violation = -std::numeric_limits<double>::infinity();
  std::stringstream s;
  TraceWriter w(s);
  for (const auto& r : rows) w.write(r);
  EXPECT_EQ(s.str().substr(0, s.str().find('\n')), kTraceHeader);
  const std::vector<TraceRecord> back = read_trace(s);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[0].f, -2.5);
  EXPECT_TRUE(std::isinf(back[0].min_lambda));
  EXPECT_EQ(back[1].f, 0.1 + 0.2);
  EXPECT_EQ(back[1].branch, Branch::dir2);
  EXPECT_EQ(back[1].active_size, 4);
  EXPECT_EQ(back[2].branch, Branch::terminate);
}

TEST(Aggregate, SampleStd) {
  std::vector<RunSummary> runs(4);
  const double f[] = {1.0, 2.0, 4.0, 7.0};
  for (int i = 0; i < 3; ++i) {
    runs[i].method = "a";
    runs[i].final_f = f[i];
  }
  runs[3].method = "b";
  runs[3].final_f = f[3];
  const auto agg = aggregate(runs);
  ASSERT_EQ(agg.size(), 2u);
  EXPECT_EQ(agg[0].method, "a");
  EXPECT_NEAR(agg[0].mean_final_f, 7.0 / 3.0, 1e-15);
  EXPECT_NEAR(agg[0].std_final_f, std::sqrt(((1 - 7.0 / 3) * (1 - 7.0 / 3) + (2 - 7.0 / 3) * (2 - 7.0 / 3) +
                                              (4 - 7.0 / 3) * (4 - 7.0 / 3)) / 2.0),
              1e-15);
  EXPECT_EQ(agg[1].std_final_f, 0.0);
}

TEST(Experiment, GridWritesTracesAndSummary) {
  const fs::path dir = fresh_dir("grid");
  const ExperimentConfig cfg = parse_config(kSmallGrid);
  const ExperimentResult res = run_experiment(cfg, dir);
  ASSERT_EQ(res.runs.size(), 30u);
  std::size_t traces = 0;
  for (const auto& e : fs::directory_iterator(dir / "traces")) traces += e.path().extension() == ".csv";
  EXPECT_EQ(traces, 30u);

  const auto doc = nlohmann::json::parse(read_file(dir / "summary.json"));
  ASSERT_EQ(doc["runs"].size(), 30u);
  ASSERT_EQ(doc["methods"].size(), 3u);
  for (const auto& agg : doc["methods"]) {
    std::vector<double> finals;
    for (const auto& run : doc["runs"]) {
      if (run["method"] != agg["method"]) continue;
      std::ifstream in(dir / run["trace_file"].get<std::string>());
      const auto rows = read_trace(in);
      ASSERT_FALSE(rows.empty());
      EXPECT_EQ(rows.back().f, run["final_f"].get<double>());
      finals.push_back(rows.back().f);
    }
    ASSERT_EQ(finals.size(), 10u);
    const double mean = std::accumulate(finals.begin(), finals.end(), 0.0) / 10.0;
    double ss = 0.0;
    for (double v : finals) ss += (v - mean) * (v - mean);
    EXPECT_NEAR(agg["mean_final_f"].get<double>(), mean, 1e-9 * (1.0 + std::abs(mean)));
    EXPECT_NEAR(agg["std_final_f"].get<double>(), std::sqrt(ss / 9.0), 1e-9 * (1.0 + std::abs(mean)));
  }
}

TEST(Experiment, RerunIsBitIdentical) {
  const ExperimentConfig cfg = parse_config(kSmallGrid, {"grid.seeds=0..2", "grid.workers=2"});
  const fs::path a = fresh_dir("rerun_a");
  const fs::path b = fresh_dir("rerun_b");
  run_experiment(cfg, a);
  run_experiment(cfg, b);
  for (const auto& e : fs::directory_iterator(a / "traces")) {
    const std::string ta = read_file(e.path());
    const std::string tb = read_file(b / "traces" / e.path().filename());
    std::string strip_a, strip_b;
    // wall_ms_cum is the only nondeterministic column.
    auto strip = [](const std::string& t) {
      std::stringstream in(t), out;
      std::string line;
      while (std::getline(in, line)) {
        std::vector<std::string> cols;
        std::stringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cols.push_back(c);
        cols.erase(cols.begin() + 9);
        for (const auto& x : cols) out << x << ',';
        out << '\n';
      }
      return out.str();
    };
    EXPECT_EQ(strip(ta), strip(tb)) << e.path();
  }
}

TEST(Experiment, InstanceSeedFollowsFlag) {
  ExperimentConfig cfg = parse_config(kSmallGrid);
  EXPECT_EQ(instance_seed(cfg, 3), 3u);
  cfg.per_seed_instance = false;
  EXPECT_EQ(instance_seed(cfg, 3), 0u);
}

TEST(Experiment, RunSingleReportsKkt) {
  const BundledProblem bp = make_problem("halfline", {});
  const RunOutcome out = run_single(bp, default_method("rsg-lc-det"), 0, 1e-6);
  EXPECT_EQ(out.summary.status, SolverStatus::converged_kkt);
  EXPECT_TRUE(out.summary.kkt.pass());
  EXPECT_NEAR(out.summary.final_f, -1.0, 1e-12);
}

#ifdef RSG_CLI_PATH
namespace {
int run_cli(const std::string& args) {
  const int rc = std::system((std::string(RSG_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}
}  // namespace

TEST(Cli, ExitCodes) {
  const fs::path dir = fresh_dir("cli");
  const fs::path good = dir / "good.ini";
  std::ofstream(good) << "[problem]\nname = halfline\n[grid]\nmethods = rsg-lc-det, pgd\nseeds = 0..1\n"
                          "[method.pgd]\nstep = 0.5\n";
  const fs::path stall = dir / "stall.ini";
  std::ofstream(stall) << "[problem]\nname = halfline\n[grid]\nmethods = rsg-lc-det\n"
                          "[defaults]\nh = 100\nmax_backtracks = 0\n";
  const fs::path bad = dir / "bad.ini";
  std::ofstream(bad) << "[problem]\nname = halfline\n[grid]\nmethods = \n";
  const std::string out = " --out-dir " + (dir / "out").string();
  EXPECT_EQ(run_cli("experiment --config " + good.string() + out), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "summary.json"));
  EXPECT_EQ(run_cli("experiment --config " + stall.string() + out), 1);
  EXPECT_EQ(run_cli("experiment --config " + bad.string() + out), 2);
  EXPECT_EQ(run_cli("experiment --config " + (dir / "missing.ini").string() + out), 2);
  EXPECT_EQ(run_cli("check --problem ball_lp"), 0);
}
#endif
