#include "rsg_harness/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "rsg/baselines.hpp"
#include "rsg/rsg_lc.hpp"
#include "rsg/rsg_nc.hpp"
#include "rsg_harness/errors.hpp"

namespace rsg::harness {

const char* const kTraceHeader =
    "iter,f,dir_norm,min_lambda,active_size,alpha,backtracks,max_violation,f_evals_cum,wall_ms_cum,branch";

namespace {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_real(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  return std::stod(s);
}

Branch parse_branch(const std::string& s) {
  if (s == "dir1") return Branch::dir1;
  if (s == "dir2") return Branch::dir2;
  if (s == "terminate") return Branch::terminate;
  throw std::runtime_error("unknown branch '" + s + "'");
}

nlohmann::json real_json(double v) {
  if (std::isfinite(v)) return v;
  return format_real(v);
}

nlohmann::json summary_json(const RunSummary& r) {
  return {
      {"method", r.method},
      {"problem", r.problem},
      {"seed", r.seed},
      {"final_f", real_json(r.final_f)},
      {"iterations", r.iterations},
      {"status", std::string(to_string(r.status))},
      {"message", r.message},
      {"kkt",
       {{"stationarity", real_json(r.kkt.stationarity)},
        {"max_violation", real_json(r.kkt.max_violation)},
        {"min_multiplier", real_json(r.kkt.min_multiplier)},
        {"max_complementarity", real_json(r.kkt.max_complementarity)},
        {"pass", r.kkt.pass()}}},
      {"f_evals", r.f_evals},
      {"grad_evals", r.grad_evals},
      {"g_evals", r.g_evals},
      {"wall_ms", r.wall_ms},
      {"trace_file", r.trace_file},
  };
}

}  // namespace

TraceWriter::TraceWriter(std::ostream& out) : out_(out) { out_ << kTraceHeader << '\n'; }

void TraceWriter::write(const TraceRecord& r) {
  out_ << r.iter << ',' << format_real(r.f) << ',' << format_real(r.dir_norm) << ','
       << format_real(r.min_lambda) << ',' << r.active_size << ',' << format_real(r.alpha) << ','
       << r.backtracks << ',' << format_real(r.max_violation) << ',' << r.f_evals_cum << ','
       << format_real(r.wall_ms_cum) << ',' << to_string(r.branch) << '\n';
}

std::vector<TraceRecord> read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw std::runtime_error("bad trace header");
  std::vector<TraceRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 11) throw std::runtime_error("bad trace row: " + line);
    TraceRecord r;
    r.iter = std::stoll(cells[0]);
    r.f = parse_real(cells[1]);
    r.dir_norm = parse_real(cells[2]);
    r.min_lambda = parse_real(cells[3]);
    r.active_size = std::stoll(cells[4]);
    r.alpha = parse_real(cells[5]);
    r.backtracks = std::stoll(cells[6]);
    r.max_violation = parse_real(cells[7]);
    r.f_evals_cum = std::stoll(cells[8]);
    r.wall_ms_cum = parse_real(cells[9]);
    r.branch = parse_branch(cells[10]);
    rows.push_back(r);
  }
  return rows;
}

RunOutcome run_single(const BundledProblem& bp, const MethodSpec& m, std::uint64_t seed,
                      double kkt_eps1, const TraceSink& sink) {
  RunOutcome out;
  double eps0 = 0.0;
  double eps2 = 0.0;
  const auto start = std::chrono::steady_clock::now();
  if (m.algorithm == Algorithm::pgd) {
    if (!bp.set) throw ConfigError("problem '" + bp.spec.name + "' has no projection set for pgd");
    eps0 = m.eps0.value_or(bp.eps0);
    eps2 = m.eps2.value_or(bp.eps2);
    out.result = pgd_solve(bp.spec, *bp.set, resolve_pgd_step(m, bp), m.base.max_iters, sink);
  } else {
    const NcConfig cfg = resolve_method(m, bp, seed);
    eps0 = cfg.eps0;
    eps2 = cfg.eps2;
    out.result = m.algorithm == Algorithm::rsg_lc ? lc_solve(bp.spec, cfg, sink) : nc_solve(bp.spec, cfg, sink);
  }
  const double wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  const SolverState& st = out.result.state;
  RunSummary& s = out.summary;
  s.method = m.id;
  s.problem = bp.spec.name;
  s.seed = seed;
  s.final_f = st.f_val;
  s.iterations = st.iter;
  s.status = st.status;
  s.message = st.message;
  s.f_evals = st.counters.f_evals + st.counters.monitor_f_evals;
  s.grad_evals = st.counters.grad_evals;
  s.g_evals = st.counters.g_evals;
  s.wall_ms = wall;
  if (bp.spec.objective.has_gradient()) {
    const Vector& eta = out.result.eta;
    const double eps3 = default_complementarity_budget(bp.spec, st.x, eta, eps0);
    s.kkt = kkt_check(bp.spec, st.x, eta, kkt_eps1, eps2, eps3);
  }
  return out;
}

std::uint64_t instance_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  return cfg.per_seed_instance ? seed : 0;
}

std::vector<MethodAggregate> aggregate(const std::vector<RunSummary>& runs) {
  std::vector<MethodAggregate> out;
  std::map<std::string, std::size_t> slot;
  std::vector<std::vector<double>> values;
  for (const auto& r : runs) {
    auto [it, fresh] = slot.emplace(r.method, out.size());
    if (fresh) {
      out.push_back({r.method});
      values.emplace_back();
    }
    values[it->second].push_back(r.final_f);
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto& v = values[k];
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    out[k].runs = v.size();
    out[k].mean_final_f = mean;
    out[k].std_final_f = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  }
  return out;
}

void write_summary(std::ostream& out, const ExperimentConfig& cfg, const std::vector<RunSummary>& runs) {
  nlohmann::json doc;
  doc["problem"] = cfg.problem;
  doc["problem_params"] = cfg.problem_params;
  doc["per_seed_instance"] = cfg.per_seed_instance;
  doc["seeds"] = cfg.seeds;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : runs) rows.push_back(summary_json(r));
  doc["runs"] = std::move(rows);
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& a : aggregate(runs)) {
    methods.push_back({{"method", a.method},
                       {"runs", a.runs},
                       {"mean_final_f", real_json(a.mean_final_f)},
                       {"std_final_f", real_json(a.std_final_f)}});
  }
  doc["methods"] = std::move(methods);
  out << doc.dump(2) << '\n';
}

std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv("RSG_OUT_DIR"); env && *env) return env;
  return "rsg_out";
}

std::string trace_file_name(const std::string& method, std::uint64_t seed) {
  return method + "__seed" + std::to_string(seed) + ".csv";
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  const fs::path trace_dir = out_dir / "traces";
  fs::create_directories(trace_dir);

  struct Cell {
    std::size_t method;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (std::size_t m = 0; m < cfg.methods.size(); ++m)
    for (std::uint64_t s : cfg.seeds) cells.push_back({m, s});

  // Instances are built once per distinct instance seed.
  std::map<std::uint64_t, BundledProblem> instances;
  for (std::uint64_t s : cfg.seeds) {
    const std::uint64_t key = instance_seed(cfg, s);
    if (!instances.count(key)) instances.emplace(key, make_problem(cfg.problem, cfg.problem_params, key));
  }
  // Resolve every method up front so that config errors surface before any run.
  for (const auto& m : cfg.methods) {
    for (const auto& [key, bp] : instances) {
      if (m.algorithm == Algorithm::pgd) {
        if (!bp.set) throw ConfigError("problem '" + cfg.problem + "' has no projection set for pgd");
        (void)resolve_pgd_step(m, bp);
      } else {
        (void)resolve_method(m, bp, 0);
      }
    }
  }

  ExperimentResult result;
  result.runs.resize(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < cells.size(); k = next++) {
      const Cell& c = cells[k];
      const MethodSpec& m = cfg.methods[c.method];
      const BundledProblem& bp = instances.at(instance_seed(cfg, c.seed));
      const std::string file = trace_file_name(m.id, c.seed);
      std::ofstream trace(trace_dir / file);
      TraceWriter writer(trace);
      RunSummary s;
      try {
        s = run_single(bp, m, c.seed, cfg.kkt_eps1, [&](const TraceRecord& r) { writer.write(r); }).summary;
      } catch (const std::exception& e) {
        s.method = m.id;
        s.problem = bp.spec.name;
        s.seed = c.seed;
        s.status = SolverStatus::failed;
        s.message = e.what();
      }
      s.trace_file = (fs::path("traces") / file).string();
      result.runs[k] = std::move(s);
    }
  };
  const int threads = std::max(1, std::min<int>(cfg.workers, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ofstream summary(out_dir / "summary.json");
  write_summary(summary, cfg, result.runs);
  for (const auto& r : result.runs) {
    if (r.status == SolverStatus::stalled || r.status == SolverStatus::failed) result.exit_code = 1;
  }
  return result;
}

}  // namespace rsg::harness
