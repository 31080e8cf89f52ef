#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rsg/diagnostics.hpp"
#include "rsg/solver_state.hpp"
#include "rsg_harness/config.hpp"

namespace rsg::harness {

/// Column names of the trace CSV, in TraceRecord field order.
extern const char* const kTraceHeader;

/// Appends rows to a stream; non-finite values print as inf, -inf, nan.
class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& out);
  void write(const TraceRecord& r);

 private:
  std::ostream& out_;
};

std::vector<TraceRecord> read_trace(std::istream& in);

struct RunSummary {
  std::string method;
  std::string problem;
  std::uint64_t seed = 0;
  double final_f = 0.0;
  std::int64_t iterations = 0;
  SolverStatus status = SolverStatus::running;
  std::string message;
  KktReport kkt;
  std::int64_t f_evals = 0;
  std::int64_t grad_evals = 0;
  std::int64_t g_evals = 0;
  double wall_ms = 0.0;
  std::string trace_file;
};

struct RunOutcome {
  SolveResult result;
  RunSummary summary;
};

/// Runs one (method, seed) cell, streaming trace rows to `sink`.
RunOutcome run_single(const BundledProblem& bp, const MethodSpec& m, std::uint64_t seed,
                      double kkt_eps1, const TraceSink& sink = {});

/// Instance seed for grid seed k.
std::uint64_t instance_seed(const ExperimentConfig& cfg, std::uint64_t seed);

struct MethodAggregate {
  std::string method;
  std::size_t runs = 0;
  double mean_final_f = 0.0;
  /// Sample standard deviation (n - 1 denominator); 0 for a single run.
  double std_final_f = 0.0;
};

std::vector<MethodAggregate> aggregate(const std::vector<RunSummary>& runs);

/// Writes the summary document (runs and per-method aggregates) as JSON.
void write_summary(std::ostream& out, const ExperimentConfig& cfg, const std::vector<RunSummary>& runs);

/// Default out dir: $RSG_OUT_DIR, else "rsg_out".
std::filesystem::path default_out_dir();

std::string trace_file_name(const std::string& method, std::uint64_t seed);

struct ExperimentResult {
  std::vector<RunSummary> runs;
  /// 0 when every run finished without stalled or failed status, 1 otherwise.
  int exit_code = 0;
};

/// Executes the method x seed grid with up to cfg.workers threads, writing
/// out_dir/traces/<method>__seed<k>.csv and out_dir/summary.json.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace rsg::harness
