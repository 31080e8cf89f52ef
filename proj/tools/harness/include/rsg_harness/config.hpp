#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rsg/rsg_nc.hpp"
#include "rsg_harness/problems.hpp"

namespace rsg::harness {

enum class Algorithm { rsg_lc, rsg_nc, pgd };

/// One column of the experiment grid.
///
/// Unset optionals fall back to the problem's bundled tolerances and to the
/// step presets h = h_scale n / L (Gaussian sketch) or h = h_scale / L (identity).
struct MethodSpec {
  std::string id;
  Algorithm algorithm = Algorithm::rsg_lc;
  NcConfig base;
  bool gpm = false;
  std::optional<double> h;
  double h_scale = 1.0;
  std::optional<double> eps0;
  std::optional<double> delta1;
  /// Derives delta1 from a full-space stationarity target when delta1 is unset.
  std::optional<double> eps1;
  std::optional<double> eps2;
  /// PGD step; defaults to 1/L.
  std::optional<double> pgd_step;
};

struct ExperimentConfig {
  std::string problem;
  ParamMap problem_params;
  /// Seed k runs on instance problem.seed + k when set.
  bool per_seed_instance = true;
  std::vector<MethodSpec> methods;
  std::vector<std::uint64_t> seeds{0};
  int workers = 1;
  std::string out_dir;
  /// Stationarity tolerance used for the KKT pass flags in summaries.
  double kkt_eps1 = 1e-3;
};

/// Recognized method ids: rsg-lc, rsg-lc-det, gpm, rsg-nc, rsg-nc-det, pgd.
/// Other ids need an `algorithm` key in their [method.<id>] section.
MethodSpec default_method(const std::string& id);

/// Parses INI text. `overrides` are "section.key=value" strings applied on top.
/// Throws ConfigError.
ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Solver parameters for one run on a concrete problem instance.
NcConfig resolve_method(const MethodSpec& m, const BundledProblem& bp, std::uint64_t seed);
double resolve_pgd_step(const MethodSpec& m, const BundledProblem& bp);

/// "0..9" or "0,3,7".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

std::string_view to_string(Algorithm a) noexcept;

}  // namespace rsg::harness
