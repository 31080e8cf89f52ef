#include "rsg_harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rsg_harness/errors.hpp"

namespace rsg::harness {

namespace pt = boost::property_tree;

namespace {

constexpr std::string_view kMethodPrefix = "method.";

template <class T>
T as(const std::string& key, const std::string& value) {
  try {
    return boost::lexical_cast<T>(boost::trim_copy(value));
  } catch (const boost::bad_lexical_cast&) {
    throw ConfigError("bad value '" + value + "' for key '" + key + "'");
  }
}

bool as_flag(const std::string& key, const std::string& raw) {
  const std::string v = boost::to_lower_copy(boost::trim_copy(raw));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("bad boolean '" + raw + "' for key '" + key + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(",; \t"), boost::token_compress_on);
  parts.erase(std::remove_if(parts.begin(), parts.end(), [](const std::string& s) { return s.empty(); }),
              parts.end());
  return parts;
}

Algorithm parse_algorithm(const std::string& v) {
  if (v == "rsg-lc") return Algorithm::rsg_lc;
  if (v == "rsg-nc") return Algorithm::rsg_nc;
  if (v == "pgd") return Algorithm::pgd;
  throw ConfigError("unknown algorithm '" + v + "'");
}

void apply_method_key(MethodSpec& m, const std::string& key, const std::string& value) {
  NcConfig& c = m.base;
  if (key == "algorithm") {
    m.algorithm = parse_algorithm(value);
  } else if (key == "sketch") {
    if (value == "gaussian") {
      c.sketch_mode = SketchMode::gaussian;
    } else if (value == "identity") {
      c.sketch_mode = SketchMode::identity;
    } else {
      throw ConfigError("unknown sketch '" + value + "'");
    }
  } else if (key == "gpm") {
    m.gpm = as_flag(key, value);
  } else if (key == "h") {
    m.h = as<double>(key, value);
  } else if (key == "h_scale") {
    m.h_scale = as<double>(key, value);
  } else if (key == "d") {
    c.d_sub = as<Index>(key, value);
  } else if (key == "eps0") {
    m.eps0 = as<double>(key, value);
  } else if (key == "delta1") {
    m.delta1 = as<double>(key, value);
  } else if (key == "eps1") {
    m.eps1 = as<double>(key, value);
  } else if (key == "eps2") {
    m.eps2 = as<double>(key, value);
  } else if (key == "beta") {
    c.beta = as<double>(key, value);
  } else if (key == "mu_scale") {
    c.mu_scale = as<double>(key, value);
  } else if (key == "max_iters") {
    c.max_iters = as<std::int64_t>(key, value);
  } else if (key == "max_backtracks") {
    c.max_backtracks = as<int>(key, value);
  } else if (key == "gradient_mode") {
    if (value == "analytic") {
      c.gradient_mode.kind = GradientMode::Kind::analytic;
    } else if (value == "directional_fd") {
      c.gradient_mode.kind = GradientMode::Kind::directional_fd;
    } else {
      throw ConfigError("unknown gradient_mode '" + value + "'");
    }
  } else if (key == "fd_scheme") {
    if (value == "forward") {
      c.gradient_mode.scheme = GradientMode::Scheme::forward;
    } else if (value == "central") {
      c.gradient_mode.scheme = GradientMode::Scheme::central;
    } else {
      throw ConfigError("unknown fd_scheme '" + value + "'");
    }
  } else if (key == "fd_step") {
    c.gradient_mode.t_abs = as<double>(key, value);
  } else if (key == "sketched_norms") {
    c.use_sketched_norms = as_flag(key, value);
  } else if (key == "verify_oblique_bounds") {
    c.verify_oblique_bounds = as_flag(key, value);
  } else if (key == "step") {
    m.pgd_step = as<double>(key, value);
  } else {
    throw ConfigError("unknown method key '" + key + "'");
  }
}

void apply_override(pt::ptree& tree, const std::string& item) {
  const auto eq = item.find('=');
  const auto dot = item.rfind('.', eq);
  if (eq == std::string::npos || dot == std::string::npos || dot == 0) {
    throw ConfigError("override '" + item + "' is not section.key=value");
  }
  const std::string section = boost::trim_copy(item.substr(0, dot));
  const std::string key = boost::trim_copy(item.substr(dot + 1, eq - dot - 1));
  const std::string value = boost::trim_copy(item.substr(eq + 1));
  auto it = std::find_if(tree.begin(), tree.end(), [&](const auto& kv) { return kv.first == section; });
  if (it == tree.end()) it = tree.push_back({section, pt::ptree()});
  auto child = std::find_if(it->second.begin(), it->second.end(),
                            [&](const auto& kv) { return kv.first == key; });
  if (child == it->second.end()) {
    it->second.push_back({key, pt::ptree(value)});
  } else {
    child->second.data() = value;
  }
}

const pt::ptree* find_section(const pt::ptree& tree, const std::string& name) {
  for (const auto& [key, child] : tree) {
    if (key == name) return &child;
  }
  return nullptr;
}

}  // namespace

std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::rsg_lc: return "rsg-lc";
    case Algorithm::rsg_nc: return "rsg-nc";
    case Algorithm::pgd: return "pgd";
  }
  return "unknown";
}

MethodSpec default_method(const std::string& id) {
  MethodSpec m;
  m.id = id;
  if (id == "rsg-lc") {
    m.algorithm = Algorithm::rsg_lc;
  } else if (id == "rsg-lc-det") {
    m.algorithm = Algorithm::rsg_lc;
    m.base.sketch_mode = SketchMode::identity;
  } else if (id == "gpm") {
    m.algorithm = Algorithm::rsg_lc;
    m.base.sketch_mode = SketchMode::identity;
    m.gpm = true;
  } else if (id == "rsg-nc") {
    m.algorithm = Algorithm::rsg_nc;
  } else if (id == "rsg-nc-det") {
    m.algorithm = Algorithm::rsg_nc;
    m.base.sketch_mode = SketchMode::identity;
  } else if (id == "pgd") {
    m.algorithm = Algorithm::pgd;
  }
  return m;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  const std::string t = boost::trim_copy(text);
  const auto range = t.find("..");
  std::vector<std::uint64_t> seeds;
  if (range != std::string::npos) {
    const auto lo = as<std::uint64_t>("seeds", t.substr(0, range));
    const auto hi = as<std::uint64_t>("seeds", t.substr(range + 2));
    if (hi < lo) throw ConfigError("empty seed range '" + t + "'");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  } else {
    for (const auto& part : split_list(t)) seeds.push_back(as<std::uint64_t>("seeds", part));
  }
  if (seeds.empty()) throw ConfigError("seed list is empty");
  return seeds;
}

ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  for (const auto& o : overrides) apply_override(tree, o);

  ExperimentConfig cfg;
  const pt::ptree* problem = find_section(tree, "problem");
  if (!problem) throw ConfigError("missing [problem] section");
  for (const auto& [key, child] : *problem) {
    if (key == "name") {
      cfg.problem = child.data();
    } else if (key == "per_seed_instance") {
      cfg.per_seed_instance = as_flag(key, child.data());
    } else {
      cfg.problem_params[key] = child.data();
    }
  }
  if (cfg.problem.empty()) throw ConfigError("[problem] needs a name");
  if (!is_known_problem(cfg.problem)) throw ConfigError("unknown problem id '" + cfg.problem + "'");

  const pt::ptree* grid = find_section(tree, "grid");
  std::vector<std::string> method_ids;
  if (grid) {
    for (const auto& [key, child] : *grid) {
      const std::string& v = child.data();
      if (key == "methods") {
        method_ids = split_list(v);
      } else if (key == "seeds") {
        cfg.seeds = parse_seed_list(v);
      } else if (key == "workers") {
        cfg.workers = as<int>(key, v);
      } else if (key == "out_dir") {
        cfg.out_dir = v;
      } else if (key == "kkt_eps1") {
        cfg.kkt_eps1 = as<double>(key, v);
      } else {
        throw ConfigError("unknown [grid] key '" + key + "'");
      }
    }
  }
  if (method_ids.empty()) throw ConfigError("method list is empty");
  if (cfg.workers < 1) throw ConfigError("workers must be at least 1");

  std::set<std::string> seen;
  const pt::ptree* defaults = find_section(tree, "defaults");
  for (const auto& id : method_ids) {
    if (!seen.insert(id).second) throw ConfigError("duplicate method id '" + id + "'");
    MethodSpec m = default_method(id);
    const pt::ptree* own = find_section(tree, std::string(kMethodPrefix) + id);
    const bool known = id == "rsg-lc" || id == "rsg-lc-det" || id == "gpm" || id == "rsg-nc" ||
                       id == "rsg-nc-det" || id == "pgd";
    if (!known && !(own && own->find("algorithm") != own->not_found())) {
      throw ConfigError("unknown method id '" + id + "'");
    }
    if (defaults) {
      for (const auto& [key, child] : *defaults) {
        if (key != "algorithm") apply_method_key(m, key, child.data());
      }
    }
    if (own) {
      for (const auto& [key, child] : *own) apply_method_key(m, key, child.data());
    }
    cfg.methods.push_back(std::move(m));
  }

  for (const auto& [key, child] : tree) {
    const bool method_section = key.rfind(kMethodPrefix, 0) == 0;
    if (!method_section && key != "problem" && key != "grid" && key != "defaults") {
      throw ConfigError("unknown section [" + key + "]");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

NcConfig resolve_method(const MethodSpec& m, const BundledProblem& bp, std::uint64_t seed) {
  NcConfig c = m.base;
  const Index n = bp.spec.dim;
  c.seed = seed;
  c.eps0 = m.eps0.value_or(bp.eps0);
  c.eps2 = m.eps2.value_or(bp.eps2);
  const Index d = c.reduced_dim(n);
  if (m.delta1) {
    c.delta1 = *m.delta1;
  } else if (m.eps1) {
    c.delta1 = c.sketch_mode == SketchMode::identity ? *m.eps1 : delta1_from_eps1(*m.eps1, d, n);
  } else {
    c.delta1 = bp.delta1;
  }
  const bool gaussian = c.sketch_mode == SketchMode::gaussian;
  if (m.h) {
    c.h = *m.h;
  } else if (bp.spec.objective.smoothness && *bp.spec.objective.smoothness > 0.0) {
    const double lip = *bp.spec.objective.smoothness;
    c.h = gaussian ? m.h_scale * static_cast<double>(n) / lip : m.h_scale / lip;
  } else if (gaussian && bp.h_gaussian) {
    c.h = m.h_scale * *bp.h_gaussian;
  } else if (!gaussian && bp.h_identity) {
    c.h = m.h_scale * *bp.h_identity;
  } else {
    throw ConfigError("method '" + m.id + "' needs h: the problem has no smoothness constant");
  }
  if (m.gpm) {
    const NcConfig keep = c;
    static_cast<LcConfig&>(c) = gpm_config(keep);
  }
  try {
    c.validate(n);
  } catch (const ParameterError& e) {
    throw ConfigError("method '" + m.id + "': " + e.what());
  }
  return c;
}

double resolve_pgd_step(const MethodSpec& m, const BundledProblem& bp) {
  if (m.pgd_step) return *m.pgd_step;
  const auto& lip = bp.spec.objective.smoothness;
  if (lip && *lip > 0.0) return 1.0 / *lip;
  throw ConfigError("method '" + m.id + "' needs step: the problem has no smoothness constant");
}

}  // namespace rsg::harness
