#pragma once

#include <string>

#include "rsg/errors.hpp"

namespace rsg::harness {

/// Malformed configuration, unknown ids or bad parameter values.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config: " + what) {}
};

}  // namespace rsg::harness
