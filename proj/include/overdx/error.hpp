#pragma once

#include <stdexcept>
#include <string>

namespace overdx {

// Input/validation problems: bad files, bad config, contract violations by
// the caller. The CLI maps these to exit code 1; everything else is 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public ValidationError {
 public:
  explicit ConfigError(const std::string& msg) : ValidationError(msg) {}
};

}  // namespace overdx
