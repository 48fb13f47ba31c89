#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace teqkd {

/// Accumulates validation findings so a config loader can report all of them
/// at once instead of stopping at the first.
struct Diagnostics {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  void error(std::string msg) { errors.push_back(std::move(msg)); }
  void warn(std::string msg) { warnings.push_back(std::move(msg)); }
  bool ok() const { return errors.empty(); }
};

/// Thrown when a configuration violates one or more invariants.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);

  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// Throws ConfigError if `diag` holds any errors.
void throw_if_errors(const Diagnostics& diag);

}  // namespace teqkd
