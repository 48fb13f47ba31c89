#include "teqkd/diagnostics.hpp"

namespace teqkd {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::string out = "invalid configuration:";
  for (const auto& i : issues) {
    out += "\n  ";
    out += i;
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

void throw_if_errors(const Diagnostics& diag) {
  if (!diag.ok()) throw ConfigError(diag.errors);
}

}  // namespace teqkd
