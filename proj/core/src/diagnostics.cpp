#include "keeper/diagnostics.hpp"

#include <algorithm>

namespace keeper {

std::string to_string(Severity severity) {
  return severity == Severity::Warning ? "warning" : "error";
}

std::string to_string(const Diagnostic& diagnostic) {
  std::string out = to_string(diagnostic.severity);
  if (!diagnostic.path.empty()) {
    out += ": " + diagnostic.path;
  }
  out += ": " + diagnostic.message;
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(), [](const Diagnostic& d) {
    return d.severity == Severity::Error;
  });
}

}  // namespace keeper
