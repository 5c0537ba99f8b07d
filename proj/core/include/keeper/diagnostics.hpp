#pragma once

#include <string>
#include <vector>

namespace keeper {

enum class Severity { Warning, Error };

// One finding produced while validating or processing a specification.
// `path` points into the document (e.g. "images[0].build.tags[1]").
struct Diagnostic {
  Severity severity = Severity::Error;
  std::string path;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

std::string to_string(Severity severity);
std::string to_string(const Diagnostic& diagnostic);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

}  // namespace keeper
