#pragma once

#include <string>
#include <utility>
#include <vector>

#include "keeper/diagnostics.hpp"
#include "keeper/expansion.hpp"

namespace keeper {

// Generated files as (relative path, bytes), in write order.
struct ArtifactBundle {
  std::vector<std::pair<std::string, std::string>> files;

  const std::string* find(const std::string& path) const;

  bool operator==(const ArtifactBundle&) const = default;
};

// Joins a build context and Dockerfile path into one repo-relative path:
// "./mathcomp" + "./single/Dockerfile" becomes "mathcomp/single/Dockerfile".
// Rejects components escaping the repository.
std::string normalize_repo_path(const std::string& context, const std::string& dockerfile);

// Characters outside [A-Za-z0-9_.-] become '-'.
std::string sanitize_job_name(const std::string& name);

// Child-pipeline config: stages build and propagate, one job per selected
// build in plan order, one job per propagate target, a no-op job when the
// selection is empty.
std::string generate_build_config(const CompiledPlan& plan,
                                  const std::vector<ConcreteBuild>& selected);

// Replaces the `<!-- tags -->` marker with one bullet per build linking its
// tags to the Dockerfile.  A template without the marker is returned
// unchanged and reported as a warning.
std::string generate_readme(const std::string& template_text, const CompiledPlan& plan,
                            const std::string& branch = "master",
                            std::vector<Diagnostic>* warnings = nullptr);

// The compile-stage artifact set: generated/build.yml, generated/README.md,
// generated/images.txt, generated/dockerfiles.txt.  Byte-deterministic.
ArtifactBundle write_artifacts(const CompiledPlan& plan,
                               const std::vector<ConcreteBuild>& selected,
                               const std::string& readme_template,
                               const std::string& branch = "master",
                               std::vector<Diagnostic>* warnings = nullptr);

}  // namespace keeper
