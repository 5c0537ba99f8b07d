#include "keeper/emit.hpp"

#include <set>

#include "keeper/errors.hpp"

namespace keeper {

namespace {

constexpr const char* kReadmeMarker = "<!-- tags -->";

std::string normalize_path(const std::string& raw) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= raw.size()) {
    std::size_t slash = raw.find('/', start);
    std::string part =
        slash == std::string::npos ? raw.substr(start) : raw.substr(start, slash - start);
    if (part == "..") {
      throw PlanError("path '" + raw + "' escapes the repository");
    }
    if (!part.empty() && part != ".") parts.push_back(part);
    if (slash == std::string::npos) break;
    start = slash + 1;
  }
  std::string out;
  for (const std::string& part : parts) {
    if (!out.empty()) out += '/';
    out += part;
  }
  return out;
}

// Single-quoted YAML scalar.
std::string quoted(const std::string& text) {
  std::string out = "'";
  for (char c : text) {
    out += c;
    if (c == '\'') out += '\'';
  }
  out += "'";
  return out;
}

void append_job_header(std::string& out, const std::string& name, const std::string& stage,
                       const std::vector<std::string>& runner_tags) {
  out += "\n" + sanitize_job_name(name) + ":\n";
  out += "  stage: " + stage + "\n";
  if (!runner_tags.empty()) {
    out += "  tags:\n";
    for (const std::string& tag : runner_tags) {
      out += "    - " + quoted(tag) + "\n";
    }
  }
  out += "  script:\n";
}

std::string context_path(const ConcreteBuild& build) {
  std::string path = normalize_path(build.context);
  return path.empty() ? "." : path;
}

}  // namespace

const std::string* ArtifactBundle::find(const std::string& path) const {
  for (const auto& [file_path, content] : files) {
    if (file_path == path) return &content;
  }
  return nullptr;
}

std::string normalize_repo_path(const std::string& context, const std::string& dockerfile) {
  return normalize_path(context + "/" + dockerfile);
}

std::string sanitize_job_name(const std::string& name) {
  std::string out = name;
  for (char& c : out) {
    bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
              c == '_' || c == '.' || c == '-';
    if (!ok) c = '-';
  }
  return out;
}

std::string generate_build_config(const CompiledPlan& plan,
                                  const std::vector<ConcreteBuild>& selected) {
  std::string out = "stages:\n  - build\n  - propagate\n";

  if (selected.empty()) {
    out += "\nno-op:\n  stage: build\n  script:\n    - 'echo \"nothing to build\"'\n";
  }

  for (const ConcreteBuild& build : selected) {
    append_job_header(out, "build-" + build.tags.front(), "build", build.runner_tags);
    std::string cmd = "docker build";
    for (const auto& [key, value] : build.args) {
      cmd += " --build-arg " + key + "=" + value;
    }
    cmd += " -f " + normalize_repo_path(build.context, build.dockerfile);
    for (const std::string& tag : build.tags) {
      cmd += " -t " + plan.docker_repo + ":" + tag;
    }
    cmd += " " + context_path(build);
    out += "    - " + quoted(cmd) + "\n";
    for (const std::string& tag : build.tags) {
      out += "    - " + quoted("docker push " + plan.docker_repo + ":" + tag) + "\n";
    }
  }

  for (const PropagateTarget& target : plan.propagate) {
    append_job_header(out, "propagate-" + target.name, "propagate", plan.gitlab_ci_tags);
    out += "    - " +
           quoted("fleetkeeper propagate --spec images.yml --target " + target.name +
                  " --execute") +
           "\n";
  }

  return out;
}

std::string generate_readme(const std::string& template_text, const CompiledPlan& plan,
                            const std::string& branch, std::vector<Diagnostic>* warnings) {
  std::size_t marker = template_text.find(kReadmeMarker);
  if (marker == std::string::npos) {
    if (warnings) {
      warnings->push_back({Severity::Warning, "",
                           std::string("marker '") + kReadmeMarker + "' not found in template"});
    }
    return template_text;
  }

  std::string bullets;
  for (const ConcreteBuild& build : plan.builds) {
    if (!bullets.empty()) bullets += "\n";
    bullets += "- [";
    for (std::size_t i = 0; i < build.tags.size(); ++i) {
      if (i > 0) bullets += ", ";
      bullets += "`" + build.tags[i] + "`";
    }
    bullets += "](" + plan.base_url + "/blob/" + branch + "/" +
               normalize_repo_path(build.context, build.dockerfile) + ")";
  }

  std::string out = template_text;
  out.replace(marker, std::string(kReadmeMarker).size(), bullets);
  return out;
}

ArtifactBundle write_artifacts(const CompiledPlan& plan,
                               const std::vector<ConcreteBuild>& selected,
                               const std::string& readme_template, const std::string& branch,
                               std::vector<Diagnostic>* warnings) {
  ArtifactBundle bundle;
  bundle.files.emplace_back("generated/build.yml", generate_build_config(plan, selected));
  std::string readme = generate_readme(readme_template, plan, branch, warnings);
  if (!readme.empty() && readme.back() != '\n') readme += '\n';
  bundle.files.emplace_back("generated/README.md", std::move(readme));

  std::string images;
  for (const ConcreteBuild& build : plan.builds) {
    images += build.tags.front() + "\t";
    for (std::size_t i = 0; i < build.tags.size(); ++i) {
      if (i > 0) images += ",";
      images += build.tags[i];
    }
    images += "\n";
  }
  bundle.files.emplace_back("generated/images.txt", std::move(images));

  std::string dockerfiles;
  std::set<std::string> seen;
  for (const auto& [context, dockerfile] : plan.dockerfiles) {
    std::string path = normalize_repo_path(context, dockerfile);
    if (seen.insert(path).second) dockerfiles += path + "\n";
  }
  bundle.files.emplace_back("generated/dockerfiles.txt", std::move(dockerfiles));

  return bundle;
}

}  // namespace keeper
