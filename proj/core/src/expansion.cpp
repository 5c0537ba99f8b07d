#include "keeper/expansion.hpp"

#include <algorithm>
#include <set>

#include "keeper/errors.hpp"
#include "keeper/template.hpp"

namespace keeper {

namespace {

bool is_word_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

std::string entry_path(std::size_t entry_index) {
  return "images[" + std::to_string(entry_index) + "]";
}

}  // namespace

bool is_valid_tag(const std::string& tag) {
  if (tag.empty() || tag.size() > 128) return false;
  if (!is_word_char(tag[0])) return false;
  return std::all_of(tag.begin() + 1, tag.end(),
                     [](char c) { return is_word_char(c) || c == '.' || c == '-'; });
}

Value::Map MatrixAssignment::as_value_map() const {
  Value::Map out;
  for (const auto& [axis, value] : values) {
    out.emplace(axis, Value(value));
  }
  return out;
}

std::string MatrixAssignment::render() const {
  std::string out;
  for (const auto& [axis, value] : values) {
    if (!out.empty()) out += ',';
    out += axis + "=" + value;
  }
  return out;
}

std::vector<MatrixAssignment> expand_matrix(const BuildEntry& entry) {
  for (const MatrixAxis& axis : entry.matrix) {
    if (axis.values.empty()) return {};
  }
  std::vector<MatrixAssignment> out;
  std::vector<std::size_t> odometer(entry.matrix.size(), 0);
  while (true) {
    MatrixAssignment assignment;
    for (std::size_t i = 0; i < entry.matrix.size(); ++i) {
      assignment.values.emplace_back(entry.matrix[i].name, entry.matrix[i].values[odometer[i]]);
    }
    out.push_back(std::move(assignment));
    std::size_t i = entry.matrix.size();
    while (i > 0) {
      --i;
      if (++odometer[i] < entry.matrix[i].values.size()) break;
      odometer[i] = 0;
      if (i == 0) return out;
    }
    if (entry.matrix.empty()) return out;
  }
}

ConcreteBuild resolve_build(const BuildEntry& entry, const MatrixAssignment& assignment,
                            const KeeperSpec& spec, std::size_t entry_index) {
  const std::string base = entry_path(entry_index);
  ConcreteBuild build;
  build.assignment = assignment;
  build.id = assignment.values.empty() ? base : base + "/" + assignment.render();

  Context ctx;
  ctx.bind("matrix", Value(assignment.as_value_map()));
  auto eval = [&](const std::string& text, const std::string& path) {
    try {
      return eval_template(text, ctx);
    } catch (const Error& e) {
      throw PlanError(path + ": " + e.what());
    }
  };

  build.context = eval(entry.build.context, base + ".build.context");
  build.dockerfile = eval(entry.build.dockerfile, base + ".build.dockerfile");

  OrderedArgs merged = spec.args;
  for (const auto& [key, value] : entry.build.args) {
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&key = key](const auto& p) { return p.first == key; });
    if (it == merged.end()) {
      merged.emplace_back(key, value);
    } else {
      it->second = value;
    }
  }
  for (const auto& [key, value] : merged) {
    build.args.emplace_back(key, eval(value, base + ".build.args." + key));
  }

  std::set<std::string> seen_tags;
  for (std::size_t j = 0; j < entry.build.tags.size(); ++j) {
    const std::string path = base + ".build.tags[" + std::to_string(j) + "]";
    std::string tag = eval(entry.build.tags[j].tag, path);
    if (!is_valid_tag(tag)) {
      throw ValidationError(path + ": resolves to invalid tag '" + tag + "'");
    }
    if (!seen_tags.insert(tag).second) {
      throw PlanError(path + ": tag '" + tag + "' repeated within build " + build.id);
    }
    build.tags.push_back(std::move(tag));
  }

  for (std::size_t j = 0; j < entry.build.keywords.size(); ++j) {
    build.keywords.push_back(
        eval(entry.build.keywords[j], base + ".build.keywords[" + std::to_string(j) + "]"));
  }

  build.runner_tags = spec.gitlab_ci_tags;
  build.nightly = entry.build.nightly;
  build.minimal = entry.build.minimal;
  return build;
}

CompiledPlan compile_spec(const KeeperSpec& spec) {
  CompiledPlan plan;
  plan.propagate = spec.propagate;
  plan.docker_repo = spec.docker_repo;
  plan.base_url = spec.base_url;
  plan.gitlab_ci_tags = spec.gitlab_ci_tags;
  if (!spec.active) {
    return plan;
  }
  std::set<std::pair<std::string, std::string>> seen_dockerfiles;
  for (std::size_t i = 0; i < spec.images.size(); ++i) {
    for (const MatrixAssignment& assignment : expand_matrix(spec.images[i])) {
      ConcreteBuild build = resolve_build(spec.images[i], assignment, spec, i);
      for (const std::string& tag : build.tags) {
        auto [it, inserted] = plan.tag_index.try_emplace(tag, build.id);
        if (!inserted) {
          throw PlanError("tag '" + tag + "' produced by two builds: " + it->second + " and " +
                          build.id);
        }
      }
      std::pair<std::string, std::string> dockerfile{build.context, build.dockerfile};
      if (seen_dockerfiles.insert(dockerfile).second) {
        plan.dockerfiles.push_back(std::move(dockerfile));
      }
      plan.builds.push_back(std::move(build));
    }
  }
  return plan;
}

}  // namespace keeper
