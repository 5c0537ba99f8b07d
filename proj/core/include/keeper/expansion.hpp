#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "keeper/spec_model.hpp"
#include "keeper/value.hpp"

namespace keeper {

// One point of an entry's matrix, axes in declaration order.
struct MatrixAssignment {
  std::vector<std::pair<std::string, std::string>> values;

  Value::Map as_value_map() const;
  // "mathcomp=2.2.0,coq=dev"
  std::string render() const;

  bool operator==(const MatrixAssignment&) const = default;
};

struct ConcreteBuild {
  std::string id;  // "images[<entry>]/<assignment>", unique across the plan
  MatrixAssignment assignment;
  std::string context;
  std::string dockerfile;
  OrderedArgs args;
  std::vector<std::string> tags;  // first entry is the canonical name
  std::vector<std::string> keywords;
  std::vector<std::string> runner_tags;
  bool nightly = false;
  bool minimal = false;

  bool operator==(const ConcreteBuild&) const = default;
};

struct CompiledPlan {
  std::vector<ConcreteBuild> builds;
  std::map<std::string, std::string> tag_index;  // tag -> build id, injective
  std::vector<std::pair<std::string, std::string>> dockerfiles;  // (context, dockerfile)
  std::vector<PropagateTarget> propagate;
  std::string docker_repo;
  std::string base_url;
  std::vector<std::string> gitlab_ci_tags;

  bool operator==(const CompiledPlan&) const = default;
};

// Registry tag grammar: [A-Za-z0-9_][A-Za-z0-9_.-]{0,127}
bool is_valid_tag(const std::string& tag);

// Cartesian product in declaration order, rightmost axis varying fastest.
// An entry without axes yields one empty assignment.
std::vector<MatrixAssignment> expand_matrix(const BuildEntry& entry);

// Resolves every interpolable field against {matrix: assignment}.  Keywords
// are resolved here but are not visible to the other templates.  Throws
// ValidationError when a rendered tag violates the tag grammar, PlanError on
// interpolation failure or a duplicated tag within the build.
ConcreteBuild resolve_build(const BuildEntry& entry, const MatrixAssignment& assignment,
                            const KeeperSpec& spec, std::size_t entry_index);

// Expands and resolves every entry, builds the tag index, checks injectivity,
// collects the deduplicated Dockerfile list.  An inactive spec yields an
// empty plan.  Throws PlanError naming the tag and both build ids when two
// builds share a tag.
CompiledPlan compile_spec(const KeeperSpec& spec);

}  // namespace keeper
