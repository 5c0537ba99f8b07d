#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "keeper/diagnostics.hpp"

namespace keeper {

// Build arguments keep their declaration order.
using OrderedArgs = std::vector<std::pair<std::string, std::string>>;

struct TagRule {
  std::string tag;  // template string
  bool operator==(const TagRule&) const = default;
};

struct MatrixAxis {
  std::string name;
  std::vector<std::string> values;
  bool operator==(const MatrixAxis&) const = default;
};

struct BuildSpec {
  std::string context;     // template string
  std::string dockerfile;  // template string
  std::vector<TagRule> tags;
  std::vector<std::string> keywords;  // template strings
  OrderedArgs args;                   // merged over the global args, entry wins
  bool nightly = false;
  bool minimal = false;
  bool operator==(const BuildSpec&) const = default;
};

struct BuildEntry {
  std::vector<MatrixAxis> matrix;  // declaration order
  BuildSpec build;
  bool operator==(const BuildEntry&) const = default;
};

struct StrategyRule {
  std::optional<std::string> when;    // rebuild-all | nightly | forall | exists
  std::optional<std::string> expr;    // template, present iff when is forall/exists
  std::optional<std::string> subset;  // comma-separated, present iff when is forall/exists
  std::string mode;                   // rebuild-all | rebuild-keyword | nightly | minimal | nil
  std::optional<std::string> item;    // template over the keyword union
  bool operator==(const StrategyRule&) const = default;
};

struct PropagateTarget {
  std::string name;
  std::string api_token_env_var;
  std::string gitlab_domain;
  std::string gitlab_project;
  std::string ref = "master";
  std::string mode_variable = "CRON_MODE";
  std::string item_variable = "ITEM";
  std::vector<StrategyRule> strategy;
  bool operator==(const PropagateTarget&) const = default;
};

struct KeeperSpec {
  bool active = false;
  std::string base_url;
  std::string docker_repo;
  std::vector<std::string> gitlab_ci_tags;
  OrderedArgs args;
  std::vector<BuildEntry> images;
  std::vector<PropagateTarget> propagate;  // declaration order
  bool operator==(const KeeperSpec&) const = default;
};

struct ParseResult {
  KeeperSpec spec;
  std::vector<Diagnostic> warnings;  // unknown keys and similar non-fatal findings
};

// Throws YamlError (malformed document), ShapeError (wrong node kind) or
// ValidationError (missing mandatory field while active).  YAML anchors,
// aliases and `<<` merge keys are resolved before typing.
ParseResult parse_spec(const std::string& text);

// Reads the file and delegates to parse_spec.  Throws IoError when the file
// cannot be read.
ParseResult parse_spec_file(const std::string& path);

// Semantic checks beyond shape: tag/axis uniqueness, strategy rule placement,
// docker_repo form, template syntax.  Diagnostics come out in document order.
// An inactive spec compiles to an empty plan, so it validates clean.
std::vector<Diagnostic> validate_spec(const KeeperSpec& spec);

// Emits YAML that parses back to an equal model.
std::string serialize_spec(const KeeperSpec& spec);

}  // namespace keeper
