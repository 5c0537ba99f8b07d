#include "keeper/spec_model.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "keeper/errors.hpp"
#include "keeper/template.hpp"

namespace keeper {

namespace {

std::string node_kind(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
      return "null";
    case YAML::NodeType::Scalar:
      return "a scalar";
    case YAML::NodeType::Sequence:
      return "a list";
    case YAML::NodeType::Map:
      return "a map";
    default:
      return "an undefined node";
  }
}

[[noreturn]] void shape_error(const std::string& path, const std::string& want,
                              const YAML::Node& node) {
  throw ShapeError(path + ": expected " + want + ", found " + node_kind(node));
}

// yaml-cpp resolves anchors and aliases but leaves `<<` merge keys alone, so
// they are expanded here.  Local keys win over merged ones; among several
// merge sources the earlier one wins.
YAML::Node resolve_merge_keys(const YAML::Node& node) {
  if (node.IsSequence()) {
    YAML::Node out(YAML::NodeType::Sequence);
    for (const auto& child : node) {
      out.push_back(resolve_merge_keys(child));
    }
    return out;
  }
  if (!node.IsMap()) {
    return node;
  }
  std::set<std::string> local_keys;
  for (const auto& kv : node) {
    if (kv.first.IsScalar() && kv.first.Scalar() != "<<") {
      local_keys.insert(kv.first.Scalar());
    }
  }
  YAML::Node out(YAML::NodeType::Map);
  std::set<std::string> present;
  for (const auto& kv : node) {
    if (kv.first.IsScalar() && kv.first.Scalar() == "<<") {
      std::vector<YAML::Node> sources;
      if (kv.second.IsSequence()) {
        for (const auto& source : kv.second) sources.push_back(source);
      } else {
        sources.push_back(kv.second);
      }
      for (const auto& source : sources) {
        YAML::Node resolved = resolve_merge_keys(source);
        if (!resolved.IsMap()) {
          throw ShapeError("merge key value must be a map or a list of maps");
        }
        for (const auto& merged : resolved) {
          if (!merged.first.IsScalar()) continue;
          const std::string key = merged.first.Scalar();
          if (local_keys.count(key) || present.count(key)) continue;
          out.force_insert(merged.first, merged.second);
          present.insert(key);
        }
      }
    } else {
      out.force_insert(kv.first, resolve_merge_keys(kv.second));
      if (kv.first.IsScalar()) present.insert(kv.first.Scalar());
    }
  }
  return out;
}

std::string get_string(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) shape_error(path, "a string", node);
  return node.Scalar();
}

bool get_bool(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) shape_error(path, "a boolean", node);
  try {
    return node.as<bool>();
  } catch (const YAML::Exception&) {
    throw ShapeError(path + ": expected a boolean, found '" + node.Scalar() + "'");
  }
}

std::vector<std::string> get_string_list(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence()) shape_error(path, "a list of strings", node);
  std::vector<std::string> out;
  std::size_t i = 0;
  for (const auto& item : node) {
    if (!item.IsScalar()) shape_error(path + "[" + std::to_string(i) + "]", "a string", item);
    out.push_back(item.Scalar());
    ++i;
  }
  return out;
}

OrderedArgs get_args(const YAML::Node& node, const std::string& path) {
  if (!node.IsMap()) shape_error(path, "a map of strings", node);
  OrderedArgs out;
  for (const auto& kv : node) {
    const std::string key = get_string(kv.first, path + " key");
    const std::string value = get_string(kv.second, path + "." + key);
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == key; });
    if (it == out.end()) {
      out.emplace_back(key, value);
    } else {
      it->second = value;
    }
  }
  return out;
}

void warn_unknown(std::vector<Diagnostic>& warnings, const std::string& path,
                  const std::string& key) {
  warnings.push_back({Severity::Warning, path, "unknown key '" + key + "'"});
}

BuildSpec parse_build(const YAML::Node& node, const std::string& path,
                      std::vector<Diagnostic>& warnings) {
  if (!node.IsMap()) shape_error(path, "a map", node);
  BuildSpec build;
  for (const auto& kv : node) {
    const std::string key = get_string(kv.first, path + " key");
    if (key == "context") {
      build.context = get_string(kv.second, path + ".context");
    } else if (key == "dockerfile") {
      build.dockerfile = get_string(kv.second, path + ".dockerfile");
    } else if (key == "tags") {
      if (!kv.second.IsSequence()) shape_error(path + ".tags", "a list of tag rules", kv.second);
      std::size_t i = 0;
      for (const auto& item : kv.second) {
        const std::string tag_path = path + ".tags[" + std::to_string(i) + "]";
        if (item.IsScalar()) {
          build.tags.push_back({item.Scalar()});
        } else if (item.IsMap()) {
          TagRule rule;
          bool saw_tag = false;
          for (const auto& field : item) {
            const std::string field_key = get_string(field.first, tag_path + " key");
            if (field_key == "tag") {
              rule.tag = get_string(field.second, tag_path + ".tag");
              saw_tag = true;
            } else {
              warn_unknown(warnings, tag_path, field_key);
            }
          }
          if (!saw_tag) throw ShapeError(tag_path + ": missing key 'tag'");
          build.tags.push_back(rule);
        } else {
          shape_error(tag_path, "a tag rule", item);
        }
        ++i;
      }
    } else if (key == "keywords") {
      build.keywords = get_string_list(kv.second, path + ".keywords");
    } else if (key == "args") {
      build.args = get_args(kv.second, path + ".args");
    } else if (key == "nightly") {
      build.nightly = get_bool(kv.second, path + ".nightly");
    } else if (key == "minimal") {
      build.minimal = get_bool(kv.second, path + ".minimal");
    } else {
      warn_unknown(warnings, path, key);
    }
  }
  return build;
}

BuildEntry parse_entry(const YAML::Node& node, const std::string& path,
                       std::vector<Diagnostic>& warnings) {
  if (!node.IsMap()) shape_error(path, "a map", node);
  BuildEntry entry;
  bool saw_build = false;
  for (const auto& kv : node) {
    const std::string key = get_string(kv.first, path + " key");
    if (key == "matrix") {
      if (!kv.second.IsMap()) shape_error(path + ".matrix", "a map of lists", kv.second);
      for (const auto& axis : kv.second) {
        const std::string name = get_string(axis.first, path + ".matrix key");
        entry.matrix.push_back(
            {name, get_string_list(axis.second, path + ".matrix." + name)});
      }
    } else if (key == "build") {
      entry.build = parse_build(kv.second, path + ".build", warnings);
      saw_build = true;
    } else {
      warn_unknown(warnings, path, key);
    }
  }
  if (!saw_build) {
    throw ShapeError(path + ": missing key 'build'");
  }
  return entry;
}

StrategyRule parse_rule(const YAML::Node& node, const std::string& path,
                        std::vector<Diagnostic>& warnings) {
  if (!node.IsMap()) shape_error(path, "a map", node);
  StrategyRule rule;
  for (const auto& kv : node) {
    const std::string key = get_string(kv.first, path + " key");
    if (key == "when") {
      rule.when = get_string(kv.second, path + ".when");
    } else if (key == "expr") {
      rule.expr = get_string(kv.second, path + ".expr");
    } else if (key == "subset") {
      rule.subset = get_string(kv.second, path + ".subset");
    } else if (key == "mode") {
      rule.mode = get_string(kv.second, path + ".mode");
    } else if (key == "item") {
      rule.item = get_string(kv.second, path + ".item");
    } else {
      warn_unknown(warnings, path, key);
    }
  }
  return rule;
}

PropagateTarget parse_target(const std::string& name, const YAML::Node& node,
                             const std::string& path, std::vector<Diagnostic>& warnings) {
  if (!node.IsMap()) shape_error(path, "a map", node);
  PropagateTarget target;
  target.name = name;
  for (const auto& kv : node) {
    const std::string key = get_string(kv.first, path + " key");
    if (key == "api_token_env_var") {
      target.api_token_env_var = get_string(kv.second, path + ".api_token_env_var");
    } else if (key == "gitlab_domain") {
      target.gitlab_domain = get_string(kv.second, path + ".gitlab_domain");
    } else if (key == "gitlab_project") {
      target.gitlab_project = get_string(kv.second, path + ".gitlab_project");
    } else if (key == "ref") {
      target.ref = get_string(kv.second, path + ".ref");
    } else if (key == "mode_variable") {
      target.mode_variable = get_string(kv.second, path + ".mode_variable");
    } else if (key == "item_variable") {
      target.item_variable = get_string(kv.second, path + ".item_variable");
    } else if (key == "strategy") {
      if (!kv.second.IsSequence()) shape_error(path + ".strategy", "a list of rules", kv.second);
      std::size_t i = 0;
      for (const auto& rule : kv.second) {
        target.strategy.push_back(
            parse_rule(rule, path + ".strategy[" + std::to_string(i) + "]", warnings));
        ++i;
      }
    } else {
      warn_unknown(warnings, path, key);
    }
  }
  return target;
}

const std::set<std::string> kWhenKinds = {"rebuild-all", "nightly", "forall", "exists"};
const std::set<std::string> kModeKinds = {"rebuild-all", "rebuild-keyword", "nightly", "minimal",
                                          "nil"};

}  // namespace

ParseResult parse_spec(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw YamlError("malformed YAML at line " + std::to_string(e.mark.line + 1) + ", column " +
                    std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) shape_error("document", "a map", root);
  root = resolve_merge_keys(root);

  ParseResult result;
  KeeperSpec& spec = result.spec;
  bool saw_active = false;
  bool saw_base_url = false;
  bool saw_docker_repo = false;
  bool saw_images = false;

  for (const auto& kv : root) {
    const std::string key = get_string(kv.first, "document key");
    if (key == "active") {
      spec.active = get_bool(kv.second, "active");
      saw_active = true;
    } else if (key == "base_url") {
      spec.base_url = get_string(kv.second, "base_url");
      saw_base_url = true;
    } else if (key == "docker_repo") {
      spec.docker_repo = get_string(kv.second, "docker_repo");
      saw_docker_repo = true;
    } else if (key == "gitlab_ci_tags") {
      spec.gitlab_ci_tags = get_string_list(kv.second, "gitlab_ci_tags");
    } else if (key == "args") {
      spec.args = get_args(kv.second, "args");
    } else if (key == "images") {
      if (!kv.second.IsSequence()) shape_error("images", "a list of entries", kv.second);
      std::size_t i = 0;
      for (const auto& entry : kv.second) {
        spec.images.push_back(
            parse_entry(entry, "images[" + std::to_string(i) + "]", result.warnings));
        ++i;
      }
      saw_images = true;
    } else if (key == "propagate") {
      if (!kv.second.IsMap()) shape_error("propagate", "a map of targets", kv.second);
      for (const auto& target : kv.second) {
        const std::string name = get_string(target.first, "propagate key");
        spec.propagate.push_back(
            parse_target(name, target.second, "propagate." + name, result.warnings));
      }
    } else {
      warn_unknown(result.warnings, "", key);
    }
  }

  if (!saw_active) throw ValidationError("missing mandatory field active");
  if (spec.active) {
    if (!saw_base_url) throw ValidationError("missing mandatory field base_url");
    if (!saw_docker_repo) throw ValidationError("missing mandatory field docker_repo");
    if (!saw_images) throw ValidationError("missing mandatory field images");
  }
  return result;
}

ParseResult parse_spec_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read specification file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw IoError("failed while reading '" + path + "'");
  }
  return parse_spec(buffer.str());
}

std::vector<Diagnostic> validate_spec(const KeeperSpec& spec) {
  std::vector<Diagnostic> out;
  if (!spec.active) {
    return out;
  }
  auto error = [&](std::string path, std::string message) {
    out.push_back({Severity::Error, std::move(path), std::move(message)});
  };
  auto check_template = [&](const std::string& text, const std::string& path) {
    try {
      parse_template(text);
    } catch (const TemplateError& e) {
      error(path, e.what());
    }
  };

  if (spec.base_url.empty()) {
    error("base_url", "must not be empty");
  }
  if (spec.docker_repo.empty() ||
      std::count(spec.docker_repo.begin(), spec.docker_repo.end(), '/') != 1 ||
      spec.docker_repo.front() == '/' || spec.docker_repo.back() == '/') {
    error("docker_repo", "must have the form <user>/<name> with exactly one '/'");
  }
  for (const auto& [key, value] : spec.args) {
    check_template(value, "args." + key);
  }
  if (spec.images.empty()) {
    error("images", "must not be empty");
  }
  for (std::size_t i = 0; i < spec.images.size(); ++i) {
    const BuildEntry& entry = spec.images[i];
    const std::string base = "images[" + std::to_string(i) + "]";
    std::set<std::string> seen_axes;
    for (const MatrixAxis& axis : entry.matrix) {
      if (!seen_axes.insert(axis.name).second) {
        error(base + ".matrix", "duplicate axis '" + axis.name + "'");
        continue;
      }
      if (axis.values.empty()) {
        error(base + ".matrix." + axis.name, "axis needs at least one value");
      }
      std::set<std::string> seen_values;
      for (const std::string& value : axis.values) {
        if (!seen_values.insert(value).second) {
          error(base + ".matrix." + axis.name, "duplicate value '" + value + "'");
        }
      }
    }
    if (entry.build.context.empty()) {
      error(base + ".build.context", "must not be empty");
    } else {
      check_template(entry.build.context, base + ".build.context");
    }
    if (entry.build.dockerfile.empty()) {
      error(base + ".build.dockerfile", "must not be empty");
    } else {
      check_template(entry.build.dockerfile, base + ".build.dockerfile");
    }
    if (entry.build.tags.empty()) {
      error(base + ".build.tags", "must not be empty");
    }
    for (std::size_t j = 0; j < entry.build.tags.size(); ++j) {
      const std::string tag_path = base + ".build.tags[" + std::to_string(j) + "]";
      if (entry.build.tags[j].tag.empty()) {
        error(tag_path, "must not be empty");
      } else {
        check_template(entry.build.tags[j].tag, tag_path);
      }
    }
    for (std::size_t j = 0; j < entry.build.keywords.size(); ++j) {
      check_template(entry.build.keywords[j], base + ".build.keywords[" + std::to_string(j) + "]");
    }
    for (const auto& [key, value] : entry.build.args) {
      check_template(value, base + ".build.args." + key);
    }
  }
  for (const PropagateTarget& target : spec.propagate) {
    const std::string base = "propagate." + target.name;
    if (target.api_token_env_var.empty()) {
      error(base + ".api_token_env_var", "must not be empty");
    }
    if (target.gitlab_domain.empty()) {
      error(base + ".gitlab_domain", "must not be empty");
    }
    if (target.gitlab_project.empty()) {
      error(base + ".gitlab_project", "must not be empty");
    }
    if (target.strategy.empty()) {
      error(base + ".strategy", "must not be empty");
    }
    for (std::size_t r = 0; r < target.strategy.size(); ++r) {
      const StrategyRule& rule = target.strategy[r];
      const std::string rbase = base + ".strategy[" + std::to_string(r) + "]";
      const bool last = r + 1 == target.strategy.size();
      if (!rule.when && !last) {
        error(rbase + ".when", "only the last rule may omit 'when'");
      }
      bool quantified = false;
      if (rule.when) {
        if (!kWhenKinds.count(*rule.when)) {
          error(rbase + ".when", "unknown condition '" + *rule.when + "'");
        }
        quantified = *rule.when == "forall" || *rule.when == "exists";
      }
      if (quantified && (!rule.expr || !rule.subset)) {
        error(rbase, "'" + *rule.when + "' needs both 'expr' and 'subset'");
      }
      if (!quantified && (rule.expr || rule.subset)) {
        error(rbase, "'expr' and 'subset' require a 'forall' or 'exists' condition");
      }
      if (rule.expr) {
        check_template(*rule.expr, rbase + ".expr");
      }
      if (!kModeKinds.count(rule.mode)) {
        error(rbase + ".mode",
              rule.mode.empty() ? "missing 'mode'" : "unknown mode '" + rule.mode + "'");
      }
      if (rule.item) {
        check_template(*rule.item, rbase + ".item");
      }
    }
  }
  return out;
}

std::string serialize_spec(const KeeperSpec& spec) {
  YAML::Emitter out;
  auto str = [&out](const std::string& s) -> YAML::Emitter& {
    out << YAML::SingleQuoted << s;
    return out;
  };
  auto str_list = [&](const std::vector<std::string>& items) {
    out << YAML::BeginSeq;
    for (const std::string& item : items) str(item);
    out << YAML::EndSeq;
  };
  auto args_map = [&](const OrderedArgs& args) {
    out << YAML::BeginMap;
    for (const auto& [key, value] : args) {
      out << YAML::Key;
      str(key);
      out << YAML::Value;
      str(value);
    }
    out << YAML::EndMap;
  };

  out << YAML::BeginMap;
  out << YAML::Key << "active" << YAML::Value << spec.active;
  out << YAML::Key << "base_url" << YAML::Value;
  str(spec.base_url);
  out << YAML::Key << "docker_repo" << YAML::Value;
  str(spec.docker_repo);
  out << YAML::Key << "gitlab_ci_tags" << YAML::Value;
  str_list(spec.gitlab_ci_tags);
  out << YAML::Key << "args" << YAML::Value;
  args_map(spec.args);
  out << YAML::Key << "images" << YAML::Value << YAML::BeginSeq;
  for (const BuildEntry& entry : spec.images) {
    out << YAML::BeginMap;
    out << YAML::Key << "matrix" << YAML::Value << YAML::BeginMap;
    for (const MatrixAxis& axis : entry.matrix) {
      out << YAML::Key;
      str(axis.name);
      out << YAML::Value;
      str_list(axis.values);
    }
    out << YAML::EndMap;
    out << YAML::Key << "build" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "context" << YAML::Value;
    str(entry.build.context);
    out << YAML::Key << "dockerfile" << YAML::Value;
    str(entry.build.dockerfile);
    out << YAML::Key << "tags" << YAML::Value << YAML::BeginSeq;
    for (const TagRule& rule : entry.build.tags) {
      out << YAML::BeginMap << YAML::Key << "tag" << YAML::Value;
      str(rule.tag);
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "keywords" << YAML::Value;
    str_list(entry.build.keywords);
    out << YAML::Key << "args" << YAML::Value;
    args_map(entry.build.args);
    out << YAML::Key << "nightly" << YAML::Value << entry.build.nightly;
    out << YAML::Key << "minimal" << YAML::Value << entry.build.minimal;
    out << YAML::EndMap;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  if (!spec.propagate.empty()) {
    out << YAML::Key << "propagate" << YAML::Value << YAML::BeginMap;
    for (const PropagateTarget& target : spec.propagate) {
      out << YAML::Key;
      str(target.name);
      out << YAML::Value << YAML::BeginMap;
      out << YAML::Key << "api_token_env_var" << YAML::Value;
      str(target.api_token_env_var);
      out << YAML::Key << "gitlab_domain" << YAML::Value;
      str(target.gitlab_domain);
      out << YAML::Key << "gitlab_project" << YAML::Value;
      str(target.gitlab_project);
      out << YAML::Key << "ref" << YAML::Value;
      str(target.ref);
      out << YAML::Key << "mode_variable" << YAML::Value;
      str(target.mode_variable);
      out << YAML::Key << "item_variable" << YAML::Value;
      str(target.item_variable);
      out << YAML::Key << "strategy" << YAML::Value << YAML::BeginSeq;
      for (const StrategyRule& rule : target.strategy) {
        out << YAML::BeginMap;
        if (rule.when) {
          out << YAML::Key << "when" << YAML::Value;
          str(*rule.when);
        }
        if (rule.expr) {
          out << YAML::Key << "expr" << YAML::Value;
          str(*rule.expr);
        }
        if (rule.subset) {
          out << YAML::Key << "subset" << YAML::Value;
          str(*rule.subset);
        }
        out << YAML::Key << "mode" << YAML::Value;
        str(rule.mode);
        if (rule.item) {
          out << YAML::Key << "item" << YAML::Value;
          str(*rule.item);
        }
        out << YAML::EndMap;
      }
      out << YAML::EndSeq;
      out << YAML::EndMap;
    }
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace keeper
