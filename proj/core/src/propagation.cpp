#include "keeper/propagation.hpp"

#include <algorithm>
#include <set>

#include "keeper/errors.hpp"
#include "keeper/template.hpp"

namespace keeper {

namespace {

std::string trim_copy(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::set<std::string> comma_set(const std::string& text) {
  std::set<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string piece =
        comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start);
    piece = trim_copy(piece);
    if (!piece.empty()) out.insert(piece);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

Context build_context(const ConcreteBuild& build) {
  Context ctx;
  ctx.bind("matrix", Value(build.assignment.as_value_map()));
  ctx.bind("keywords", Value(Value::List(build.keywords)));
  return ctx;
}

bool build_satisfies(const std::string& expr, const std::set<std::string>& subset,
                     const ConcreteBuild& build) {
  Context ctx = build_context(build);
  std::set<std::string> values = comma_set(eval_template(expr, ctx));
  return std::all_of(values.begin(), values.end(),
                     [&](const std::string& v) { return subset.count(v) > 0; });
}

std::vector<std::string> keyword_union(const std::vector<ConcreteBuild>& selected) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const ConcreteBuild& build : selected) {
    for (const std::string& keyword : build.keywords) {
      if (seen.insert(keyword).second) out.push_back(keyword);
    }
  }
  return out;
}

std::string rule_path(const std::string& target_name, std::size_t index) {
  return "propagate." + target_name + ".strategy[" + std::to_string(index) + "]";
}

}  // namespace

bool eval_condition(const StrategyRule& rule, const std::vector<ConcreteBuild>& selected,
                    RebuildMode input_mode) {
  if (!rule.when) return true;
  if (*rule.when == "rebuild-all") return input_mode == RebuildMode::RebuildAll;
  if (*rule.when == "nightly") return input_mode == RebuildMode::Nightly;
  std::set<std::string> subset = comma_set(*rule.subset);
  if (*rule.when == "forall") {
    return std::all_of(selected.begin(), selected.end(), [&](const ConcreteBuild& build) {
      return build_satisfies(*rule.expr, subset, build);
    });
  }
  return std::any_of(selected.begin(), selected.end(), [&](const ConcreteBuild& build) {
    return build_satisfies(*rule.expr, subset, build);
  });
}

std::optional<TriggerRequest> eval_strategy(const PropagateTarget& target,
                                            const std::vector<ConcreteBuild>& selected,
                                            RebuildMode input_mode,
                                            std::vector<Diagnostic>* warnings) {
  for (std::size_t i = 0; i < target.strategy.size(); ++i) {
    const StrategyRule& rule = target.strategy[i];
    bool holds;
    try {
      holds = eval_condition(rule, selected, input_mode);
    } catch (const Error& err) {
      throw PlanError(rule_path(target.name, i) + ": " + err.what());
    }
    if (!holds) continue;
    if (rule.when && *rule.when == "forall" && selected.empty() && warnings) {
      warnings->push_back({Severity::Warning, rule_path(target.name, i),
                           "forall condition is vacuously true: no builds selected"});
    }
    if (rule.mode == "nil") return std::nullopt;

    TriggerRequest req;
    req.target_name = target.name;
    req.domain = target.gitlab_domain;
    req.project_id = target.gitlab_project;
    req.ref = target.ref;
    req.token_env_var = target.api_token_env_var;
    req.variables.emplace_back(target.mode_variable, rule.mode);
    if (rule.item) {
      Context ctx;
      ctx.bind("keywords", Value(Value::List(keyword_union(selected))));
      try {
        req.variables.emplace_back(target.item_variable, eval_template(*rule.item, ctx));
      } catch (const Error& err) {
        throw PlanError(rule_path(target.name, i) + ".item: " + err.what());
      }
    }
    return req;
  }
  return std::nullopt;
}

std::vector<TriggerRequest> plan_triggers(const CompiledPlan& plan, const Selection& selection,
                                          RebuildMode input_mode,
                                          std::vector<Diagnostic>* warnings) {
  std::vector<TriggerRequest> out;
  for (const PropagateTarget& target : plan.propagate) {
    if (auto req = eval_strategy(target, selection.builds, input_mode, warnings)) {
      out.push_back(std::move(*req));
    }
  }
  return out;
}

HttpRequestDesc render_trigger(const TriggerRequest& req) {
  HttpRequestDesc desc;
  desc.method = "POST";
  std::string origin =
      req.domain.find("://") != std::string::npos ? req.domain : "https://" + req.domain;
  desc.url = origin + "/api/v4/projects/" + req.project_id + "/trigger/pipeline";
  desc.form.emplace_back("token", "$" + req.token_env_var);
  desc.form.emplace_back("ref", req.ref);
  for (const auto& [key, value] : req.variables) {
    desc.form.emplace_back("variables[" + key + "]", value);
  }
  return desc;
}

}  // namespace keeper
