#pragma once

#include <optional>
#include <string>
#include <vector>

#include "keeper/diagnostics.hpp"
#include "keeper/expansion.hpp"
#include "keeper/selection.hpp"
#include "keeper/spec_model.hpp"

namespace keeper {

// One pipeline trigger to issue downstream.  The token is carried as an
// environment-variable name; nothing here ever holds the secret itself.
struct TriggerRequest {
  std::string target_name;
  std::string domain;
  std::string project_id;
  std::string ref;
  std::string token_env_var;
  // Output mode first, then the item when the firing rule carried one.
  OrderedArgs variables;

  bool operator==(const TriggerRequest&) const = default;
};

// Transport-agnostic request shape.  The token form field holds the
// "$VAR" placeholder; substitution happens at send time.
struct HttpRequestDesc {
  std::string method;
  std::string url;
  OrderedArgs form;

  bool operator==(const HttpRequestDesc&) const = default;
};

// Rule conditions: absent `when` is unconditionally true, rebuild-all and
// nightly compare against the input mode, forall/exists evaluate `expr`
// per selected build and test comma-set inclusion in `subset`.
bool eval_condition(const StrategyRule& rule, const std::vector<ConcreteBuild>& selected,
                    RebuildMode input_mode);

// First rule whose condition holds decides: nil means no trigger, any other
// mode becomes a request.  `item` templates see the deduplicated keyword
// union of the selected builds.  No rule firing means no trigger.
std::optional<TriggerRequest> eval_strategy(const PropagateTarget& target,
                                            const std::vector<ConcreteBuild>& selected,
                                            RebuildMode input_mode,
                                            std::vector<Diagnostic>* warnings = nullptr);

// Evaluates every propagate target of the plan, in declaration order.
std::vector<TriggerRequest> plan_triggers(const CompiledPlan& plan,
                                          const Selection& selection, RebuildMode input_mode,
                                          std::vector<Diagnostic>* warnings = nullptr);

HttpRequestDesc render_trigger(const TriggerRequest& req);

}  // namespace keeper
