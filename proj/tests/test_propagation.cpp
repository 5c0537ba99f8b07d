#include <doctest.h>

#include <optional>

#include "fixtures.hpp"
#include "keeper/errors.hpp"
#include "keeper/expansion.hpp"
#include "keeper/propagation.hpp"
#include "keeper/selection.hpp"
#include "keeper/spec_model.hpp"

using namespace keeper;

namespace {

CompiledPlan plan_for(const std::string& text) {
  ParseResult parsed = parse_spec(text);
  REQUIRE(!has_errors(validate_spec(parsed.spec)));
  return compile_spec(parsed.spec);
}

CompiledPlan mathcomp_plan() { return plan_for(mathcomp_spec_text() + propagate_block_text()); }

Selection all_of(const CompiledPlan& plan) {
  return select_builds(plan, {{{RebuildMode::RebuildAll, {}}}, InputSource::TriggerVariables});
}

Selection by_keywords(const CompiledPlan& plan, std::vector<std::string> items) {
  return select_builds(
      plan, {{{RebuildMode::RebuildKeyword, std::move(items)}}, InputSource::TriggerVariables});
}

const PropagateTarget& target_named(const CompiledPlan& plan, const std::string& name) {
  for (const auto& target : plan.propagate) {
    if (target.name == name) return target;
  }
  REQUIRE(false);
  return plan.propagate.front();
}

StrategyRule stripped_subset_rule(const std::string& subset, const std::string& mode) {
  StrategyRule rule;
  rule.when = "forall";
  rule.expr = "{matrix[coq][//pl/.][%.*]}";
  rule.subset = subset;
  rule.mode = mode;
  return rule;
}

}  // namespace

TEST_CASE("rule without condition always holds") {
  StrategyRule rule;
  rule.mode = "minimal";
  CHECK(eval_condition(rule, {}, RebuildMode::Minimal));
  CHECK(eval_condition(rule, {}, RebuildMode::RebuildAll));
  CompiledPlan plan = plan_for(coq_spec_text("'dev'"));
  CHECK(eval_condition(rule, plan.builds, RebuildMode::Nightly));
}

TEST_CASE("mode conditions mirror the input mode") {
  StrategyRule all;
  all.when = "rebuild-all";
  all.mode = "rebuild-all";
  StrategyRule night;
  night.when = "nightly";
  night.mode = "nightly";
  for (RebuildMode mode : {RebuildMode::RebuildAll, RebuildMode::RebuildKeyword,
                           RebuildMode::Nightly, RebuildMode::Minimal}) {
    CHECK(eval_condition(all, {}, mode) == (mode == RebuildMode::RebuildAll));
    CHECK(eval_condition(night, {}, mode) == (mode == RebuildMode::Nightly));
  }
}

TEST_CASE("forall accepts legacy series selections") {
  CompiledPlan plan = plan_for(coq_spec_text("'8.4pl6', '8.5.0'"));
  StrategyRule rule = stripped_subset_rule("8.4,8.5", "nil");
  CHECK(eval_condition(rule, plan.builds, RebuildMode::Minimal));

  CompiledPlan wider = plan_for(coq_spec_text("'8.4pl6', '8.5.0', '8.19.0'"));
  CHECK(!eval_condition(rule, wider.builds, RebuildMode::Minimal));
}

TEST_CASE("suffix strip drops the last dotted component") {
  CompiledPlan plan = plan_for(coq_spec_text("'8.5'"));
  StrategyRule rule = stripped_subset_rule("8.4,8.5", "nil");
  CHECK(!eval_condition(rule, plan.builds, RebuildMode::Minimal));
  StrategyRule series = stripped_subset_rule("8", "nil");
  CHECK(eval_condition(series, plan.builds, RebuildMode::Minimal));
}

TEST_CASE("exists requires one member inside the subset") {
  StrategyRule rule;
  rule.when = "exists";
  rule.expr = "{matrix[coq]}";
  rule.subset = "dev";
  rule.mode = "nightly";
  CompiledPlan without = plan_for(coq_spec_text("'8.19', '8.20'"));
  CHECK(!eval_condition(rule, without.builds, RebuildMode::Minimal));
  CompiledPlan with = plan_for(coq_spec_text("'8.19', 'dev'"));
  CHECK(eval_condition(rule, with.builds, RebuildMode::Minimal));
}

TEST_CASE("quantifiers over the empty selection") {
  StrategyRule forall_rule = stripped_subset_rule("8.4", "nil");
  CHECK(eval_condition(forall_rule, {}, RebuildMode::Minimal));
  StrategyRule exists_rule = forall_rule;
  exists_rule.when = "exists";
  CHECK(!eval_condition(exists_rule, {}, RebuildMode::Minimal));
}

TEST_CASE("subset membership ignores duplicates and order") {
  CompiledPlan plan = plan_for(coq_spec_text("'8.5.0', '8.4pl6', '8.4pl7'"));
  StrategyRule rule = stripped_subset_rule(" 8.5 , 8.4 ,", "nil");
  CHECK(eval_condition(rule, plan.builds, RebuildMode::Minimal));
}

TEST_CASE("rebuild-all input triggers both targets") {
  CompiledPlan plan = mathcomp_plan();
  Selection sel = all_of(plan);
  std::vector<TriggerRequest> reqs = plan_triggers(plan, sel, RebuildMode::RebuildAll);
  REQUIRE(reqs.size() == 2);
  CHECK(reqs[0] == TriggerRequest{"mathcomp", "gitlab.inria.fr", "44938", "master", "DMC_TOKEN",
                                  {{"CRON_MODE", "rebuild-all"}}});
  CHECK(reqs[1] == TriggerRequest{"mathcomp-dev", "gitlab.inria.fr", "44939", "master",
                                  "MC_TOKEN", {{"CRON_MODE", "minimal"}}});
}

TEST_CASE("legacy-only selection propagates nothing") {
  CompiledPlan plan = plan_for(coq_spec_text("'8.4pl6', '8.5.0'"));
  Selection sel = by_keywords(plan, {"8.4pl6", "8.5.0"});
  REQUIRE(sel.builds.size() == 2);
  CHECK(plan_triggers(plan, sel, RebuildMode::RebuildKeyword).empty());
}

TEST_CASE("keyword selection forwards the keyword union") {
  CompiledPlan plan = mathcomp_plan();
  Selection sel = by_keywords(plan, {"8.19", "8.18"});
  REQUIRE(sel.builds.size() == 3);
  std::vector<TriggerRequest> reqs = plan_triggers(plan, sel, RebuildMode::RebuildKeyword);
  REQUIRE(reqs.size() == 1);
  CHECK(reqs[0] == TriggerRequest{"mathcomp", "gitlab.inria.fr", "44938", "master", "DMC_TOKEN",
                                  {{"CRON_MODE", "rebuild-keyword"}, {"ITEM", "8.19,8.18"}}});
}

TEST_CASE("dev-only selection sends nightly downstream") {
  CompiledPlan plan = plan_for(coq_spec_text("'dev'"));
  Selection sel = all_of(plan);
  std::optional<TriggerRequest> req =
      eval_strategy(target_named(plan, "mathcomp-dev"), sel.builds, RebuildMode::Minimal);
  REQUIRE(req.has_value());
  CHECK(req->variables == OrderedArgs{{"CRON_MODE", "nightly"}});
}

TEST_CASE("recent series fire the exists fallback") {
  CompiledPlan plan = plan_for(coq_spec_text("'8.19.0', '8.12.2'"));
  Selection sel = all_of(plan);
  std::optional<TriggerRequest> req =
      eval_strategy(target_named(plan, "mathcomp-dev"), sel.builds, RebuildMode::Minimal);
  REQUIRE(req.has_value());
  CHECK(req->variables == OrderedArgs{{"CRON_MODE", "minimal"}});
}

TEST_CASE("first matching rule wins over later matches") {
  CompiledPlan plan = plan_for(coq_spec_text("'8.4pl6'"));
  PropagateTarget target = target_named(plan, "mathcomp");
  Selection sel = all_of(plan);

  std::optional<TriggerRequest> req =
      eval_strategy(target, sel.builds, RebuildMode::RebuildKeyword);
  CHECK(!req.has_value());

  std::swap(target.strategy[1], target.strategy[2]);
  req = eval_strategy(target, sel.builds, RebuildMode::RebuildKeyword);
  REQUIRE(req.has_value());
  CHECK(req->variables.front().second == "rebuild-keyword");
}

TEST_CASE("no matching rule yields no trigger") {
  CompiledPlan plan = mathcomp_plan();
  PropagateTarget target = target_named(plan, "mathcomp");
  target.strategy.resize(1);
  CHECK(!eval_strategy(target, {}, RebuildMode::Minimal).has_value());
}

TEST_CASE("vacuous forall is reported") {
  CompiledPlan plan = mathcomp_plan();
  std::vector<Diagnostic> warnings;
  std::optional<TriggerRequest> req =
      eval_strategy(target_named(plan, "mathcomp"), {}, RebuildMode::Minimal, &warnings);
  CHECK(!req.has_value());
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].path == "propagate.mathcomp.strategy[1]");
  CHECK(warnings[0].message == "forall condition is vacuously true: no builds selected");
}

TEST_CASE("expr failure names target and rule") {
  CompiledPlan plan = plan_for(coq_spec_text("'dev'"));
  PropagateTarget target = target_named(plan, "mathcomp");
  target.strategy[1].expr = "{matrix[missing]}";
  CHECK_THROWS_WITH_AS(
      eval_strategy(target, plan.builds, RebuildMode::Minimal),
      doctest::Contains("propagate.mathcomp.strategy[1]"), PlanError);
}

TEST_CASE("item failure names target and rule") {
  CompiledPlan plan = plan_for(coq_spec_text("'dev'"));
  PropagateTarget target = target_named(plan, "mathcomp");
  target.strategy[2].item = "{matrix[coq]}";
  CHECK_THROWS_WITH_AS(
      eval_strategy(target, plan.builds, RebuildMode::Minimal),
      doctest::Contains("propagate.mathcomp.strategy[2].item"), PlanError);
}

TEST_CASE("item sees deduplicated keywords in first-seen order") {
  CompiledPlan plan = mathcomp_plan();
  Selection sel = by_keywords(plan, {"8.17", "8.16"});
  REQUIRE(sel.builds.size() == 4);
  std::optional<TriggerRequest> req =
      eval_strategy(target_named(plan, "mathcomp"), sel.builds, RebuildMode::RebuildKeyword);
  REQUIRE(req.has_value());
  REQUIRE(req->variables.size() == 2);
  CHECK(req->variables[1] == std::pair<std::string, std::string>{"ITEM", "8.17,8.16"});
}

TEST_CASE("rendered trigger spells out the endpoint and form") {
  TriggerRequest req{"mathcomp", "gitlab.inria.fr", "44938", "master", "DMC_TOKEN",
                     {{"CRON_MODE", "rebuild-keyword"}, {"ITEM", "8.19,8.18"}}};
  HttpRequestDesc desc = render_trigger(req);
  CHECK(desc.method == "POST");
  CHECK(desc.url == "https://gitlab.inria.fr/api/v4/projects/44938/trigger/pipeline");
  CHECK(desc.form == OrderedArgs{{"token", "$DMC_TOKEN"},
                                 {"ref", "master"},
                                 {"variables[CRON_MODE]", "rebuild-keyword"},
                                 {"variables[ITEM]", "8.19,8.18"}});
}

TEST_CASE("domain with explicit scheme is used verbatim") {
  TriggerRequest req{"t", "http://127.0.0.1:8080", "7", "master", "TOKEN",
                     {{"CRON_MODE", "minimal"}}};
  CHECK(render_trigger(req).url == "http://127.0.0.1:8080/api/v4/projects/7/trigger/pipeline");
}

TEST_CASE("trigger without item carries one variable") {
  TriggerRequest req{"mathcomp", "gitlab.inria.fr", "44938", "main", "DMC_TOKEN",
                     {{"CRON_MODE", "rebuild-all"}}};
  HttpRequestDesc desc = render_trigger(req);
  CHECK(desc.form == OrderedArgs{{"token", "$DMC_TOKEN"},
                                 {"ref", "main"},
                                 {"variables[CRON_MODE]", "rebuild-all"}});
}

TEST_CASE("strategy evaluation is deterministic") {
  CompiledPlan plan = mathcomp_plan();
  Selection sel = by_keywords(plan, {"8.18"});
  auto first = plan_triggers(plan, sel, RebuildMode::RebuildKeyword);
  auto second = plan_triggers(plan, sel, RebuildMode::RebuildKeyword);
  CHECK(first == second);
  REQUIRE(first.size() == 1);
  CHECK(first[0].variables == OrderedArgs{{"CRON_MODE", "rebuild-keyword"}, {"ITEM", "8.18"}});
}
