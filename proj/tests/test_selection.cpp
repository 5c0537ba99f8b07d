#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "keeper/errors.hpp"
#include "keeper/expansion.hpp"
#include "keeper/selection.hpp"
#include "keeper/spec_model.hpp"

using namespace keeper;

namespace {

CompiledPlan reference_plan() {
  ParseResult parsed = parse_spec(mathcomp_spec_text());
  REQUIRE(validate_spec(parsed.spec).empty());
  return compile_spec(parsed.spec);
}

std::vector<std::string> ids(const Selection& sel) {
  std::vector<std::string> out;
  for (const auto& build : sel.builds) out.push_back(build.id);
  return out;
}

PipelineInput input_for(std::vector<RebuildDirective> directives) {
  return {std::move(directives), InputSource::TriggerVariables};
}

}  // namespace

TEST_CASE("mode names round-trip") {
  for (RebuildMode mode : {RebuildMode::RebuildAll, RebuildMode::RebuildKeyword,
                           RebuildMode::Nightly, RebuildMode::Minimal}) {
    CHECK(parse_rebuild_mode(to_string(mode)) == mode);
  }
  CHECK(!parse_rebuild_mode("rebuild"));
  CHECK(!parse_rebuild_mode(""));
  CHECK(!parse_rebuild_mode("Minimal"));
}

TEST_CASE("default input is minimal") {
  PipelineInput input = default_input();
  CHECK(input.source == InputSource::Default);
  CHECK(input.effective_mode() == RebuildMode::Minimal);
  REQUIRE(input.directives.size() == 1);
  CHECK(input.directives[0].items.empty());
}

TEST_CASE("commit message without directives yields nothing") {
  CHECK(parse_commit_directives("fix typo").empty());
  CHECK(parse_commit_directives("").empty());
  CHECK(parse_commit_directives("update docker-keeper docs\n\nmore detail").empty());
}

TEST_CASE("single keyword directive") {
  auto directives = parse_commit_directives("docker-keeper: rebuild-keyword: 8.19");
  REQUIRE(directives.size() == 1);
  CHECK(directives[0].mode == RebuildMode::RebuildKeyword);
  CHECK(directives[0].items == std::vector<std::string>{"8.19"});
}

TEST_CASE("directive lines accumulate in order") {
  auto directives = parse_commit_directives(
      "Bump coq\n"
      "\n"
      "docker-keeper: rebuild-keyword: 8.19, 8.18\n"
      "docker-keeper: nightly\n");
  REQUIRE(directives.size() == 2);
  CHECK(directives[0].mode == RebuildMode::RebuildKeyword);
  CHECK(directives[0].items == std::vector<std::string>{"8.19", "8.18"});
  CHECK(directives[1].mode == RebuildMode::Nightly);
  CHECK(directives[1].items.empty());
}

TEST_CASE("directive line tolerates surrounding whitespace") {
  auto directives = parse_commit_directives("   docker-keeper:   rebuild-all   \r\n");
  REQUIRE(directives.size() == 1);
  CHECK(directives[0].mode == RebuildMode::RebuildAll);
}

TEST_CASE("keyword items are trimmed and empties dropped") {
  auto directives = parse_commit_directives("docker-keeper: rebuild-keyword:  a , ,b,");
  REQUIRE(directives.size() == 1);
  CHECK(directives[0].items == std::vector<std::string>{"a", "b"});
}

TEST_CASE("unrecognized directives fail closed") {
  CHECK_THROWS_AS(parse_commit_directives("docker-keeper: rebuild"), DirectiveError);
  CHECK_THROWS_AS(parse_commit_directives("docker-keeper:"), DirectiveError);
  CHECK_THROWS_AS(parse_commit_directives("docker-keeper: rebuild-keyword:"), DirectiveError);
  CHECK_THROWS_AS(parse_commit_directives("docker-keeper: rebuild-keyword: , ,"), DirectiveError);
  CHECK_THROWS_AS(parse_commit_directives("docker-keeper: minimal: extra"), DirectiveError);
  CHECK_THROWS_AS(parse_commit_directives("ok\ndocker-keeper: npe\nok"), DirectiveError);
  CHECK_THROWS_WITH_AS(parse_commit_directives("docker-keeper: nightly: now"),
                       "directive 'nightly' takes no arguments", DirectiveError);
}

TEST_CASE("effective mode is the first directive") {
  PipelineInput input = input_for({{RebuildMode::Nightly, {}}, {RebuildMode::RebuildAll, {}}});
  CHECK(input.effective_mode() == RebuildMode::Nightly);
  CHECK(input_for({}).effective_mode() == RebuildMode::Minimal);
}

TEST_CASE("rebuild-all selects every build in plan order") {
  CompiledPlan plan = reference_plan();
  Selection sel = select_builds(plan, input_for({{RebuildMode::RebuildAll, {}}}));
  REQUIRE(sel.builds.size() == plan.builds.size());
  for (std::size_t i = 0; i < plan.builds.size(); ++i) {
    CHECK(sel.builds[i].id == plan.builds[i].id);
  }
  CHECK(sel.warnings.empty());
}

TEST_CASE("keyword unique to one entry selects one build") {
  CompiledPlan plan = reference_plan();
  Selection sel =
      select_builds(plan, input_for({{RebuildMode::RebuildKeyword, {"8.19"}}}));
  CHECK(ids(sel) == std::vector<std::string>{"images[0]/mathcomp=2.2.0,coq=8.19"});
  CHECK(sel.warnings.empty());
}

TEST_CASE("keyword shared by both entries selects both builds") {
  CompiledPlan plan = reference_plan();
  Selection sel =
      select_builds(plan, input_for({{RebuildMode::RebuildKeyword, {"8.17"}}}));
  CHECK(ids(sel) == std::vector<std::string>{"images[0]/mathcomp=2.2.0,coq=8.17",
                                             "images[1]/mathcomp=2.1.0,coq=8.17"});
}

TEST_CASE("multiple keywords union without duplicates") {
  CompiledPlan plan = reference_plan();
  Selection sel = select_builds(
      plan, input_for({{RebuildMode::RebuildKeyword, {"8.17", "8.19", "8.17"}}}));
  CHECK(ids(sel) == std::vector<std::string>{"images[0]/mathcomp=2.2.0,coq=8.19",
                                             "images[0]/mathcomp=2.2.0,coq=8.17",
                                             "images[1]/mathcomp=2.1.0,coq=8.17"});
}

TEST_CASE("unmatched keyword warns and selects nothing") {
  CompiledPlan plan = reference_plan();
  Selection sel =
      select_builds(plan, input_for({{RebuildMode::RebuildKeyword, {"9.99"}}}));
  CHECK(sel.builds.empty());
  REQUIRE(sel.warnings.size() == 1);
  CHECK(sel.warnings[0].message == "keyword '9.99' matches no build");
}

TEST_CASE("nightly and minimal follow build flags") {
  ParseResult parsed = parse_spec(mathcomp_spec_text());
  parsed.spec.images[0].build.nightly = true;
  parsed.spec.images[1].build.minimal = true;
  CompiledPlan plan = compile_spec(parsed.spec);

  Selection nightly = select_builds(plan, input_for({{RebuildMode::Nightly, {}}}));
  REQUIRE(nightly.builds.size() == 5);
  for (const auto& build : nightly.builds) CHECK(build.id.rfind("images[0]/", 0) == 0);

  Selection minimal = select_builds(plan, input_for({{RebuildMode::Minimal, {}}}));
  REQUIRE(minimal.builds.size() == 3);
  for (const auto& build : minimal.builds) CHECK(build.id.rfind("images[1]/", 0) == 0);
}

TEST_CASE("minimal selects nothing when no build opts in") {
  CompiledPlan plan = reference_plan();
  Selection sel = select_builds(plan, default_input());
  CHECK(sel.builds.empty());
  CHECK(sel.warnings.empty());
}

TEST_CASE("directives union across lines") {
  ParseResult parsed = parse_spec(mathcomp_spec_text());
  parsed.spec.images[1].build.nightly = true;
  CompiledPlan plan = compile_spec(parsed.spec);
  Selection sel = select_builds(
      plan,
      input_for({{RebuildMode::RebuildKeyword, {"8.19"}}, {RebuildMode::Nightly, {}}}));
  CHECK(ids(sel) == std::vector<std::string>{"images[0]/mathcomp=2.2.0,coq=8.19",
                                             "images[1]/mathcomp=2.1.0,coq=8.18",
                                             "images[1]/mathcomp=2.1.0,coq=8.17",
                                             "images[1]/mathcomp=2.1.0,coq=8.16"});
}

TEST_CASE("selection agrees with per-build keyword scan") {
  CompiledPlan plan = reference_plan();
  std::mt19937 rng(20240818);
  std::vector<std::string> pool{"8.19", "8.18", "8.17", "8.16", "dev", "nope", "2.2.0"};
  for (int round = 0; round < 200; ++round) {
    std::vector<std::string> items;
    std::size_t n = 1 + rng() % 4;
    for (std::size_t i = 0; i < n; ++i) items.push_back(pool[rng() % pool.size()]);

    Selection sel =
        select_builds(plan, input_for({{RebuildMode::RebuildKeyword, items}}));

    std::vector<std::string> expected;
    for (const auto& build : plan.builds) {
      bool hit = false;
      for (const auto& item : items) {
        if (std::find(build.keywords.begin(), build.keywords.end(), item) !=
            build.keywords.end()) {
          hit = true;
        }
      }
      if (hit) expected.push_back(build.id);
    }
    CHECK(ids(sel) == expected);
  }
}

TEST_CASE("adding a directive never shrinks the selection") {
  ParseResult parsed = parse_spec(mathcomp_spec_text());
  parsed.spec.images[0].build.nightly = true;
  CompiledPlan plan = compile_spec(parsed.spec);

  std::vector<RebuildDirective> directives{{RebuildMode::RebuildKeyword, {"8.17"}}};
  Selection before = select_builds(plan, input_for(directives));
  directives.push_back({RebuildMode::Nightly, {}});
  Selection after = select_builds(plan, input_for(directives));

  std::set<std::string> after_ids;
  for (const auto& build : after.builds) after_ids.insert(build.id);
  for (const auto& build : before.builds) CHECK(after_ids.count(build.id) == 1);
  CHECK(after.builds.size() >= before.builds.size());
}
