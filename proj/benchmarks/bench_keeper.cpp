#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "keeper/emit.hpp"
#include "keeper/expansion.hpp"
#include "keeper/selection.hpp"
#include "keeper/spec_model.hpp"
#include "keeper/template.hpp"
#include "keeper/value.hpp"

namespace {

keeper::KeeperSpec synthetic_spec(int per_axis) {
  keeper::KeeperSpec spec;
  spec.active = true;
  spec.base_url = "https://example.org/fleet";
  spec.docker_repo = "acme/fleet";
  spec.gitlab_ci_tags = {"large"};
  spec.args = {{"BASE_TAG", "{matrix[base]}"}};

  keeper::BuildEntry entry;
  keeper::MatrixAxis base{"base", {}};
  keeper::MatrixAxis rev{"rev", {}};
  for (int i = 0; i < per_axis; ++i) {
    base.values.push_back("b" + std::to_string(i) + ".4pl" + std::to_string(i));
    rev.values.push_back("r" + std::to_string(i));
  }
  entry.matrix = {base, rev};
  entry.build.context = "fleet";
  entry.build.dockerfile = "fleet/Dockerfile";
  entry.build.tags = {{"{matrix[base]}-{matrix[rev]}"}, {"edge-{matrix[base]}-{matrix[rev]}"}};
  entry.build.keywords = {"{matrix[base]}"};
  spec.images.push_back(entry);
  return spec;
}

void BM_ParseTemplate(benchmark::State& state) {
  const std::string text = "prefix-{matrix[coq][//pl/.][%.*]}-{keywords[/#/,][#,]}";
  for (auto _ : state) {
    benchmark::DoNotOptimize(keeper::parse_template(text));
  }
}
BENCHMARK(BM_ParseTemplate);

void BM_EvalTemplate(benchmark::State& state) {
  keeper::Template tmpl = keeper::parse_template("{matrix[coq][//pl/.][%.*]}-{keywords[#*.]}");
  keeper::Context ctx;
  ctx.bind("matrix", keeper::Value(keeper::Value::Map{{"coq", keeper::Value("8.4pl6")}}));
  ctx.bind("keywords", keeper::Value(keeper::Value::List{"8.19", "8.18", "dev"}));
  for (auto _ : state) {
    benchmark::DoNotOptimize(keeper::eval_template(tmpl, ctx));
  }
}
BENCHMARK(BM_EvalTemplate);

void BM_GlobSuffixLongest(benchmark::State& state) {
  keeper::GlobPattern pattern;
  pattern.source = "*.tar.*";
  using Token = keeper::GlobPattern::Token;
  using Kind = keeper::GlobPattern::TokenKind;
  pattern.tokens = {Token{Kind::AnySeq, '\0'},  Token{Kind::Literal, '.'},
                    Token{Kind::Literal, 't'},  Token{Kind::Literal, 'a'},
                    Token{Kind::Literal, 'r'},  Token{Kind::Literal, '.'},
                    Token{Kind::AnySeq, '\0'}};
  const std::string subject = "mirror.example/fleet/coq-8.19.0-bullseye.tar.gz";
  for (auto _ : state) {
    benchmark::DoNotOptimize(keeper::glob_match_anchored(pattern, subject,
                                                         keeper::Anchor::Suffix,
                                                         keeper::Extent::Longest));
  }
}
BENCHMARK(BM_GlobSuffixLongest);

void BM_CompileSpec(benchmark::State& state) {
  keeper::KeeperSpec spec = synthetic_spec(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(keeper::compile_spec(spec));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_CompileSpec)->Arg(2)->Arg(8)->Arg(16);

void BM_GenerateBuildConfig(benchmark::State& state) {
  keeper::CompiledPlan plan = keeper::compile_spec(synthetic_spec(static_cast<int>(state.range(0))));
  keeper::Selection all = keeper::select_builds(
      plan, {{{keeper::RebuildMode::RebuildAll, {}}}, keeper::InputSource::TriggerVariables});
  for (auto _ : state) {
    benchmark::DoNotOptimize(keeper::generate_build_config(plan, all.builds));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(all.builds.size()));
}
BENCHMARK(BM_GenerateBuildConfig)->Arg(2)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
