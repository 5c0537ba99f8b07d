#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "keeper/diagnostics.hpp"
#include "keeper/expansion.hpp"

namespace keeper {

enum class RebuildMode { RebuildAll, RebuildKeyword, Nightly, Minimal };

std::string to_string(RebuildMode mode);
std::optional<RebuildMode> parse_rebuild_mode(std::string_view text);

struct RebuildDirective {
  RebuildMode mode = RebuildMode::Minimal;
  std::vector<std::string> items;  // non-empty exactly for RebuildKeyword

  bool operator==(const RebuildDirective&) const = default;
};

enum class InputSource { CommitMessage, TriggerVariables, Default };

struct PipelineInput {
  std::vector<RebuildDirective> directives;  // never empty
  InputSource source = InputSource::Default;

  // The mode strategy conditions see; the first directive wins.
  RebuildMode effective_mode() const;
};

PipelineInput default_input();

// Scans every line for `docker-keeper: <directive>`.  Recognized directives:
// rebuild-all, minimal, nightly, rebuild-keyword: <comma-separated items>.
// Throws DirectiveError on a `docker-keeper:` line it cannot understand, so a
// typoed rebuild request never silently becomes a no-op.
std::vector<RebuildDirective> parse_commit_directives(const std::string& message);

struct Selection {
  std::vector<ConcreteBuild> builds;  // plan order, deduplicated by id
  std::vector<Diagnostic> warnings;   // keywords that matched nothing
};

// Union over the directives: rebuild-all selects everything, rebuild-keyword
// selects builds whose keywords intersect the items, nightly/minimal select
// the flagged builds.
Selection select_builds(const CompiledPlan& plan, const PipelineInput& input);

}  // namespace keeper
