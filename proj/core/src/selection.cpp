#include "keeper/selection.hpp"

#include <algorithm>
#include <set>

#include "keeper/errors.hpp"

namespace keeper {

namespace {

constexpr std::string_view kDirectivePrefix = "docker-keeper:";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> split_items(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string_view piece =
        comma == std::string_view::npos ? text.substr(start) : text.substr(start, comma - start);
    piece = trim(piece);
    if (!piece.empty()) out.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string to_string(RebuildMode mode) {
  switch (mode) {
    case RebuildMode::RebuildAll:
      return "rebuild-all";
    case RebuildMode::RebuildKeyword:
      return "rebuild-keyword";
    case RebuildMode::Nightly:
      return "nightly";
    case RebuildMode::Minimal:
      return "minimal";
  }
  return "minimal";
}

std::optional<RebuildMode> parse_rebuild_mode(std::string_view text) {
  if (text == "rebuild-all") return RebuildMode::RebuildAll;
  if (text == "rebuild-keyword") return RebuildMode::RebuildKeyword;
  if (text == "nightly") return RebuildMode::Nightly;
  if (text == "minimal") return RebuildMode::Minimal;
  return std::nullopt;
}

RebuildMode PipelineInput::effective_mode() const {
  return directives.empty() ? RebuildMode::Minimal : directives.front().mode;
}

PipelineInput default_input() {
  return {{{RebuildMode::Minimal, {}}}, InputSource::Default};
}

std::vector<RebuildDirective> parse_commit_directives(const std::string& message) {
  std::vector<RebuildDirective> out;
  std::size_t line_start = 0;
  while (line_start <= message.size()) {
    std::size_t newline = message.find('\n', line_start);
    std::string_view line = std::string_view(message).substr(
        line_start, newline == std::string::npos ? std::string::npos : newline - line_start);
    line = trim(line);
    if (line.substr(0, kDirectivePrefix.size()) == kDirectivePrefix) {
      std::string_view rest = trim(line.substr(kDirectivePrefix.size()));
      std::size_t colon = rest.find(':');
      std::string_view name = trim(colon == std::string_view::npos ? rest : rest.substr(0, colon));
      std::string_view args =
          colon == std::string_view::npos ? std::string_view() : rest.substr(colon + 1);
      std::optional<RebuildMode> mode = parse_rebuild_mode(name);
      if (!mode) {
        throw DirectiveError("unrecognized rebuild directive '" + std::string(rest) + "'");
      }
      if (*mode == RebuildMode::RebuildKeyword) {
        std::vector<std::string> items = split_items(args);
        if (items.empty()) {
          throw DirectiveError("directive 'rebuild-keyword' needs at least one item");
        }
        out.push_back({*mode, std::move(items)});
      } else {
        if (colon != std::string_view::npos) {
          throw DirectiveError("directive '" + std::string(name) + "' takes no arguments");
        }
        out.push_back({*mode, {}});
      }
    }
    if (newline == std::string::npos) break;
    line_start = newline + 1;
  }
  return out;
}

Selection select_builds(const CompiledPlan& plan, const PipelineInput& input) {
  Selection out;
  std::set<std::string> chosen;
  for (const RebuildDirective& directive : input.directives) {
    switch (directive.mode) {
      case RebuildMode::RebuildAll:
        for (const ConcreteBuild& build : plan.builds) chosen.insert(build.id);
        break;
      case RebuildMode::Nightly:
        for (const ConcreteBuild& build : plan.builds) {
          if (build.nightly) chosen.insert(build.id);
        }
        break;
      case RebuildMode::Minimal:
        for (const ConcreteBuild& build : plan.builds) {
          if (build.minimal) chosen.insert(build.id);
        }
        break;
      case RebuildMode::RebuildKeyword:
        for (const std::string& item : directive.items) {
          bool matched = false;
          for (const ConcreteBuild& build : plan.builds) {
            if (std::find(build.keywords.begin(), build.keywords.end(), item) !=
                build.keywords.end()) {
              chosen.insert(build.id);
              matched = true;
            }
          }
          if (!matched) {
            out.warnings.push_back(
                {Severity::Warning, "", "keyword '" + item + "' matches no build"});
          }
        }
        break;
    }
  }
  for (const ConcreteBuild& build : plan.builds) {
    if (chosen.count(build.id)) out.builds.push_back(build);
  }
  return out;
}

}  // namespace keeper
