#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "keeper/diagnostics.hpp"
#include "keeper/emit.hpp"
#include "keeper/errors.hpp"
#include "keeper/expansion.hpp"
#include "keeper/http.hpp"
#include "keeper/propagation.hpp"
#include "keeper/registry.hpp"
#include "keeper/selection.hpp"
#include "keeper/spec_model.hpp"
#include "keeper/template.hpp"

namespace fs = std::filesystem;
using namespace keeper;

namespace {

struct Options {
  std::string spec = "images.yml";
  std::string output_dir = "generated";
  std::string mode;
  std::vector<std::string> items;
  std::string commit_msg_file;
  std::string remote_tags_file;
  std::string readme_template;
  std::string ref;
  std::string target;
  std::vector<std::string> protect;
  bool execute = false;
};

constexpr const char* kBuiltinReadme = "# Tags\n\n<!-- tags -->\n";

void print_diagnostics(const std::vector<Diagnostic>& diagnostics) {
  for (const Diagnostic& diagnostic : diagnostics) {
    std::cerr << to_string(diagnostic) << "\n";
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read '" + path + "'");
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string piece =
        comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start);
    std::size_t begin = piece.find_first_not_of(" \t");
    if (begin != std::string::npos) {
      std::size_t end = piece.find_last_not_of(" \t");
      out.push_back(piece.substr(begin, end - begin + 1));
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

RebuildDirective directive_from(const std::string& mode, std::vector<std::string> items,
                                const std::string& origin) {
  std::optional<RebuildMode> parsed = parse_rebuild_mode(mode);
  if (!parsed) {
    throw DirectiveError("unknown rebuild mode '" + mode + "' from " + origin);
  }
  if (*parsed == RebuildMode::RebuildKeyword && items.empty()) {
    throw DirectiveError("mode 'rebuild-keyword' needs at least one item from " + origin);
  }
  if (*parsed != RebuildMode::RebuildKeyword && !items.empty()) {
    throw DirectiveError("items are only meaningful with mode 'rebuild-keyword'");
  }
  return {*parsed, std::move(items)};
}

// Directive sources, strongest first: --mode/--item, then the commit
// message, then CRON_MODE/ITEM from the environment, then minimal.
PipelineInput build_input(const Options& options) {
  PipelineInput input;
  input.source = InputSource::Default;
  if (!options.mode.empty()) {
    input.directives.push_back(directive_from(options.mode, options.items, "--mode"));
    input.source = InputSource::TriggerVariables;
  }
  if (!options.commit_msg_file.empty()) {
    std::vector<RebuildDirective> parsed =
        parse_commit_directives(read_file(options.commit_msg_file));
    if (!parsed.empty() && input.directives.empty()) {
      input.source = InputSource::CommitMessage;
    }
    for (RebuildDirective& directive : parsed) {
      input.directives.push_back(std::move(directive));
    }
  }
  if (input.directives.empty()) {
    const char* env_mode = std::getenv("CRON_MODE");
    if (env_mode != nullptr && *env_mode != '\0') {
      const char* env_item = std::getenv("ITEM");
      std::vector<std::string> items =
          env_item == nullptr ? std::vector<std::string>{} : split_commas(env_item);
      input.directives.push_back(directive_from(env_mode, std::move(items), "CRON_MODE"));
      input.source = InputSource::TriggerVariables;
    }
  }
  if (input.directives.empty()) {
    input = default_input();
  }
  return input;
}

std::optional<CompiledPlan> load_plan(const Options& options) {
  ParseResult parsed = parse_spec_file(options.spec);
  print_diagnostics(parsed.warnings);
  std::vector<Diagnostic> diagnostics = validate_spec(parsed.spec);
  print_diagnostics(diagnostics);
  if (has_errors(diagnostics)) {
    return std::nullopt;
  }
  return compile_spec(parsed.spec);
}

std::string readme_template_text(const Options& options) {
  if (!options.readme_template.empty()) {
    return read_file(options.readme_template);
  }
  fs::path sibling = fs::path(options.spec).parent_path() / "README.md";
  std::error_code ec;
  if (fs::exists(sibling, ec)) {
    return read_file(sibling.string());
  }
  return kBuiltinReadme;
}

std::string branch_of(const Options& options) {
  return options.ref.empty() ? "master" : options.ref;
}

int cmd_check(const Options& options) {
  if (!load_plan(options)) {
    return 1;
  }
  return 0;
}

int cmd_write_artifacts(const Options& options) {
  std::optional<CompiledPlan> plan = load_plan(options);
  if (!plan) return 1;
  Selection selection = select_builds(*plan, build_input(options));
  print_diagnostics(selection.warnings);

  std::vector<Diagnostic> warnings;
  ArtifactBundle bundle = write_artifacts(*plan, selection.builds, readme_template_text(options),
                                          branch_of(options), &warnings);
  print_diagnostics(warnings);

  std::error_code ec;
  fs::create_directories(options.output_dir, ec);
  if (ec) {
    throw IoError("cannot create '" + options.output_dir + "': " + ec.message());
  }
  for (const auto& [bundle_path, content] : bundle.files) {
    std::string name = bundle_path.substr(bundle_path.find('/') + 1);
    fs::path out_path = fs::path(options.output_dir) / name;
    std::ofstream out(out_path, std::ios::binary);
    if (!out || !(out << content)) {
      throw IoError("cannot write '" + out_path.string() + "'");
    }
    std::cout << out_path.string() << "\n";
  }
  return 0;
}

int cmd_generate_config(const Options& options) {
  std::optional<CompiledPlan> plan = load_plan(options);
  if (!plan) return 1;
  Selection selection = select_builds(*plan, build_input(options));
  print_diagnostics(selection.warnings);
  std::cout << generate_build_config(*plan, selection.builds);
  return 0;
}

int cmd_diff_remote(const Options& options) {
  std::optional<CompiledPlan> plan = load_plan(options);
  if (!plan) return 1;

  std::unique_ptr<TagSource> source;
  if (options.remote_tags_file.empty()) {
    source = std::make_unique<HttpTagSource>();
  } else {
    source = std::make_unique<FileTagSource>(options.remote_tags_file);
  }
  RemoteTagList remote = fetch_remote_tags(plan->docker_repo, *source);

  std::set<std::string> expected;
  for (const auto& [tag, id] : plan->tag_index) expected.insert(tag);
  std::set<std::string> protect(options.protect.begin(), options.protect.end());
  for (const std::string& tag : compute_obsolete_tags(expected, remote, protect)) {
    std::cout << tag << "\n";
  }
  return 0;
}

int cmd_propagate(const Options& options) {
  std::optional<CompiledPlan> plan = load_plan(options);
  if (!plan) return 1;
  PipelineInput input = build_input(options);
  Selection selection = select_builds(*plan, input);
  print_diagnostics(selection.warnings);

  bool target_seen = options.target.empty();
  std::vector<Diagnostic> warnings;
  for (const PropagateTarget& declared : plan->propagate) {
    if (!options.target.empty() && declared.name != options.target) continue;
    target_seen = true;

    PropagateTarget target = declared;
    if (!options.ref.empty()) target.ref = options.ref;
    std::optional<TriggerRequest> request =
        eval_strategy(target, selection.builds, input.effective_mode(), &warnings);
    if (!request) {
      std::cout << target.name << ": no trigger\n";
      continue;
    }
    HttpRequestDesc desc = render_trigger(*request);
    if (!options.execute) {
      std::cout << target.name << ": " << desc.method << " " << desc.url;
      for (const auto& [key, value] : desc.form) {
        std::cout << " " << key << "=" << value;
      }
      std::cout << "\n";
      continue;
    }
    const char* token = std::getenv(request->token_env_var.c_str());
    if (token == nullptr || *token == '\0') {
      std::cerr << "error: missing environment variable '" << request->token_env_var << "'\n";
      return 1;
    }
    OrderedArgs form = desc.form;
    form.front().second = token;
    HttpResponse response = http_post_form(desc.url, form);
    std::cout << target.name << ": " << response.status << "\n";
  }
  print_diagnostics(warnings);
  if (!target_seen) {
    std::cerr << "error: unknown propagate target '" << options.target << "'\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options options;
  CLI::App app{"fleet image build compiler and consistency checker"};
  app.require_subcommand(1);

  auto add_spec = [&](CLI::App* sub) {
    sub->add_option("--spec", options.spec, "fleet specification file");
  };
  auto add_selection = [&](CLI::App* sub) {
    sub->add_option("--mode", options.mode, "rebuild mode");
    sub->add_option("--item", options.items, "rebuild-keyword item (repeatable)");
    sub->add_option("--commit-msg-file", options.commit_msg_file,
                    "commit message to scan for directives");
  };

  CLI::App* check = app.add_subcommand("check", "validate the specification");
  add_spec(check);

  CLI::App* write = app.add_subcommand("write-artifacts", "write the generated file set");
  add_spec(write);
  add_selection(write);
  write->add_option("--output-dir", options.output_dir, "artifact directory");
  write->add_option("--readme-template", options.readme_template, "README template file");
  write->add_option("--ref", options.ref, "branch for documentation links");

  CLI::App* config = app.add_subcommand("generate-config", "print the child pipeline");
  add_spec(config);
  add_selection(config);

  CLI::App* diff = app.add_subcommand("diff-remote", "report obsolete registry tags");
  add_spec(diff);
  diff->add_option("--remote-tags-file", options.remote_tags_file,
                   "read remote tags from a file instead of the registry");
  diff->add_option("--protect-tag", options.protect, "never report this tag (repeatable)");

  CLI::App* propagate = app.add_subcommand("propagate", "evaluate downstream triggers");
  add_spec(propagate);
  add_selection(propagate);
  propagate->add_option("--target", options.target, "only this propagate target");
  propagate->add_option("--ref", options.ref, "override the trigger ref");
  propagate->add_flag("--execute", options.execute,
                      "send the triggers (default is a dry run)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(check)) return cmd_check(options);
    if (app.got_subcommand(write)) return cmd_write_artifacts(options);
    if (app.got_subcommand(config)) return cmd_generate_config(options);
    if (app.got_subcommand(diff)) return cmd_diff_remote(options);
    return cmd_propagate(options);
  } catch (const IoError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const TransportError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const ProtocolError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
