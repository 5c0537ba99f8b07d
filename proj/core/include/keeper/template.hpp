#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "keeper/value.hpp"

namespace keeper {

// A glob pattern over the alphabet of plain characters, `?` (any single
// character) and `*` (any possibly empty run of characters).  Character
// classes are not part of the language.
struct GlobPattern {
  enum class TokenKind { Literal, AnyChar, AnySeq };
  struct Token {
    TokenKind kind = TokenKind::Literal;
    char literal = '\0';
    bool operator==(const Token&) const = default;
  };

  std::vector<Token> tokens;
  std::string source;  // pattern text as written, escapes intact

  bool empty() const { return tokens.empty(); }
  bool operator==(const GlobPattern&) const = default;
};

enum class OpKind {
  ReplaceFirst,         // /pattern/replacement
  ReplaceAll,           // //pattern/replacement
  ReplacePrefix,        // /#pattern/replacement
  ReplaceSuffix,        // /%pattern/replacement
  StripPrefixShortest,  // #pattern
  StripPrefixLongest,   // ##pattern
  StripSuffixShortest,  // %pattern
  StripSuffixLongest,   // %%pattern
};

bool is_replace(OpKind kind);

struct FormatOp {
  OpKind kind = OpKind::ReplaceFirst;
  GlobPattern pattern;
  std::optional<std::string> replacement;  // present exactly for the Replace kinds

  bool operator==(const FormatOp&) const = default;
};

// One `{root[key]...[op]...}` occurrence.
struct FieldExpr {
  std::string root;
  std::vector<std::string> path;
  std::vector<FormatOp> ops;
  std::string source;  // the full occurrence, braces included

  // "root[key1][key2]" for error messages.
  std::string path_string() const;

  bool operator==(const FieldExpr&) const = default;
};

// A parsed template: literal runs interleaved with field expressions.
struct Template {
  struct Literal {
    std::string source;  // as written, `{{` / `}}` intact
    std::string text;    // decoded
    bool operator==(const Literal&) const = default;
  };
  using Segment = std::variant<Literal, FieldExpr>;

  std::vector<Segment> segments;

  // Reconstructs the exact input text.
  std::string source() const;
  bool has_fields() const;

  bool operator==(const Template&) const = default;
};

// Throws TemplateError on malformed input.
Template parse_template(std::string_view text);

enum class Anchor { Prefix, Suffix };
enum class Extent { Shortest, Longest };

// Anchored glob match.  For Anchor::Prefix the result is the length of the
// matching prefix; for Anchor::Suffix it is the start index of the matching
// suffix.  std::nullopt when nothing matches (the empty pattern always
// matches the empty prefix/suffix).
std::optional<std::size_t> glob_match_anchored(const GlobPattern& pattern, std::string_view s,
                                               Anchor anchor, Extent extent);

// Applies one operation.  Strip operations materialize lists first; Replace
// operations apply element-wise to lists.  Throws TypeError on maps.
Value apply_op(const FormatOp& op, const Value& value);

// Concatenates list elements without a separator; identity on strings.
// Throws TypeError on maps.
std::string materialize(const Value& value);

// Renders the template against the context.  Throws LookupError for
// unresolved references and TypeError for shape mismatches.
std::string eval_template(const Template& tmpl, const Context& ctx);
std::string eval_template(std::string_view text, const Context& ctx);

}  // namespace keeper
