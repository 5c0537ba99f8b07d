#include "keeper/template.hpp"

#include <algorithm>
#include <utility>

#include "keeper/errors.hpp"

namespace keeper {

namespace {

using Token = GlobPattern::Token;
using TokenKind = GlobPattern::TokenKind;

GlobPattern compile_glob(std::string_view raw, std::size_t offset) {
  GlobPattern pattern;
  pattern.source = std::string(raw);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    char c = raw[i];
    if (c == '\\') {
      if (i + 1 >= raw.size()) {
        throw TemplateError("dangling escape in pattern", offset + i);
      }
      pattern.tokens.push_back({TokenKind::Literal, raw[i + 1]});
      ++i;
    } else if (c == '*') {
      pattern.tokens.push_back({TokenKind::AnySeq, '\0'});
    } else if (c == '?') {
      pattern.tokens.push_back({TokenKind::AnyChar, '\0'});
    } else {
      pattern.tokens.push_back({TokenKind::Literal, c});
    }
  }
  return pattern;
}

std::string unescape(std::string_view raw, std::size_t offset) {
  std::string out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '\\') {
      if (i + 1 >= raw.size()) {
        throw TemplateError("dangling escape in replacement", offset + i);
      }
      out += raw[i + 1];
      ++i;
    } else {
      out += raw[i];
    }
  }
  return out;
}

// `raw` is the bracket segment content with escapes intact; its first
// character is one of '/', '#', '%'.
FormatOp parse_op(std::string_view raw, std::size_t offset) {
  FormatOp op;
  if (raw[0] == '/') {
    std::string_view rest = raw.substr(1);
    std::size_t rest_offset = offset + 1;
    if (!rest.empty() && rest[0] == '/') {
      op.kind = OpKind::ReplaceAll;
      rest.remove_prefix(1);
      ++rest_offset;
    } else if (!rest.empty() && rest[0] == '#') {
      op.kind = OpKind::ReplacePrefix;
      rest.remove_prefix(1);
      ++rest_offset;
    } else if (!rest.empty() && rest[0] == '%') {
      op.kind = OpKind::ReplaceSuffix;
      rest.remove_prefix(1);
      ++rest_offset;
    } else {
      op.kind = OpKind::ReplaceFirst;
    }
    std::optional<std::size_t> sep;
    for (std::size_t i = 0; i < rest.size(); ++i) {
      if (rest[i] == '\\') {
        ++i;
        continue;
      }
      if (rest[i] == '/') {
        sep = i;
        break;
      }
    }
    std::string_view pattern_raw = sep ? rest.substr(0, *sep) : rest;
    std::string_view replacement_raw = sep ? rest.substr(*sep + 1) : std::string_view();
    op.pattern = compile_glob(pattern_raw, rest_offset);
    op.replacement = unescape(replacement_raw, sep ? rest_offset + *sep + 1 : rest_offset);
  } else {
    char marker = raw[0];
    bool longest = raw.size() >= 2 && raw[1] == marker;
    std::size_t skip = longest ? 2 : 1;
    if (marker == '#') {
      op.kind = longest ? OpKind::StripPrefixLongest : OpKind::StripPrefixShortest;
    } else {
      op.kind = longest ? OpKind::StripSuffixLongest : OpKind::StripSuffixShortest;
    }
    op.pattern = compile_glob(raw.substr(skip), offset + skip);
  }
  return op;
}

// reach[L] is true when the tokens can match exactly s[0, L).
std::vector<char> prefix_reach(const std::vector<Token>& tokens, std::string_view s) {
  std::vector<char> reach(s.size() + 1, 0);
  reach[0] = 1;
  std::vector<char> next(s.size() + 1, 0);
  for (const Token& token : tokens) {
    std::fill(next.begin(), next.end(), 0);
    switch (token.kind) {
      case TokenKind::Literal:
        for (std::size_t p = 0; p < s.size(); ++p) {
          if (reach[p] && s[p] == token.literal) next[p + 1] = 1;
        }
        break;
      case TokenKind::AnyChar:
        for (std::size_t p = 0; p < s.size(); ++p) {
          if (reach[p]) next[p + 1] = 1;
        }
        break;
      case TokenKind::AnySeq: {
        char seen = 0;
        for (std::size_t p = 0; p <= s.size(); ++p) {
          seen = seen || reach[p];
          next[p] = seen;
        }
        break;
      }
    }
    reach.swap(next);
  }
  return reach;
}

// Longest L >= 1 such that the tokens match s[at, at + L); empty matches do
// not count so that unanchored replacement always consumes input.
std::optional<std::size_t> longest_nonempty_match_at(const std::vector<Token>& tokens,
                                                     std::string_view s, std::size_t at) {
  std::vector<char> reach = prefix_reach(tokens, s.substr(at));
  for (std::size_t len = reach.size(); len-- > 1;) {
    if (reach[len]) return len;
  }
  return std::nullopt;
}

std::string replace_in_string(const FormatOp& op, const std::string& s) {
  const std::string& replacement = *op.replacement;
  switch (op.kind) {
    case OpKind::ReplacePrefix: {
      auto len = glob_match_anchored(op.pattern, s, Anchor::Prefix, Extent::Longest);
      if (!len) return s;
      return replacement + s.substr(*len);
    }
    case OpKind::ReplaceSuffix: {
      auto start = glob_match_anchored(op.pattern, s, Anchor::Suffix, Extent::Longest);
      if (!start) return s;
      return s.substr(0, *start) + replacement;
    }
    case OpKind::ReplaceFirst: {
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (auto len = longest_nonempty_match_at(op.pattern.tokens, s, i)) {
          return s.substr(0, i) + replacement + s.substr(i + *len);
        }
      }
      return s;
    }
    case OpKind::ReplaceAll: {
      std::string out;
      std::size_t i = 0;
      while (i < s.size()) {
        if (auto len = longest_nonempty_match_at(op.pattern.tokens, s, i)) {
          out += replacement;
          i += *len;
        } else {
          out += s[i];
          ++i;
        }
      }
      return out;
    }
    default:
      break;
  }
  throw TypeError("not a replace operation");
}

std::string strip_string(const FormatOp& op, const std::string& s) {
  Anchor anchor = (op.kind == OpKind::StripPrefixShortest || op.kind == OpKind::StripPrefixLongest)
                      ? Anchor::Prefix
                      : Anchor::Suffix;
  Extent extent = (op.kind == OpKind::StripPrefixLongest || op.kind == OpKind::StripSuffixLongest)
                      ? Extent::Longest
                      : Extent::Shortest;
  auto pos = glob_match_anchored(op.pattern, s, anchor, extent);
  if (!pos) return s;
  return anchor == Anchor::Prefix ? s.substr(*pos) : s.substr(0, *pos);
}

}  // namespace

bool is_replace(OpKind kind) {
  switch (kind) {
    case OpKind::ReplaceFirst:
    case OpKind::ReplaceAll:
    case OpKind::ReplacePrefix:
    case OpKind::ReplaceSuffix:
      return true;
    default:
      return false;
  }
}

std::string FieldExpr::path_string() const {
  std::string out = root;
  for (const std::string& key : path) {
    out += "[" + key + "]";
  }
  return out;
}

std::string Template::source() const {
  std::string out;
  for (const Segment& segment : segments) {
    if (const auto* literal = std::get_if<Literal>(&segment)) {
      out += literal->source;
    } else {
      out += std::get<FieldExpr>(segment).source;
    }
  }
  return out;
}

bool Template::has_fields() const {
  return std::any_of(segments.begin(), segments.end(), [](const Segment& segment) {
    return std::holds_alternative<FieldExpr>(segment);
  });
}

Template parse_template(std::string_view text) {
  Template out;
  std::string literal_source;
  std::string literal_text;
  auto flush_literal = [&] {
    if (!literal_source.empty()) {
      out.segments.push_back(Template::Literal{literal_source, literal_text});
      literal_source.clear();
      literal_text.clear();
    }
  };

  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (c == '{') {
      if (i + 1 < n && text[i + 1] == '{') {
        literal_source += "{{";
        literal_text += '{';
        i += 2;
        continue;
      }
      flush_literal();
      const std::size_t start = i;
      ++i;
      std::string root;
      while (i < n && text[i] != '[' && text[i] != '}') {
        root += text[i++];
      }
      if (i >= n) {
        throw TemplateError("unbalanced braces: field expression never closed", start);
      }
      if (root.empty()) {
        throw TemplateError("field expression with empty root", start);
      }
      FieldExpr field;
      field.root = root;
      bool saw_op = false;
      while (i < n && text[i] == '[') {
        const std::size_t segment_start = i;
        ++i;
        std::string raw;
        bool closed = false;
        while (i < n) {
          char d = text[i];
          if (d == '\\') {
            if (i + 1 >= n) {
              throw TemplateError("dangling escape", i);
            }
            raw += d;
            raw += text[i + 1];
            i += 2;
            continue;
          }
          if (d == ']') {
            closed = true;
            ++i;
            break;
          }
          raw += d;
          ++i;
        }
        if (!closed) {
          throw TemplateError("bracket segment never closed", segment_start);
        }
        if (raw.empty()) {
          throw TemplateError("empty bracket segment", segment_start);
        }
        if (raw[0] == '/' || raw[0] == '#' || raw[0] == '%') {
          field.ops.push_back(parse_op(raw, segment_start + 1));
          saw_op = true;
        } else {
          if (saw_op) {
            throw TemplateError("path segment after format operation", segment_start);
          }
          field.path.push_back(raw);
        }
      }
      if (i >= n) {
        throw TemplateError("unbalanced braces: field expression never closed", start);
      }
      if (text[i] != '}') {
        throw TemplateError("unexpected character in field expression", i);
      }
      ++i;
      field.source = std::string(text.substr(start, i - start));
      out.segments.push_back(std::move(field));
    } else if (c == '}') {
      if (i + 1 < n && text[i + 1] == '}') {
        literal_source += "}}";
        literal_text += '}';
        i += 2;
        continue;
      }
      throw TemplateError("unbalanced braces: '}' outside a field expression", i);
    } else {
      literal_source += c;
      literal_text += c;
      ++i;
    }
  }
  flush_literal();
  return out;
}

std::optional<std::size_t> glob_match_anchored(const GlobPattern& pattern, std::string_view s,
                                               Anchor anchor, Extent extent) {
  if (anchor == Anchor::Prefix) {
    std::vector<char> reach = prefix_reach(pattern.tokens, s);
    if (extent == Extent::Shortest) {
      for (std::size_t len = 0; len < reach.size(); ++len) {
        if (reach[len]) return len;
      }
    } else {
      for (std::size_t len = reach.size(); len-- > 0;) {
        if (reach[len]) return len;
      }
    }
    return std::nullopt;
  }
  std::vector<Token> reversed_tokens(pattern.tokens.rbegin(), pattern.tokens.rend());
  std::string reversed(s.rbegin(), s.rend());
  std::vector<char> reach = prefix_reach(reversed_tokens, reversed);
  // reach[len]: the pattern matches the suffix of length len, starting at
  // s.size() - len.
  if (extent == Extent::Shortest) {
    for (std::size_t len = 0; len < reach.size(); ++len) {
      if (reach[len]) return s.size() - len;
    }
  } else {
    for (std::size_t len = reach.size(); len-- > 0;) {
      if (reach[len]) return s.size() - len;
    }
  }
  return std::nullopt;
}

std::string materialize(const Value& value) {
  if (value.is_string()) return value.as_string();
  if (value.is_list()) {
    std::string out;
    for (const std::string& item : value.as_list()) {
      out += item;
    }
    return out;
  }
  throw TypeError("cannot render a map value as text");
}

Value apply_op(const FormatOp& op, const Value& value) {
  if (value.is_map()) {
    throw TypeError("cannot apply a format operation to a map value");
  }
  if (!is_replace(op.kind)) {
    return strip_string(op, materialize(value));
  }
  if (value.is_string()) {
    return replace_in_string(op, value.as_string());
  }
  Value::List out;
  out.reserve(value.as_list().size());
  for (const std::string& item : value.as_list()) {
    out.push_back(replace_in_string(op, item));
  }
  return out;
}

std::string eval_template(const Template& tmpl, const Context& ctx) {
  std::string out;
  for (const Template::Segment& segment : tmpl.segments) {
    if (const auto* literal = std::get_if<Template::Literal>(&segment)) {
      out += literal->text;
      continue;
    }
    const FieldExpr& field = std::get<FieldExpr>(segment);
    const Value* bound = ctx.find(field.root);
    if (!bound) {
      throw LookupError("unresolved reference '" + field.root + "'");
    }
    Value current = *bound;
    std::string walked = field.root;
    for (const std::string& key : field.path) {
      if (!current.is_map()) {
        throw TypeError("cannot index '" + walked + "': not a map");
      }
      const Value::Map& entries = current.as_map();
      auto it = entries.find(key);
      if (it == entries.end()) {
        throw LookupError("unresolved reference '" + walked + "[" + key + "]'");
      }
      current = it->second;
      walked += "[" + key + "]";
    }
    for (const FormatOp& op : field.ops) {
      current = apply_op(op, current);
    }
    if (current.is_map()) {
      throw TypeError("cannot render '" + field.path_string() + "': value is a map");
    }
    out += materialize(current);
  }
  return out;
}

std::string eval_template(std::string_view text, const Context& ctx) {
  return eval_template(parse_template(text), ctx);
}

}  // namespace keeper
