#pragma once

// Canonical trees for Python type-annotation expressions.
//
// parse_type() accepts annotation text as written in source or stub files
// (PEP 604 unions, typing aliases, quoted forward references, Callable,
// Literal, Annotated) and returns a normalized TypeNode.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstring>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "typeqal/errors.hpp"

namespace typeqal {

struct TypeNode {
  enum class Kind { Leaf, Generic, Union };

  Kind kind = Kind::Leaf;
  /// Qualified name for Leaf/Generic; empty for Union.
  std::string name;
  /// Ordered arguments (Generic) or member set (Union).
  std::vector<TypeNode> children;

  static TypeNode leaf(std::string n) { return {Kind::Leaf, std::move(n), {}}; }
  static TypeNode generic(std::string n, std::vector<TypeNode> args) {
    return {Kind::Generic, std::move(n), std::move(args)};
  }
  static TypeNode union_of(std::vector<TypeNode> members) {
    return {Kind::Union, {}, std::move(members)};
  }

  bool is_union() const noexcept { return kind == Kind::Union; }
  bool has_args() const noexcept { return kind == Kind::Generic && !children.empty(); }
  const std::vector<TypeNode>& args() const noexcept { return children; }
  const std::vector<TypeNode>& members() const noexcept { return children; }
};

std::string render(const TypeNode& node);

namespace detail {

inline bool ident_start(unsigned char c) {
  return std::isalpha(c) || c == '_' || c >= 0x80;
}
inline bool ident_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c >= 0x80;
}

/// Inner text of a complete single string literal (`'x'`, `"x"`, triple
/// quoted, optional r/u prefix), or nullopt.
inline std::optional<std::string> unquote(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && i < 2 && std::strchr("rRuU", s[i]) && s[i] != '\0') ++i;
  if (i >= s.size() || (s[i] != '\'' && s[i] != '"')) return std::nullopt;
  const char q = s[i];
  const bool triple = s.size() >= i + 6 && s[i + 1] == q && s[i + 2] == q;
  const std::size_t qlen = triple ? 3 : 1;
  if (s.size() < i + 2 * qlen) return std::nullopt;
  for (std::size_t k = 0; k < qlen; ++k) {
    if (s[s.size() - 1 - k] != q) return std::nullopt;
  }
  return std::string(s.substr(i + qlen, s.size() - i - 2 * qlen));
}

struct AnnToken {
  enum Kind { Name, String, Number, LBracket, RBracket, LParen, RParen, Comma, Pipe, Ellipsis, Dot, Minus, Other, End };
  Kind kind;
  std::size_t begin;
  std::size_t end;
};

class AnnLexer {
 public:
  explicit AnnLexer(std::string_view text) : text_(text) {}

  std::vector<AnnToken> run() {
    std::vector<AnnToken> out;
    while (true) {
      skip_trivia();
      if (pos_ >= text_.size()) {
        out.push_back({AnnToken::End, pos_, pos_});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  void skip_trivia() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f') {
        ++pos_;
      } else if (c == '\\' && pos_ + 1 < text_.size() && (text_[pos_ + 1] == '\n' || text_[pos_ + 1] == '\r')) {
        pos_ += 2;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  AnnToken string_at(std::size_t start, std::size_t quote_pos) {
    const char q = text_[quote_pos];
    const bool triple = quote_pos + 2 < text_.size() && text_[quote_pos + 1] == q && text_[quote_pos + 2] == q;
    std::size_t i = quote_pos + (triple ? 3 : 1);
    while (i < text_.size()) {
      if (text_[i] == '\\') {
        i += 2;
        continue;
      }
      if (text_[i] == q) {
        if (!triple) return {AnnToken::String, start, (pos_ = i + 1)};
        if (i + 2 < text_.size() && text_[i + 1] == q && text_[i + 2] == q) {
          return {AnnToken::String, start, (pos_ = i + 3)};
        }
      }
      if (!triple && text_[i] == '\n') break;
      ++i;
    }
    throw ParseError("unterminated string literal", start);
  }

  AnnToken next() {
    const std::size_t start = pos_;
    const auto c = static_cast<unsigned char>(text_[pos_]);
    if (c == '\'' || c == '"') return string_at(start, pos_);
    if (ident_start(c)) {
      std::size_t p = pos_;
      while (p < text_.size() && p - pos_ < 2 && std::strchr("rRuUbBfF", text_[p]) && text_[p] != '\0') ++p;
      if (p > pos_ && p < text_.size() && (text_[p] == '\'' || text_[p] == '"')) return string_at(start, p);
      while (pos_ < text_.size() && ident_char(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return {AnnToken::Name, start, pos_};
    }
    if (std::isdigit(c) || (c == '.' && pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
      while (pos_ < text_.size()) {
        const auto d = static_cast<unsigned char>(text_[pos_]);
        if (std::isalnum(d) || d == '_' || d == '.') {
          ++pos_;
        } else if ((d == '+' || d == '-') && (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E')) {
          ++pos_;
        } else {
          break;
        }
      }
      return {AnnToken::Number, start, pos_};
    }
    if (text_.substr(pos_, 3) == "...") {
      pos_ += 3;
      return {AnnToken::Ellipsis, start, pos_};
    }
    ++pos_;
    switch (c) {
      case '[': return {AnnToken::LBracket, start, pos_};
      case ']': return {AnnToken::RBracket, start, pos_};
      case '(': return {AnnToken::LParen, start, pos_};
      case ')': return {AnnToken::RParen, start, pos_};
      case ',': return {AnnToken::Comma, start, pos_};
      case '|': return {AnnToken::Pipe, start, pos_};
      case '.': return {AnnToken::Dot, start, pos_};
      case '-': return {AnnToken::Minus, start, pos_};
      default: return {AnnToken::Other, start, pos_};
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Markers for forms that only survive until normalization.
inline constexpr std::string_view kEllipsisLeaf = "...";
inline constexpr std::string_view kEmptyTupleLeaf = "()";

inline std::string_view last_segment(std::string_view name) {
  const auto dot = name.rfind('.');
  return dot == std::string_view::npos ? name : name.substr(dot + 1);
}

inline std::string strip_typing_prefix(std::string_view name) {
  for (std::string_view prefix : {"typing_extensions.", "typing.", "builtins."}) {
    if (name.starts_with(prefix)) return std::string(name.substr(prefix.size()));
  }
  return std::string(name);
}

class AnnParser {
 public:
  explicit AnnParser(std::string_view text) : text_(text), toks_(AnnLexer(text).run()) {}

  TypeNode parse() {
    TypeNode node = parse_union();
    if (peek().kind == AnnToken::Other) throw ParseError("illegal token", peek().begin);
    if (peek().kind != AnnToken::End) throw ParseError("unexpected trailing input", peek().begin);
    return node;
  }

 private:
  const AnnToken& peek() const { return toks_[i_]; }
  const AnnToken& take() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }
  std::string_view slice(const AnnToken& t) const { return text_.substr(t.begin, t.end - t.begin); }

  void expect(AnnToken::Kind k, const char* what) {
    if (peek().kind != k) throw ParseError(std::string("expected ") + what, peek().begin);
    take();
  }

  TypeNode parse_union() {
    std::vector<TypeNode> parts;
    parts.push_back(parse_primary());
    while (peek().kind == AnnToken::Pipe) {
      take();
      parts.push_back(parse_primary());
    }
    if (parts.size() == 1) return std::move(parts.front());
    return TypeNode::union_of(std::move(parts));
  }

  TypeNode parse_primary() {
    const AnnToken& t = peek();
    switch (t.kind) {
      case AnnToken::String:
        take();
        return TypeNode::leaf(std::string(slice(t)));
      case AnnToken::LParen: {
        take();
        TypeNode inner = parse_union();
        expect(AnnToken::RParen, "')'");
        return inner;
      }
      case AnnToken::Name: {
        std::string name(slice(take()));
        while (peek().kind == AnnToken::Dot) {
          take();
          if (peek().kind != AnnToken::Name) throw ParseError("expected name after '.'", peek().begin);
          name += '.';
          name += slice(take());
        }
        if (peek().kind != AnnToken::LBracket) return TypeNode::leaf(std::move(name));
        take();
        return parse_subscript(std::move(name));
      }
      case AnnToken::End:
        throw ParseError("unexpected end of annotation", t.begin);
      case AnnToken::Other:
        throw ParseError("illegal token", t.begin);
      default:
        throw ParseError("unexpected token", t.begin);
    }
  }

  // Consumes one bracket-balanced argument without interpreting it and
  // returns its source range.
  std::pair<std::size_t, std::size_t> skip_argument() {
    int depth = 0;
    const std::size_t begin = peek().begin;
    std::size_t end = begin;
    while (true) {
      const AnnToken& t = peek();
      if (t.kind == AnnToken::End) throw ParseError("unbalanced brackets", t.begin);
      if (depth == 0 && (t.kind == AnnToken::Comma || t.kind == AnnToken::RBracket)) break;
      if (t.kind == AnnToken::LBracket || t.kind == AnnToken::LParen) ++depth;
      if (t.kind == AnnToken::RBracket || t.kind == AnnToken::RParen) --depth;
      end = t.end;
      take();
    }
    if (end == begin) throw ParseError("empty subscript argument", begin);
    return {begin, end};
  }

  TypeNode parse_subscript(std::string name) {
    const std::string base = strip_typing_prefix(name);
    if (peek().kind == AnnToken::RBracket) throw ParseError("empty subscript", peek().begin);
    std::vector<TypeNode> args;
    if (base == "Annotated") {
      TypeNode inner = parse_argument();
      while (peek().kind == AnnToken::Comma) {
        take();
        if (peek().kind == AnnToken::RBracket) break;
        skip_argument();
      }
      expect(AnnToken::RBracket, "']'");
      return inner;
    }
    const bool literal = base == "Literal";
    while (true) {
      if (literal) {
        const auto [b, e] = skip_argument();
        args.push_back(TypeNode::leaf(std::string(text_.substr(b, e - b))));
      } else {
        args.push_back(parse_argument());
      }
      if (peek().kind == AnnToken::Comma) {
        take();
        if (peek().kind == AnnToken::RBracket) break;
        continue;
      }
      break;
    }
    expect(AnnToken::RBracket, "']'");
    return TypeNode::generic(std::move(name), std::move(args));
  }

  TypeNode parse_argument() {
    const AnnToken& t = peek();
    if (t.kind == AnnToken::Ellipsis) {
      take();
      return TypeNode::leaf(std::string(kEllipsisLeaf));
    }
    if (t.kind == AnnToken::LParen && toks_[i_ + 1].kind == AnnToken::RParen) {
      take();
      take();
      return TypeNode::leaf(std::string(kEmptyTupleLeaf));
    }
    if (t.kind == AnnToken::LBracket) {
      // Callable parameter list; spliced into the parent by normalization.
      take();
      std::vector<TypeNode> items;
      while (peek().kind != AnnToken::RBracket) {
        items.push_back(parse_argument());
        if (peek().kind != AnnToken::Comma) break;
        take();
      }
      expect(AnnToken::RBracket, "']'");
      return TypeNode::generic("", std::move(items));
    }
    return parse_union();
  }

  std::string_view text_;
  std::vector<AnnToken> toks_;
  std::size_t i_ = 0;
};

inline std::string canonical_name(std::string_view raw) {
  std::string name = strip_typing_prefix(raw);
  static constexpr std::pair<std::string_view, std::string_view> kAliases[] = {
      {"List", "list"},   {"Dict", "dict"},           {"Tuple", "tuple"},       {"Set", "set"},
      {"FrozenSet", "frozenset"}, {"Type", "type"},   {"Text", "str"},          {"NoneType", "None"},
      {"types.NoneType", "None"},
  };
  for (const auto& [from, to] : kAliases) {
    if (name == from) return std::string(to);
  }
  return name;
}

}  // namespace detail

inline bool operator==(const TypeNode& a, const TypeNode& b);

namespace detail {
inline std::vector<std::string> sorted_renders(const std::vector<TypeNode>& nodes) {
  std::vector<std::string> out;
  out.reserve(nodes.size());
  for (const auto& n : nodes) out.push_back(render(n));
  std::sort(out.begin(), out.end());
  return out;
}
}  // namespace detail

/// Structural equality; union members compare as a multiset.
inline bool operator==(const TypeNode& a, const TypeNode& b) {
  if (a.kind != b.kind || a.name != b.name || a.children.size() != b.children.size()) return false;
  if (a.kind == TypeNode::Kind::Union) return detail::sorted_renders(a.children) == detail::sorted_renders(b.children);
  return std::equal(a.children.begin(), a.children.end(), b.children.begin());
}

inline std::string render(const TypeNode& node) {
  switch (node.kind) {
    case TypeNode::Kind::Leaf:
      return node.name;
    case TypeNode::Kind::Generic: {
      std::string out = node.name + "[";
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i) out += ", ";
        out += render(node.children[i]);
      }
      return out + "]";
    }
    case TypeNode::Kind::Union: {
      std::string out;
      for (const auto& member : detail::sorted_renders(node.children)) {
        if (!out.empty()) out += " | ";
        out += member;
      }
      return out;
    }
  }
  return {};
}

TypeNode normalize_type(const TypeNode& node);

namespace detail {

inline TypeNode make_union(std::vector<TypeNode> parts) {
  std::vector<TypeNode> flat;
  for (auto& p : parts) {
    TypeNode n = normalize_type(p);
    if (n.is_union()) {
      for (auto& m : n.children) flat.push_back(std::move(m));
    } else {
      flat.push_back(std::move(n));
    }
  }
  std::vector<std::pair<std::string, TypeNode>> keyed;
  for (auto& m : flat) keyed.emplace_back(render(m), std::move(m));
  std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<TypeNode> members;
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (i > 0 && keyed[i].first == keyed[i - 1].first) continue;
    members.push_back(std::move(keyed[i].second));
  }
  if (members.size() == 1) return std::move(members.front());
  return TypeNode::union_of(std::move(members));
}

}  // namespace detail

/// Lowers typing aliases, desugars Optional/Union, flattens and dedups
/// unions, drops tuple ellipsis, splices Callable parameter lists and
/// unquotes forward references. Idempotent.
inline TypeNode normalize_type(const TypeNode& node) {
  switch (node.kind) {
    case TypeNode::Kind::Union:
      return detail::make_union(node.children);
    case TypeNode::Kind::Leaf: {
      if (auto inner = detail::unquote(node.name)) {
        try {
          return normalize_type(detail::AnnParser(*inner).parse());
        } catch (const ParseError&) {
          return TypeNode::leaf(*inner);
        }
      }
      return TypeNode::leaf(detail::canonical_name(node.name));
    }
    case TypeNode::Kind::Generic:
      break;
  }
  std::string name = detail::canonical_name(node.name);
  if (name == "Optional") {
    std::vector<TypeNode> parts = node.children;
    parts.push_back(TypeNode::leaf("None"));
    return detail::make_union(std::move(parts));
  }
  if (name == "Union") return detail::make_union(node.children);
  if (name == "Literal") return TypeNode::generic(std::move(name), node.children);

  std::vector<TypeNode> args;
  auto push = [&args](const TypeNode& raw) {
    if (raw.kind == TypeNode::Kind::Leaf &&
        (raw.name == detail::kEllipsisLeaf || raw.name == detail::kEmptyTupleLeaf)) {
      return;
    }
    args.push_back(normalize_type(raw));
  };
  for (const auto& child : node.children) {
    if (child.kind == TypeNode::Kind::Generic && child.name.empty()) {
      for (const auto& item : child.children) push(item);
    } else {
      push(child);
    }
  }
  if (args.empty()) return TypeNode::leaf(std::move(name));
  return TypeNode::generic(std::move(name), std::move(args));
}

/// Parses and normalizes an annotation expression.
/// Throws ParseError with the byte offset of the first malformed token.
inline TypeNode parse_type(std::string_view text) {
  return normalize_type(detail::AnnParser(text).parse());
}

/// Nesting level; 1 for non-generic types. Unions add no level.
inline unsigned depth(const TypeNode& node) {
  unsigned deepest = 0;
  for (const auto& child : node.children) deepest = std::max(deepest, depth(child));
  switch (node.kind) {
    case TypeNode::Kind::Leaf: return 1;
    case TypeNode::Kind::Generic: return 1 + deepest;
    case TypeNode::Kind::Union: return std::max(deepest, 1u);
  }
  return 1;
}

}  // namespace typeqal
