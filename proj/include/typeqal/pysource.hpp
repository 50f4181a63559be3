#pragma once

// Lossless Python tokenizer and statement-structure parser.
//
// Every token carries its byte span in the original source, so callers can
// edit the text by span without re-printing anything. The structure parser
// recognizes statements, blocks, decorators, function/class headers and
// annotated assignments; expressions stay as token ranges.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstring>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "typeqal/errors.hpp"

namespace typeqal::py {

enum class TokenKind { Name, Number, String, Op, Newline, NL, Comment, Indent, Dedent, EndMarker };

struct Token {
  TokenKind kind;
  std::size_t begin;
  std::size_t end;
};

inline bool is_trivia(TokenKind k) { return k == TokenKind::NL || k == TokenKind::Comment; }

/// Maps byte offsets to 1-based line numbers and line boundaries.
class LineIndex {
 public:
  explicit LineIndex(std::string_view src) : size_(src.size()) {
    starts_.push_back(0);
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (src[i] == '\n') starts_.push_back(i + 1);
    }
  }

  std::size_t line_of(std::size_t offset) const {
    return static_cast<std::size_t>(std::upper_bound(starts_.begin(), starts_.end(), offset) - starts_.begin());
  }
  std::size_t line_start(std::size_t offset) const { return starts_[line_of(offset) - 1]; }
  /// Offset just past the line's '\n' (or the end of input).
  std::size_t line_end(std::size_t offset) const {
    const std::size_t line = line_of(offset);
    return line < starts_.size() ? starts_[line] : size_;
  }

 private:
  std::vector<std::size_t> starts_;
  std::size_t size_;
};

namespace detail {

inline bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
inline bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

inline bool is_string_prefix(std::string_view p) {
  if (p.empty() || p.size() > 2) return false;
  std::string lower;
  for (char c : p) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  static constexpr std::string_view kPrefixes[] = {"r", "u", "b", "f", "br", "rb", "fr", "rf"};
  return std::find(std::begin(kPrefixes), std::end(kPrefixes), lower) != std::end(kPrefixes);
}

class Tokenizer {
 public:
  explicit Tokenizer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    if (src_.starts_with("\xEF\xBB\xBF")) pos_ = 3;
    bool at_line_start = true;
    while (true) {
      if (at_line_start) {
        at_line_start = false;
        if (!handle_line_start()) {
          if (pos_ >= src_.size()) break;
          at_line_start = true;
          continue;
        }
      }
      skip_spaces();
      if (pos_ >= src_.size()) break;
      const char c = src_[pos_];
      if (c == '#') {
        comment();
      } else if (c == '\n' || c == '\r') {
        const std::size_t start = pos_;
        consume_newline();
        if (depth_ > 0) {
          emit(TokenKind::NL, start, pos_);
        } else {
          emit(TokenKind::Newline, start, pos_);
          at_line_start = true;
        }
      } else if (c == '\\') {
        const std::size_t start = pos_++;
        if (pos_ < src_.size() && (src_[pos_] == '\n' || src_[pos_] == '\r')) {
          consume_newline();
        } else if (pos_ >= src_.size()) {
          throw error("unexpected end of file after line continuation", start);
        } else {
          throw error("unexpected character after line continuation", start);
        }
      } else {
        significant();
      }
    }
    if (depth_ > 0) throw error(std::string("'") + src_[openers_.back()] + "' was never closed", openers_.back());
    if (line_has_content()) emit(TokenKind::Newline, src_.size(), src_.size());
    while (indents_.size() > 1) {
      indents_.pop_back();
      emit(TokenKind::Dedent, src_.size(), src_.size());
    }
    emit(TokenKind::EndMarker, src_.size(), src_.size());
    return std::move(tokens_);
  }

 private:
  SyntaxError error(const std::string& what, std::size_t offset) const {
    const auto line = static_cast<std::size_t>(std::count(src_.begin(), src_.begin() + static_cast<std::ptrdiff_t>(std::min(offset, src_.size())), '\n')) + 1;
    return SyntaxError(what, line, offset);
  }

  void emit(TokenKind k, std::size_t b, std::size_t e) { tokens_.push_back({k, b, e}); }

  bool line_has_content() const {
    for (auto it = tokens_.rbegin(); it != tokens_.rend(); ++it) {
      if (it->kind == TokenKind::Comment || it->kind == TokenKind::NL) continue;
      return it->kind != TokenKind::Newline && it->kind != TokenKind::Indent && it->kind != TokenKind::Dedent;
    }
    return false;
  }

  void consume_newline() {
    if (src_[pos_] == '\r' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') ++pos_;
    ++pos_;
  }

  void skip_spaces() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\f')) ++pos_;
  }

  void comment() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && src_[pos_] != '\n' && src_[pos_] != '\r') ++pos_;
    emit(TokenKind::Comment, start, pos_);
  }

  // Measures indentation. Returns false for blank/comment-only lines, which
  // are consumed entirely (as Comment/NL tokens).
  bool handle_line_start() {
    std::size_t col = 0;
    std::size_t p = pos_;
    while (p < src_.size() && (src_[p] == ' ' || src_[p] == '\t' || src_[p] == '\f')) {
      col = src_[p] == '\t' ? (col / 8 + 1) * 8 : src_[p] == '\f' ? 0 : col + 1;
      ++p;
    }
    pos_ = p;
    if (p >= src_.size()) return false;
    if (src_[p] == '#' || src_[p] == '\n' || src_[p] == '\r') {
      if (src_[p] == '#') comment();
      if (pos_ < src_.size()) {
        const std::size_t start = pos_;
        consume_newline();
        emit(TokenKind::NL, start, pos_);
      }
      return false;
    }
    if (col > indents_.back()) {
      indents_.push_back(col);
      emit(TokenKind::Indent, pos_, pos_);
    } else {
      while (col < indents_.back()) {
        indents_.pop_back();
        emit(TokenKind::Dedent, pos_, pos_);
      }
      if (col != indents_.back()) throw error("unindent does not match any outer indentation level", pos_);
    }
    return true;
  }

  void significant() {
    const std::size_t start = pos_;
    const auto c = static_cast<unsigned char>(src_[pos_]);
    if (c == '\'' || c == '"') {
      scan_string(start, pos_, false);
      emit(TokenKind::String, start, pos_);
      return;
    }
    if (ident_start(c)) {
      while (pos_ < src_.size() && ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '\'' || src_[pos_] == '"') &&
          is_string_prefix(src_.substr(start, pos_ - start))) {
        const std::string_view prefix = src_.substr(start, pos_ - start);
        const bool fmt = prefix.find_first_of("fF") != std::string_view::npos;
        scan_string(start, pos_, fmt);
        emit(TokenKind::String, start, pos_);
        return;
      }
      emit(TokenKind::Name, start, pos_);
      return;
    }
    if (std::isdigit(c) || (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      const bool hex = c == '0' && pos_ + 1 < src_.size() && (src_[pos_ + 1] == 'x' || src_[pos_ + 1] == 'X');
      bool dot = hex;
      while (pos_ < src_.size()) {
        const auto d = static_cast<unsigned char>(src_[pos_]);
        if (d == '.' && !dot) {
          dot = true;
          ++pos_;
        } else if (std::isalnum(d) || d == '_') {
          if (!hex && (d == 'e' || d == 'E')) dot = true;
          ++pos_;
        } else if (!hex && (d == '+' || d == '-') && (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E')) {
          ++pos_;
        } else {
          break;
        }
      }
      emit(TokenKind::Number, start, pos_);
      return;
    }
    static constexpr std::string_view kOps3[] = {"**=", "//=", ">>=", "<<=", "...", "!="};
    static constexpr std::string_view kOps2[] = {"->", ":=", "**", "//", "==", "!=", "<=", ">=", "<<", ">>", "+=",
                                                 "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@="};
    for (auto op : kOps3) {
      if (src_.substr(pos_, op.size()) == op) {
        pos_ += op.size();
        emit(TokenKind::Op, start, pos_);
        return;
      }
    }
    for (auto op : kOps2) {
      if (src_.substr(pos_, op.size()) == op) {
        pos_ += op.size();
        emit(TokenKind::Op, start, pos_);
        return;
      }
    }
    if (!std::strchr("()[]{},:;.+-*/%&|^~<>=@!", c) || c == '\0') throw error("invalid character", start);
    if (c == '(' || c == '[' || c == '{') {
      ++depth_;
      openers_.push_back(start);
    }
    if (c == ')' || c == ']' || c == '}') {
      if (depth_ == 0) throw error(std::string("unmatched '") + static_cast<char>(c) + "'", start);
      --depth_;
      openers_.pop_back();
    }
    ++pos_;
    emit(TokenKind::Op, start, pos_);
  }

  // Scans a string literal whose opening quote is at `quote`; leaves pos_
  // after the closing quote. Format strings may nest expressions and strings.
  void scan_string(std::size_t start, std::size_t quote, bool fmt) {
    const char q = src_[quote];
    const bool triple = quote + 2 < src_.size() && src_[quote + 1] == q && src_[quote + 2] == q;
    std::size_t i = quote + (triple ? 3 : 1);
    while (i < src_.size()) {
      const char c = src_[i];
      if (c == '\\') {
        i += (i + 2 < src_.size() && src_[i + 1] == '\r' && src_[i + 2] == '\n') ? 3 : 2;
        continue;
      }
      if (!triple && (c == '\n' || c == '\r')) break;
      if (fmt && c == '{') {
        if (i + 1 < src_.size() && src_[i + 1] == '{') {
          i += 2;
          continue;
        }
        i = scan_format_field(i + 1, start);
        continue;
      }
      if (c == q) {
        if (!triple) {
          pos_ = i + 1;
          return;
        }
        if (i + 2 < src_.size() && src_[i + 1] == q && src_[i + 2] == q) {
          pos_ = i + 3;
          return;
        }
      }
      ++i;
    }
    throw error("unterminated string literal", start);
  }

  std::size_t scan_format_field(std::size_t i, std::size_t string_start) {
    int depth = 0;
    while (i < src_.size()) {
      const auto c = static_cast<unsigned char>(src_[i]);
      if (c == '{' || c == '(' || c == '[') {
        ++depth;
      } else if (c == '}' || c == ')' || c == ']') {
        if (c == '}' && depth == 0) return i + 1;
        --depth;
      } else if (c == '\'' || c == '"') {
        const std::size_t saved = pos_;
        scan_string(i, i, false);
        i = pos_;
        pos_ = saved;
        continue;
      } else if (ident_start(c)) {
        const std::size_t b = i;
        while (i < src_.size() && ident_char(static_cast<unsigned char>(src_[i]))) ++i;
        if (i < src_.size() && (src_[i] == '\'' || src_[i] == '"') && is_string_prefix(src_.substr(b, i - b))) {
          const std::size_t saved = pos_;
          scan_string(b, i, src_.substr(b, i - b).find_first_of("fF") != std::string_view::npos);
          i = pos_;
          pos_ = saved;
        }
        continue;
      }
      ++i;
    }
    throw error("unterminated string literal", string_start);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  std::vector<std::size_t> indents_{0};
  std::vector<std::size_t> openers_;
  std::vector<Token> tokens_;
};

}  // namespace detail

/// Throws SyntaxError on unterminated strings, unbalanced brackets and
/// inconsistent dedents.
inline std::vector<Token> tokenize(std::string_view src) { return detail::Tokenizer(src).run(); }

struct Statement {
  enum class Kind { Simple, Compound, Decorator };

  Kind kind = Kind::Simple;
  /// Token range. Simple: the statement proper, without ';' or NEWLINE.
  /// Compound: the header through its ':'. Decorator: '@' up to NEWLINE.
  std::size_t first = 0;
  std::size_t last = 0;
  /// NEWLINE token ending the logical line (Simple and Decorator).
  std::size_t newline = 0;
  /// Simple statement alone on a logical line that it starts.
  bool owns_line = false;
  std::optional<std::size_t> prev_semicolon;
  std::optional<std::size_t> next_semicolon;
  /// Compound only.
  std::vector<Statement> body;
  bool inline_body = false;
};

struct Param {
  int stars = 0;  ///< 1 for *args, 2 for **kwargs
  bool marker = false;  ///< bare '*' or '/'
  std::size_t name = 0;
  std::optional<std::size_t> colon;
  std::size_t ann_first = 0;
  std::size_t ann_last = 0;  ///< exclusive; last significant annotation token is ann_last - 1
  std::optional<std::size_t> equals;
};

struct FunctionHeader {
  bool is_async = false;
  std::size_t name = 0;
  std::size_t lparen = 0;
  std::size_t rparen = 0;
  std::vector<Param> params;
  std::optional<std::size_t> arrow;
  std::size_t ret_first = 0;
  std::size_t ret_last = 0;  ///< exclusive
  std::size_t colon = 0;
};

struct AnnAssign {
  std::size_t target_first = 0;
  std::size_t target_last = 0;  ///< exclusive
  std::size_t colon = 0;
  std::size_t ann_first = 0;
  std::size_t ann_last = 0;  ///< exclusive
  std::optional<std::size_t> equals;
  bool simple_name = false;
};

class Module {
 public:
  explicit Module(std::string source);

  const std::string& source() const noexcept { return source_; }
  const std::vector<Token>& tokens() const noexcept { return tokens_; }
  const std::vector<Statement>& body() const noexcept { return body_; }
  const LineIndex& lines() const noexcept { return lines_; }

  std::string_view text(std::size_t tok) const {
    const Token& t = tokens_[tok];
    return std::string_view(source_).substr(t.begin, t.end - t.begin);
  }
  bool is_op(std::size_t tok, std::string_view op) const {
    return tokens_[tok].kind == TokenKind::Op && text(tok) == op;
  }
  bool is_name(std::size_t tok, std::string_view name) const {
    return tokens_[tok].kind == TokenKind::Name && text(tok) == name;
  }
  /// Source text spanning tokens [first, last), trivia included.
  std::string_view span_text(std::size_t first, std::size_t last) const {
    if (last <= first) return {};
    return std::string_view(source_).substr(tokens_[first].begin, tokens_[last - 1].end - tokens_[first].begin);
  }
  /// Significant token indices in [first, last).
  std::vector<std::size_t> significant(std::size_t first, std::size_t last) const {
    std::vector<std::size_t> out;
    for (std::size_t i = first; i < last; ++i) {
      if (!is_trivia(tokens_[i].kind)) out.push_back(i);
    }
    return out;
  }

  bool is_function(const Statement& s) const;
  bool is_class(const Statement& s) const;
  std::optional<FunctionHeader> function_header(const Statement& s) const;
  std::optional<AnnAssign> annotated_assignment(const Statement& s) const;
  /// The single string token of a docstring-shaped statement.
  std::optional<std::size_t> docstring_token(const Statement& s) const;
  /// Decorator expression text without the '@'.
  std::string decorator_text(const Statement& s) const;

 private:
  std::string source_;
  std::vector<Token> tokens_;
  LineIndex lines_;
  std::vector<Statement> body_;
};

namespace detail {

inline bool is_hard_keyword(std::string_view w) {
  static constexpr std::string_view kKeywords[] = {
      "False", "None",   "True",    "and",      "as",   "assert", "async",  "await",  "break",
      "class", "continue", "def",   "del",      "elif", "else",   "except", "finally", "for",
      "from",  "global", "if",      "import",   "in",   "is",     "lambda", "nonlocal", "not",
      "or",    "pass",   "raise",   "return",   "try",  "while",  "with",   "yield"};
  return std::find(std::begin(kKeywords), std::end(kKeywords), w) != std::end(kKeywords);
}

inline bool is_assign_op(std::string_view op) {
  static constexpr std::string_view kOps[] = {"=",  "+=", "-=", "*=",  "/=",  "//=", "%=",
                                              "@=", "&=", "|=", "^=", ">>=", "<<=", "**="};
  return std::find(std::begin(kOps), std::end(kOps), op) != std::end(kOps);
}

class StructureParser {
 public:
  StructureParser(const Module& m, const std::vector<Token>& toks) : m_(m), toks_(toks) {
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (!is_trivia(toks[i].kind)) sig_.push_back(i);
    }
  }

  std::vector<Statement> parse_module() {
    auto body = parse_block(false);
    if (kind() != TokenKind::EndMarker) throw error("unexpected dedent");
    return body;
  }

 private:
  TokenKind kind(std::size_t ahead = 0) const { return toks_[tok(ahead)].kind; }
  std::size_t tok(std::size_t ahead = 0) const { return sig_[std::min(i_ + ahead, sig_.size() - 1)]; }

  SyntaxError error(const std::string& what) const {
    const std::size_t off = toks_[tok()].begin;
    return SyntaxError(what, m_.lines().line_of(off), off);
  }

  std::vector<Statement> parse_block(bool in_match) {
    std::vector<Statement> out;
    while (kind() != TokenKind::Dedent && kind() != TokenKind::EndMarker) {
      if (kind() == TokenKind::Indent) throw error("unexpected indent");
      if (kind() == TokenKind::Newline) {
        ++i_;
        continue;
      }
      parse_logical_line(out, in_match);
    }
    return out;
  }

  // Index into sig_ of the NEWLINE ending the current logical line.
  std::size_t newline_pos() const {
    std::size_t j = i_;
    while (j < sig_.size() && toks_[sig_[j]].kind != TokenKind::Newline && toks_[sig_[j]].kind != TokenKind::EndMarker) ++j;
    return j;
  }

  bool is_soft_compound(bool in_match) const {
    const std::string_view w = m_.text(tok());
    if (w != "match" && w != "case") return false;
    const std::size_t nl = newline_pos();
    if (nl <= i_ + 1) return false;
    const std::size_t next = sig_[i_ + 1];
    if (toks_[next].kind == TokenKind::Op) {
      const std::string_view op = m_.text(next);
      if (op == ":" || op == "." || op == "," || op == ";" || op == ")" || is_assign_op(op)) return false;
    }
    if (w == "case" && in_match) return find_header_colon(nl).has_value();
    return m_.is_op(sig_[nl - 1], ":") && nl + 1 < sig_.size() && toks_[sig_[nl + 1]].kind == TokenKind::Indent;
  }

  bool is_compound_start(bool in_match) const {
    if (kind() != TokenKind::Name) return false;
    const std::string_view w = m_.text(tok());
    static constexpr std::string_view kCompound[] = {"if",      "elif", "else", "for",   "while", "try",
                                                     "except", "finally", "with", "def", "class"};
    if (std::find(std::begin(kCompound), std::end(kCompound), w) != std::end(kCompound)) return true;
    if (w == "async" && kind(1) == TokenKind::Name) {
      const std::string_view n = m_.text(tok(1));
      return n == "def" || n == "for" || n == "with";
    }
    return is_soft_compound(in_match);
  }

  // sig_ index of the ':' ending a compound header, scanning [i_, nl).
  std::optional<std::size_t> find_header_colon(std::size_t nl) const {
    int depth = 0;
    int lambdas = 0;
    for (std::size_t j = i_; j < nl; ++j) {
      const std::size_t t = sig_[j];
      if (toks_[t].kind == TokenKind::Name && m_.text(t) == "lambda" && depth == 0) ++lambdas;
      if (toks_[t].kind != TokenKind::Op) continue;
      const std::string_view op = m_.text(t);
      if (op == "(" || op == "[" || op == "{") ++depth;
      if (op == ")" || op == "]" || op == "}") --depth;
      if (op == ":" && depth == 0) {
        if (lambdas > 0) {
          --lambdas;
          continue;
        }
        return j;
      }
    }
    return std::nullopt;
  }

  void parse_logical_line(std::vector<Statement>& out, bool in_match) {
    if (kind() == TokenKind::Op && m_.text(tok()) == "@") {
      const std::size_t nl = newline_pos();
      Statement s;
      s.kind = Statement::Kind::Decorator;
      s.first = tok();
      s.last = sig_[nl];
      s.newline = sig_[nl];
      s.owns_line = true;
      out.push_back(std::move(s));
      i_ = nl + 1;
      return;
    }
    if (is_compound_start(in_match)) {
      parse_compound(out);
      return;
    }
    parse_simple_line(out, true);
  }

  void parse_compound(std::vector<Statement>& out) {
    const std::size_t nl = newline_pos();
    const auto colon = find_header_colon(nl);
    if (!colon) throw error("expected ':'");
    Statement s;
    s.kind = Statement::Kind::Compound;
    s.first = tok();
    s.last = sig_[*colon] + 1;
    const bool match_header = m_.text(tok()) == "match";
    i_ = *colon + 1;
    if (kind() == TokenKind::Newline) {
      ++i_;
      if (kind() != TokenKind::Indent) throw error("expected an indented block");
      ++i_;
      s.body = parse_block(match_header);
      if (kind() == TokenKind::Dedent) ++i_;
    } else {
      s.inline_body = true;
      parse_simple_line(s.body, false);
    }
    out.push_back(std::move(s));
  }

  void parse_simple_line(std::vector<Statement>& out, bool starts_line) {
    const std::size_t begin_index = out.size();
    std::optional<std::size_t> prev_semi;
    while (kind() != TokenKind::Newline && kind() != TokenKind::EndMarker) {
      Statement s;
      s.kind = Statement::Kind::Simple;
      s.first = tok();
      s.prev_semicolon = prev_semi;
      std::size_t last_sig = tok();
      while (kind() != TokenKind::Newline && kind() != TokenKind::EndMarker && !m_.is_op(tok(), ";")) {
        last_sig = tok();
        ++i_;
      }
      s.last = last_sig + 1;
      if (m_.is_op(tok(), ";")) {
        s.next_semicolon = tok();
        prev_semi = tok();
        ++i_;
      }
      if (s.first != tok() || s.last > s.first) out.push_back(std::move(s));
      // A trailing ';' directly before NEWLINE ends the line.
    }
    const std::size_t newline = tok();
    const std::size_t count = out.size() - begin_index;
    for (std::size_t k = begin_index; k < out.size(); ++k) {
      out[k].newline = newline;
      out[k].owns_line = starts_line && count == 1;
    }
    if (kind() == TokenKind::Newline) ++i_;
  }

  const Module& m_;
  const std::vector<Token>& toks_;
  std::vector<std::size_t> sig_;
  std::size_t i_ = 0;
};

}  // namespace detail

/// Throws SyntaxError for malformed sources.
inline Module::Module(std::string source)
    : source_(std::move(source)), tokens_(tokenize(source_)), lines_(source_) {
  body_ = detail::StructureParser(*this, tokens_).parse_module();
}

inline bool Module::is_function(const Statement& s) const {
  if (s.kind != Statement::Kind::Compound) return false;
  if (is_name(s.first, "def")) return true;
  const auto sig = significant(s.first, s.last);
  return sig.size() > 1 && is_name(sig[0], "async") && is_name(sig[1], "def");
}

inline bool Module::is_class(const Statement& s) const {
  return s.kind == Statement::Kind::Compound && is_name(s.first, "class");
}

inline std::optional<FunctionHeader> Module::function_header(const Statement& s) const {
  if (!is_function(s)) return std::nullopt;
  const auto sig = significant(s.first, s.last);
  FunctionHeader h;
  std::size_t k = 0;
  if (is_name(sig[k], "async")) {
    h.is_async = true;
    ++k;
  }
  ++k;  // def
  if (k >= sig.size() || tokens_[sig[k]].kind != TokenKind::Name) return std::nullopt;
  h.name = sig[k++];
  if (k < sig.size() && is_op(sig[k], "[")) {
    int depth = 0;
    for (; k < sig.size(); ++k) {
      if (is_op(sig[k], "[")) ++depth;
      if (is_op(sig[k], "]") && --depth == 0) break;
    }
    ++k;
  }
  if (k >= sig.size() || !is_op(sig[k], "(")) return std::nullopt;
  h.lparen = sig[k++];
  // Split parameters at depth-0 commas.
  std::vector<std::vector<std::size_t>> chunks(1);
  int depth = 0;
  for (; k < sig.size(); ++k) {
    const std::size_t t = sig[k];
    if (tokens_[t].kind == TokenKind::Op) {
      const std::string_view op = text(t);
      if (op == "(" || op == "[" || op == "{") ++depth;
      if (op == ")" || op == "]" || op == "}") {
        if (depth == 0) break;
        --depth;
      }
      if (op == "," && depth == 0) {
        chunks.emplace_back();
        continue;
      }
    }
    chunks.back().push_back(t);
  }
  if (k >= sig.size()) return std::nullopt;
  h.rparen = sig[k++];
  for (const auto& chunk : chunks) {
    if (chunk.empty()) continue;
    Param p;
    std::size_t c = 0;
    if (is_op(chunk[0], "*") || is_op(chunk[0], "**")) {
      p.stars = is_op(chunk[0], "*") ? 1 : 2;
      ++c;
    }
    if (c >= chunk.size() || is_op(chunk[0], "/")) {
      p.marker = true;
      p.name = chunk[0];
      h.params.push_back(p);
      continue;
    }
    p.name = chunk[c++];
    int d = 0;
    for (std::size_t j = c; j < chunk.size(); ++j) {
      const std::size_t t = chunk[j];
      if (tokens_[t].kind == TokenKind::Op) {
        const std::string_view op = text(t);
        if (op == "(" || op == "[" || op == "{") ++d;
        if (op == ")" || op == "]" || op == "}") --d;
        if (d == 0 && op == ":" && !p.colon && !p.equals) {
          p.colon = t;
          continue;
        }
        if (d == 0 && op == "=" && !p.equals) {
          p.equals = t;
          continue;
        }
      }
      if (p.colon && !p.equals) {
        if (p.ann_last == 0) p.ann_first = t;
        p.ann_last = t + 1;
      }
    }
    if (p.colon && p.ann_last == 0) return std::nullopt;
    h.params.push_back(p);
  }
  if (k < sig.size() && is_op(sig[k], "->")) {
    h.arrow = sig[k++];
    h.ret_first = sig[k];
    while (k < sig.size() && !(is_op(sig[k], ":") && k + 1 == sig.size())) {
      h.ret_last = sig[k] + 1;
      ++k;
    }
    if (h.ret_last == 0) return std::nullopt;
  }
  h.colon = sig.back();
  return h;
}

inline std::optional<AnnAssign> Module::annotated_assignment(const Statement& s) const {
  if (s.kind != Statement::Kind::Simple) return std::nullopt;
  const auto sig = significant(s.first, s.last);
  if (sig.empty()) return std::nullopt;
  if (tokens_[sig[0]].kind == TokenKind::Name && detail::is_hard_keyword(text(sig[0]))) return std::nullopt;
  if (tokens_[sig[0]].kind != TokenKind::Name && !is_op(sig[0], "(")) return std::nullopt;
  int depth = 0;
  std::optional<std::size_t> colon_k;
  for (std::size_t k = 0; k < sig.size(); ++k) {
    const std::size_t t = sig[k];
    if (tokens_[t].kind == TokenKind::Name && text(t) == "lambda") return std::nullopt;
    if (tokens_[t].kind != TokenKind::Op) continue;
    const std::string_view op = text(t);
    if (op == "(" || op == "[" || op == "{") ++depth;
    if (op == ")" || op == "]" || op == "}") --depth;
    if (depth != 0) continue;
    if (detail::is_assign_op(op)) return std::nullopt;
    if (op == ":") {
      colon_k = k;
      break;
    }
  }
  if (!colon_k || *colon_k == 0 || *colon_k + 1 >= sig.size()) return std::nullopt;
  AnnAssign a;
  a.target_first = sig[0];
  a.target_last = sig[*colon_k - 1] + 1;
  a.colon = sig[*colon_k];
  a.simple_name = *colon_k == 1 && tokens_[sig[0]].kind == TokenKind::Name;
  a.ann_first = sig[*colon_k + 1];
  depth = 0;
  for (std::size_t k = *colon_k + 1; k < sig.size(); ++k) {
    const std::size_t t = sig[k];
    if (tokens_[t].kind == TokenKind::Op) {
      const std::string_view op = text(t);
      if (op == "(" || op == "[" || op == "{") ++depth;
      if (op == ")" || op == "]" || op == "}") --depth;
      if (depth == 0 && op == "=") {
        a.equals = t;
        break;
      }
    }
    a.ann_last = t + 1;
  }
  if (a.ann_last == 0) return std::nullopt;
  return a;
}

inline std::optional<std::size_t> Module::docstring_token(const Statement& s) const {
  if (s.kind != Statement::Kind::Simple) return std::nullopt;
  const auto sig = significant(s.first, s.last);
  if (sig.size() != 1 || tokens_[sig[0]].kind != TokenKind::String) return std::nullopt;
  const std::string_view t = text(sig[0]);
  const std::size_t q = t.find_first_of("'\"");
  if (t.substr(0, q).find_first_of("bBfF") != std::string_view::npos) return std::nullopt;
  return sig[0];
}

inline std::string Module::decorator_text(const Statement& s) const {
  std::string out;
  for (std::size_t t : significant(s.first + 1, s.last)) out += text(t);
  return out;
}

}  // namespace typeqal::py
