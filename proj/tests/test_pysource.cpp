#include <gtest/gtest.h>

#include "typeqal/pysource.hpp"

namespace typeqal::py {
namespace {

std::vector<std::string> texts(std::string_view src) {
  std::vector<std::string> out;
  for (const auto& t : tokenize(src)) {
    if (t.kind == TokenKind::Name || t.kind == TokenKind::Op || t.kind == TokenKind::String ||
        t.kind == TokenKind::Number) {
      out.emplace_back(src.substr(t.begin, t.end - t.begin));
    }
  }
  return out;
}

TEST(Tokenize, TokensCoverSourceLosslessly) {
  const std::string src = "def f(a: int = 1, *b) -> 'x':  # c\n    return a ** 2\n";
  std::size_t covered = 0;
  for (const auto& t : tokenize(src)) {
    EXPECT_LE(covered, t.begin);
    for (std::size_t i = covered; i < t.begin; ++i) EXPECT_TRUE(src[i] == ' ' || src[i] == '\t') << i;
    covered = std::max(covered, t.end);
  }
  EXPECT_EQ(covered, src.size());
}

TEST(Tokenize, StringsWithPrefixesAndNesting) {
  EXPECT_EQ(texts(R"(x = rb'\d' + f"{a['k']!r:>{w}}" + '''a
b''')"),
            (std::vector<std::string>{"x", "=", R"(rb'\d')", "+", R"(f"{a['k']!r:>{w}}")", "+", "'''a\nb'''"}));
  EXPECT_EQ(texts("u'\\''"), (std::vector<std::string>{"u'\\''"}));
}

TEST(Tokenize, OperatorsAndNumbers) {
  EXPECT_EQ(texts("a->b:=1e-3**2//0x1F...;"),
            (std::vector<std::string>{"a", "->", "b", ":=", "1e-3", "**", "2", "//", "0x1F", "...", ";"}));
}

TEST(Tokenize, NewlinesInsideBracketsAreNotLogical) {
  int logical = 0;
  for (const auto& t : tokenize("f(1,\n  2)\nx = [\n]\n")) logical += t.kind == TokenKind::Newline;
  EXPECT_EQ(logical, 2);
}

TEST(Tokenize, IndentDedentBalanced) {
  int depth = 0;
  int max_depth = 0;
  for (const auto& t : tokenize("if a:\n    if b:\n        c\n\n    # note\nd\n")) {
    depth += t.kind == TokenKind::Indent ? 1 : t.kind == TokenKind::Dedent ? -1 : 0;
    max_depth = std::max(max_depth, depth);
  }
  EXPECT_EQ(depth, 0);
  EXPECT_EQ(max_depth, 2);
}

TEST(Tokenize, SyntaxErrorsCarryLines) {
  try {
    tokenize("x = 1\ny = 'abc\n");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(tokenize("f(1, 2\n"), SyntaxError);
  EXPECT_THROW(tokenize("x = )\n"), SyntaxError);
  EXPECT_THROW(tokenize("if a:\n    b\n  c\n"), SyntaxError);
  EXPECT_THROW(tokenize("x = $\n"), SyntaxError);
}

TEST(Tokenize, CrlfAndMissingTrailingNewline) {
  const auto toks = tokenize("x = 1\r\ny = 2");
  int logical = 0;
  for (const auto& t : toks) logical += t.kind == TokenKind::Newline;
  EXPECT_EQ(logical, 2);
  EXPECT_EQ(toks.back().kind, TokenKind::EndMarker);
}

TEST(Module, StatementStructure) {
  const Module m("import os\n@dec\nclass A(B):\n    x: int\n    def f(self): pass\nif a: b = 1; c = 2\n");
  ASSERT_EQ(m.body().size(), 4u);
  EXPECT_EQ(m.body()[0].kind, Statement::Kind::Simple);
  EXPECT_EQ(m.body()[1].kind, Statement::Kind::Decorator);
  EXPECT_EQ(m.decorator_text(m.body()[1]), "dec");
  ASSERT_TRUE(m.is_class(m.body()[2]));
  ASSERT_EQ(m.body()[2].body.size(), 2u);
  EXPECT_TRUE(m.is_function(m.body()[2].body[1]));
  EXPECT_TRUE(m.body()[2].body[1].inline_body);
  const auto& iff = m.body()[3];
  ASSERT_EQ(iff.body.size(), 2u);
  EXPECT_FALSE(iff.body[0].owns_line);
  EXPECT_TRUE(iff.body[0].next_semicolon.has_value());
  EXPECT_TRUE(iff.body[1].prev_semicolon.has_value());
}

TEST(Module, UnexpectedIndentAndMissingColon) {
  EXPECT_THROW(Module("x = 1\n    y = 2\n"), SyntaxError);
  EXPECT_THROW(Module("def f()\n    pass\n"), SyntaxError);
  EXPECT_THROW(Module("if x:\npass\n"), SyntaxError);
}

TEST(Module, LambdaColonsInHeaders) {
  const Module m("if (lambda: 1)() and (lambda x: x)(2): pass\nwith f(key=lambda v: v) as g: pass\n");
  ASSERT_EQ(m.body().size(), 2u);
  EXPECT_EQ(m.body()[0].body.size(), 1u);
}

TEST(Module, SoftKeywords) {
  const Module m("match = 1\nmatch x:\n    case [a, b]:\n        pass\n    case _: pass\nmatch: int = 2\n");
  ASSERT_EQ(m.body().size(), 3u);
  EXPECT_EQ(m.body()[1].kind, Statement::Kind::Compound);
  EXPECT_EQ(m.body()[1].body.size(), 2u);
  EXPECT_TRUE(m.annotated_assignment(m.body()[2]).has_value());
}

TEST(Module, FunctionHeaderParts) {
  const Module m("async def f(a, b: dict[str, int] = {}, *c: int, d=lambda: 1, **e: 'X') -> list[int]:\n    ...\n");
  const auto h = m.function_header(m.body()[0]);
  ASSERT_TRUE(h);
  EXPECT_TRUE(h->is_async);
  EXPECT_EQ(m.text(h->name), "f");
  ASSERT_EQ(h->params.size(), 5u);
  EXPECT_FALSE(h->params[0].colon);
  EXPECT_EQ(m.span_text(h->params[1].ann_first, h->params[1].ann_last), "dict[str, int]");
  EXPECT_TRUE(h->params[1].equals);
  EXPECT_EQ(h->params[2].stars, 1);
  EXPECT_FALSE(h->params[3].colon);
  EXPECT_EQ(h->params[4].stars, 2);
  EXPECT_EQ(m.span_text(h->params[4].ann_first, h->params[4].ann_last), "'X'");
  EXPECT_EQ(m.span_text(h->ret_first, h->ret_last), "list[int]");
}

TEST(Module, AnnotatedAssignmentShapes) {
  const Module m("x: int = 5\nself.y: str\nd[k]: float = 1.0\nz = {'a': 1}\nf(a=1)\nlambda: 0\nw += 1\n");
  const auto& b = m.body();
  ASSERT_TRUE(m.annotated_assignment(b[0]));
  EXPECT_TRUE(m.annotated_assignment(b[0])->simple_name);
  ASSERT_TRUE(m.annotated_assignment(b[1]));
  EXPECT_FALSE(m.annotated_assignment(b[1])->simple_name);
  ASSERT_TRUE(m.annotated_assignment(b[2]));
  for (std::size_t i = 3; i < b.size(); ++i) EXPECT_FALSE(m.annotated_assignment(b[i])) << i;
}

TEST(Module, DocstringDetection) {
  const Module m("'''doc'''\nb'x'\nf'{y}'\n'a' 'b'\n");
  EXPECT_TRUE(m.docstring_token(m.body()[0]));
  EXPECT_FALSE(m.docstring_token(m.body()[1]));
  EXPECT_FALSE(m.docstring_token(m.body()[2]));
  EXPECT_FALSE(m.docstring_token(m.body()[3]));
}

}  // namespace
}  // namespace typeqal::py
