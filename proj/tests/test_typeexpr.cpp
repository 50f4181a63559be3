#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "typeqal/typeexpr.hpp"

namespace typeqal {
namespace {

using Kind = TypeNode::Kind;

TEST(ParseType, SingleIdentifierIsLeaf) {
  EXPECT_EQ(parse_type("int"), TypeNode::leaf("int"));
}

TEST(ParseType, Pep604UnionOfGenericAndNone) {
  const TypeNode expected = TypeNode::union_of({TypeNode::generic("list", {TypeNode::leaf("Any")}), TypeNode::leaf("None")});
  EXPECT_EQ(parse_type("list[Any] | None"), expected);
}

TEST(ParseType, OptionalDesugarsToUnionWithNone) {
  const TypeNode expected = TypeNode::union_of({TypeNode::leaf("pathlib.Path"), TypeNode::leaf("None")});
  EXPECT_EQ(parse_type("Optional[pathlib.Path]"), expected);
  EXPECT_EQ(parse_type("typing.Optional[pathlib.Path]"), expected);
}

TEST(ParseType, UnbalancedBracketReportsOffset) {
  try {
    parse_type("list[");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 5u);
  }
}

TEST(ParseType, MalformedInputs) {
  EXPECT_THROW(parse_type("list[]"), ParseError);
  EXPECT_THROW(parse_type(""), ParseError);
  EXPECT_THROW(parse_type("int]"), ParseError);
  EXPECT_THROW(parse_type("dict[str,, int]"), ParseError);
  EXPECT_THROW(parse_type("int $"), ParseError);
  EXPECT_THROW(parse_type("'unterminated"), ParseError);
  try {
    parse_type("list[]");
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 5u);
  }
}

TEST(ParseType, TypingAliasesLowered) {
  EXPECT_EQ(render(parse_type("List[Dict[str, Tuple[int, float]]]")), "list[dict[str, tuple[int, float]]]");
  EXPECT_EQ(render(parse_type("typing.Set[Text]")), "set[str]");
  EXPECT_EQ(render(parse_type("FrozenSet[Type[int]]")), "frozenset[type[int]]");
  EXPECT_EQ(render(parse_type("NoneType")), "None");
}

TEST(ParseType, QuotedForwardReferences) {
  EXPECT_EQ(parse_type("'MyClass'"), TypeNode::leaf("MyClass"));
  EXPECT_EQ(render(parse_type("list['Node']")), "list[Node]");
  EXPECT_EQ(render(parse_type("\"Optional[List[int]]\"")), "None | list[int]");
}

TEST(ParseType, CallableParameterListFlattened) {
  EXPECT_EQ(render(parse_type("Callable[[int, str], bool]")), "Callable[int, str, bool]");
  EXPECT_EQ(render(parse_type("Callable[..., Any]")), "Callable[Any]");
  EXPECT_EQ(render(parse_type("Callable[[], None]")), "Callable[None]");
}

TEST(ParseType, LiteralArgumentsVerbatim) {
  const TypeNode lit = parse_type("Literal['a', \"b\", -1, Color.RED]");
  ASSERT_EQ(lit.kind, Kind::Generic);
  ASSERT_EQ(lit.args().size(), 4u);
  EXPECT_EQ(lit.args()[0].name, "'a'");
  EXPECT_EQ(lit.args()[1].name, "\"b\"");
  EXPECT_EQ(lit.args()[2].name, "-1");
  EXPECT_EQ(lit.args()[3].name, "Color.RED");
  EXPECT_EQ(render(lit), "Literal['a', \"b\", -1, Color.RED]");
}

TEST(ParseType, AnnotatedKeepsOnlyTheType) {
  EXPECT_EQ(render(parse_type("Annotated[int, Field(gt=0, le=[1, 2])]")), "int");
}

TEST(ParseType, SourceTriviaIgnored) {
  EXPECT_EQ(render(parse_type("Dict[  # keys\n    str,\n    int]")), "dict[str, int]");
}

TEST(NormalizeType, FlattensNestedUnions) {
  const TypeNode nested = TypeNode::union_of(
      {TypeNode::union_of({TypeNode::leaf("int"), TypeNode::leaf("str")}), TypeNode::leaf("None")});
  const TypeNode flat = TypeNode::union_of({TypeNode::leaf("int"), TypeNode::leaf("str"), TypeNode::leaf("None")});
  EXPECT_EQ(normalize_type(nested), flat);
  EXPECT_EQ(normalize_type(nested).members().size(), 3u);
}

TEST(NormalizeType, DropsTupleEllipsis) {
  const TypeNode raw = TypeNode::generic("tuple", {TypeNode::leaf("int"), TypeNode::leaf("...")});
  EXPECT_EQ(normalize_type(raw), TypeNode::generic("tuple", {TypeNode::leaf("int")}));
}

TEST(NormalizeType, DuplicateMembersCollapse) {
  EXPECT_EQ(normalize_type(TypeNode::union_of({TypeNode::leaf("int"), TypeNode::leaf("int")})), TypeNode::leaf("int"));
  EXPECT_EQ(parse_type("Union[int]"), TypeNode::leaf("int"));
  EXPECT_EQ(parse_type("Union[int, Optional[int]]"), parse_type("int | None"));
}

TEST(NormalizeType, EmptyTupleCollapsesToLeaf) {
  EXPECT_EQ(parse_type("tuple[()]"), TypeNode::leaf("tuple"));
}

TEST(NormalizeType, BareOptionalAndUnionStayLeaves) {
  EXPECT_EQ(parse_type("Optional"), TypeNode::leaf("Optional"));
  EXPECT_EQ(parse_type("typing.Union"), TypeNode::leaf("Union"));
}

TEST(Depth, Examples) {
  EXPECT_EQ(depth(TypeNode::leaf("int")), 1u);
  EXPECT_EQ(depth(parse_type("list[int]")), 2u);
  EXPECT_EQ(depth(parse_type("dict[str, list[int]]")), 3u);
  EXPECT_EQ(depth(parse_type("int | list[int]")), 2u);
  EXPECT_EQ(depth(parse_type("Optional[int]")), 1u);
}

TEST(Render, Examples) {
  EXPECT_EQ(render(TypeNode::union_of({TypeNode::leaf("None"), TypeNode::leaf("str")})), "None | str");
  EXPECT_EQ(render(TypeNode::generic("dict", {TypeNode::leaf("str"), TypeNode::leaf("int")})), "dict[str, int]");
  EXPECT_EQ(render(TypeNode::leaf("pathlib.Path")), "pathlib.Path");
  EXPECT_EQ(render(parse_type("str | None")), "None | str");
}

TEST(TypeNodeEquality, UnionOrderIrrelevant) {
  EXPECT_EQ(parse_type("int | str | None"), parse_type("None | str | int"));
  EXPECT_EQ(parse_type("Union[str, int]"), parse_type("Union[int, str]"));
  EXPECT_FALSE(parse_type("dict[str, int]") == parse_type("dict[int, str]"));
}

class TypeExprProperties : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(TypeExprProperties, RoundTripIdempotenceAndDepth) {
  std::mt19937_64 rng(GetParam());
  for (int i = 0; i < 500; ++i) {
    const std::string text = testing::random_type_text(rng, 4);
    const TypeNode node = parse_type(text);
    const std::string canonical = render(node);
    SCOPED_TRACE(text);
    EXPECT_EQ(render(parse_type(canonical)), canonical);
    EXPECT_EQ(parse_type(canonical), node);
    EXPECT_EQ(normalize_type(node), node);
    EXPECT_GE(depth(node), 1u);
    if (node.kind == Kind::Generic) {
      unsigned deepest = 0;
      for (const auto& a : node.args()) deepest = std::max(deepest, depth(a));
      EXPECT_EQ(depth(node), 1 + deepest);
    }
    if (node.is_union()) {
      EXPECT_GE(node.members().size(), 2u);
      for (const auto& m : node.members()) EXPECT_FALSE(m.is_union());
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, TypeExprProperties, ::testing::Values(1u, 7u, 42u, 2024u));

}  // namespace
}  // namespace typeqal
