#include <gtest/gtest.h>

#include "test_support.hpp"
#include "typeqal/attrdb.hpp"

namespace typeqal {
namespace {

using testing::snapshot_db;

TEST(LoadAttrDb, SnapshotLoads) {
  const auto& db = snapshot_db();
  EXPECT_TRUE(db.contains("int"));
  EXPECT_EQ(db.version(), 1);
  EXPECT_FALSE(db.object_baseline().empty());
}

TEST(LoadAttrDb, BaselineDisjointFromEveryType) {
  const auto& db = snapshot_db();
  for (const auto& [name, attrs] : db.types()) {
    for (const auto& a : attrs) EXPECT_FALSE(db.object_baseline().contains(a)) << name << "." << a;
  }
}

TEST(LoadAttrDb, CoversBuiltinsAndAbstractHierarchy) {
  const auto& db = snapshot_db();
  for (const char* name : {"int", "float", "str", "bytes", "bool", "list", "tuple", "dict", "set", "frozenset",
                           "Iterable", "Iterator", "Sequence", "MutableSequence", "Mapping", "MutableMapping",
                           "AbstractSet", "Collection", "Container", "Sized", "Hashable", "Callable",
                           "collections.abc.Sequence"}) {
    const auto* attrs = db.find(name);
    ASSERT_NE(attrs, nullptr) << name;
    EXPECT_FALSE(attrs->empty()) << name;
  }
  ASSERT_NE(db.find("int"), nullptr);
  const auto& ints = *db.find("int");
  EXPECT_TRUE(std::binary_search(ints.begin(), ints.end(), "__add__"));
  EXPECT_FALSE(std::binary_search(ints.begin(), ints.end(), "__init__"));
}

TEST(LoadAttrDb, SubtractsBaselineOnLoad) {
  const auto db = parse_attrdb(R"({"version": 1, "object_baseline": ["__init__", "__str__"],
                                   "types": {"List": ["append", "__init__", "__len__"]}})");
  ASSERT_NE(db.find("list"), nullptr);
  EXPECT_EQ(*db.find("list"), (std::vector<std::string>{"__len__", "append"}));
}

TEST(LoadAttrDb, MissingBaselineIsSchemaError) {
  EXPECT_THROW(parse_attrdb(R"({"version": 1, "types": {}})"), SchemaError);
}

TEST(LoadAttrDb, WrongVersionNamesVersions) {
  try {
    parse_attrdb(R"({"version": 7, "object_baseline": [], "types": {}})");
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find('7'), std::string::npos);
    EXPECT_NE(msg.find("supported: 1"), std::string::npos);
  }
}

TEST(LoadAttrDb, NonStringAttributeIsSchemaError) {
  EXPECT_THROW(parse_attrdb(R"({"version": 1, "object_baseline": [], "types": {"int": [1]}})"), SchemaError);
  EXPECT_THROW(parse_attrdb("not json"), SchemaError);
}

TEST(LoadAttrDb, MissingFileIsIoError) {
  EXPECT_THROW(load_attrdb("/nonexistent/attrdb.json"), IoError);
}

TEST(BaseSimilarity, IdentityShortCircuit) {
  const auto& db = snapshot_db();
  EXPECT_EQ(base_similarity(db, "int", "int"), 1.0);
  EXPECT_EQ(base_similarity(db, "Any", "Any"), 1.0);
  EXPECT_EQ(base_similarity(db, "np.ndarray", "np.ndarray"), 1.0);
}

TEST(BaseSimilarity, PublishedAnchors) {
  const auto& db = snapshot_db();
  EXPECT_NEAR(base_similarity(db, "int", "float"), 0.6, 0.05);
  EXPECT_NEAR(base_similarity(db, "int", "str"), 0.06, 0.05);
  EXPECT_NEAR(base_similarity(db, "Iterable", "Sequence"), 0.92, 0.05);
  EXPECT_NEAR(base_similarity(db, "Sequence", "list"), 0.7, 0.05);
}

TEST(BaseSimilarity, AnyAgainstConcreteIsZero) {
  // Table row "list[Any] | None" vs "list[str] | None" = 0.75 forces this.
  EXPECT_EQ(base_similarity(snapshot_db(), "Any", "str"), 0.0);
}

TEST(BaseSimilarity, UnknownNamesCompareByName) {
  const auto& db = snapshot_db();
  EXPECT_EQ(base_similarity(db, "MyClass", "OtherClass"), 0.0);
  EXPECT_EQ(base_similarity(db, "MyClass", "int"), 0.0);
}

TEST(BaseSimilarity, QualifiedNamesMatchOnLastSegment) {
  const auto& db = snapshot_db();
  EXPECT_EQ(base_similarity(db, "pathlib.Path", "Path"), 1.0);
  EXPECT_EQ(base_similarity(db, "pathlib.Path", "Path", NameMatch::FullName), 0.0);
  // Distinct spellings of the same abstract type share one attribute set.
  EXPECT_EQ(base_similarity(db, "collections.abc.Sequence", "Sequence", NameMatch::FullName), 1.0);
}

TEST(BaseSimilarity, SymmetricAndBounded) {
  const auto& db = snapshot_db();
  std::vector<std::string> names;
  for (const auto& [name, _] : db.types()) names.push_back(name);
  names.push_back("MyClass");
  for (const auto& a : names) {
    for (const auto& b : names) {
      const double ab = base_similarity(db, a, b);
      EXPECT_EQ(ab, base_similarity(db, b, a));
      EXPECT_GE(ab, 0.0);
      EXPECT_LE(ab, 1.0);
      if (ab == 1.0 && !names_equal(a, b)) {
        EXPECT_EQ(*db.find(a), *db.find(b)) << a << " " << b;
      }
    }
  }
}

}  // namespace
}  // namespace typeqal
