#include <gtest/gtest.h>

#include <random>

#include "typeqal/curation.hpp"

namespace typeqal {
namespace {

RepoMetadata passing() {
  RepoMetadata m;
  m.name = "repo";
  m.tokens = 1;
  m.python_files = 30;
  m.typed_ratio = 0.5;
  return m;
}

TEST(FilterCandidate, TokenLimit) {
  auto m = passing();
  m.tokens = 2e6;
  const auto r = filter_candidate(m);
  EXPECT_FALSE(r.accepted);
  EXPECT_EQ(r.reasons, std::vector<std::string>{"token-limit"});
}

TEST(FilterCandidate, BoundariesInclusive) {
  auto m = passing();
  EXPECT_TRUE(filter_candidate(m).accepted);
  m.tokens = 1.5e6;
  EXPECT_TRUE(filter_candidate(m).accepted);
  m.tokens = 1.5e6 + 1;
  EXPECT_FALSE(filter_candidate(m).accepted);
  m = passing();
  m.python_files = 29;
  EXPECT_EQ(filter_candidate(m).reasons, std::vector<std::string>{"file-count"});
}

TEST(FilterCandidate, Coverage) {
  auto m = passing();
  m.typed_ratio = 0.49;
  EXPECT_EQ(filter_candidate(m).reasons, std::vector<std::string>{"coverage"});
}

TEST(FilterCandidate, ConfigurableAndIndependentOfWeights) {
  auto m = passing();
  m.python_files = 10;
  FilterLimits limits;
  limits.min_files = 10;
  EXPECT_TRUE(filter_candidate(m, limits).accepted);
  EXPECT_FALSE(filter_candidate(m).accepted);
}

TEST(QualityScore, SingleTerm) {
  auto m = passing();
  m.typed_ratio = 0.8;
  m.stars = 1000;
  EXPECT_DOUBLE_EQ(quality_score(m, {1, 0, 0}), 0.8);
}

TEST(QualityScore, AllComponentsZero) {
  RepoMetadata m;
  m.mean_depth = 1;
  EXPECT_EQ(quality_score(m), 0.0);
}

TEST(QualityScore, ComponentFormulas) {
  RepoMetadata m;
  m.typed_ratio = 0.6;
  m.stars = 999;
  m.downloads = 0;
  m.mean_depth = 1.5;
  m.distinct_types = 50;
  const auto c = score_components(m);
  EXPECT_DOUBLE_EQ(c.coverage, 0.6);
  EXPECT_NEAR(c.popularity, 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(c.complexity, 0.5);
  m.stars = 1e9;
  m.mean_depth = 9;
  m.distinct_types = 1e4;
  EXPECT_EQ(score_components(m).popularity, 1.0);
  EXPECT_EQ(score_components(m).complexity, 1.0);
}

RepoMetadata random_meta(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  RepoMetadata m;
  m.name = "r" + std::to_string(rng() % 1000);
  m.tokens = u(rng) * 3e6;
  m.python_files = static_cast<double>(rng() % 100);
  m.typed_ratio = u(rng);
  m.stars = std::floor(std::pow(10, u(rng) * 7));
  m.downloads = std::floor(std::pow(10, u(rng) * 8));
  m.mean_depth = 1 + u(rng) * 3;
  m.distinct_types = static_cast<double>(rng() % 300);
  return m;
}

TEST(QualityScore, MonotoneAndBounded) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    const auto m = random_meta(rng);
    const CurationWeights w{u(rng), u(rng), u(rng) + 1e-3};
    const double s = quality_score(m, w);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, w.alpha + w.beta + w.gamma + 1e-12);
    const double bump = 1 + u(rng) * 100;
    auto up = m;
    up.stars += bump;
    EXPECT_GE(quality_score(up, w), s);
    up = m;
    up.downloads += bump;
    EXPECT_GE(quality_score(up, w), s);
    up = m;
    up.typed_ratio = std::min(1.0, m.typed_ratio + u(rng) * 0.2);
    EXPECT_GE(quality_score(up, w), s);
    up = m;
    up.mean_depth += u(rng);
    EXPECT_GE(quality_score(up, w), s);
    up = m;
    up.distinct_types += bump;
    EXPECT_GE(quality_score(up, w), s);
  }
}

TEST(RankCandidates, FiltersAndOrders) {
  auto a = passing();
  a.name = "beta";
  auto b = passing();
  b.name = "alpha";
  auto c = passing();
  c.name = "gamma";
  c.python_files = 3;
  auto d = passing();
  d.name = "delta";
  d.typed_ratio = 0.9;
  const auto ranked = rank_candidates({a, b, c, d});
  ASSERT_EQ(ranked.size(), 3u);
  EXPECT_EQ(ranked[0].meta.name, "delta");
  EXPECT_EQ(ranked[1].meta.name, "alpha");
  EXPECT_EQ(ranked[2].meta.name, "beta");
  EXPECT_EQ(ranked_csv({}), "rank,name,score,coverage,popularity,complexity\n");
  EXPECT_THROW(rank_candidates({a}, {}, {0, 0, 0}), std::invalid_argument);
  EXPECT_THROW(rank_candidates({a}, {}, {-1, 1, 1}), std::invalid_argument);
}

TEST(ParseMetadata, ValidAndInvalid) {
  const auto v = parse_metadata(R"([{"name": "x", "tokens": 10, "python_files": 40, "typed_ratio": 0.7, "stars": 5}])");
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].stars, 5);
  EXPECT_EQ(v[0].downloads, 0);
  EXPECT_TRUE(parse_metadata("[]").empty());
  EXPECT_THROW(parse_metadata("{}"), SchemaError);
  EXPECT_THROW(parse_metadata("[{\"name\": \"x\"}]"), SchemaError);
  EXPECT_THROW(parse_metadata(R"([{"name": "x", "tokens": 1, "python_files": 1, "typed_ratio": 2}])"), SchemaError);
  EXPECT_THROW(parse_metadata(R"([{"name": "x", "tokens": -1, "python_files": 1, "typed_ratio": 0}])"), SchemaError);
  EXPECT_THROW(parse_metadata("[oops"), SchemaError);
}

}  // namespace
}  // namespace typeqal
