#pragma once

// Repository selection: hard filters and a weighted quality score over
// locally supplied metadata.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "typeqal/errors.hpp"

namespace typeqal {

struct RepoMetadata {
  std::string name;
  double tokens = 0;
  double python_files = 0;
  double typed_ratio = 0;  ///< fraction of typed functions, in [0, 1]
  double stars = 0;
  double downloads = 0;
  double mean_depth = 1;
  double distinct_types = 0;
};

struct FilterLimits {
  double max_tokens = 1.5e6;
  double min_files = 30;
  double min_typed_ratio = 0.5;
};

struct CurationWeights {
  double alpha = 1.0 / 3.0;
  double beta = 1.0 / 3.0;
  double gamma = 1.0 / 3.0;
};

inline void validate(const CurationWeights& w) {
  if (!(w.alpha >= 0 && w.beta >= 0 && w.gamma >= 0) || !(w.alpha + w.beta + w.gamma > 0)) {
    throw std::invalid_argument("weights must be nonnegative with a positive sum");
  }
}

struct FilterResult {
  bool accepted = true;
  std::vector<std::string> reasons;  ///< token-limit, file-count, coverage
};

/// All bounds inclusive.
inline FilterResult filter_candidate(const RepoMetadata& m, const FilterLimits& limits = {}) {
  FilterResult r;
  if (m.tokens > limits.max_tokens) r.reasons.emplace_back("token-limit");
  if (m.python_files < limits.min_files) r.reasons.emplace_back("file-count");
  if (m.typed_ratio < limits.min_typed_ratio) r.reasons.emplace_back("coverage");
  r.accepted = r.reasons.empty();
  return r;
}

struct ScoreComponents {
  double coverage = 0;
  double popularity = 0;
  double complexity = 0;
};

inline ScoreComponents score_components(const RepoMetadata& m) {
  ScoreComponents c;
  c.coverage = std::clamp(m.typed_ratio, 0.0, 1.0);
  c.popularity = std::min(1.0, std::log10(1.0 + std::max(0.0, m.stars) + std::max(0.0, m.downloads)) / 6.0);
  const double depth_excess = std::clamp(m.mean_depth - 1.0, 0.0, 1.0);
  const double variety = std::clamp(m.distinct_types / 100.0, 0.0, 1.0);
  c.complexity = 0.5 * (depth_excess + variety);
  return c;
}

/// S = alpha * coverage + beta * popularity + gamma * complexity.
inline double quality_score(const RepoMetadata& m, const CurationWeights& w = {}) {
  const auto c = score_components(m);
  return w.alpha * c.coverage + w.beta * c.popularity + w.gamma * c.complexity;
}

/// Parses a JSON array of metadata records. Throws SchemaError.
inline std::vector<RepoMetadata> parse_metadata(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("metadata is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw SchemaError("metadata must be a JSON array");
  std::vector<RepoMetadata> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& rec = doc[i];
    const std::string where = "record " + std::to_string(i);
    if (!rec.is_object()) throw SchemaError(where + ": not an object");
    if (!rec.contains("name") || !rec["name"].is_string()) throw SchemaError(where + ": missing string field 'name'");
    RepoMetadata m;
    m.name = rec["name"].get<std::string>();
    const auto number = [&](const char* key, double& into, bool required) {
      if (!rec.contains(key)) {
        if (required) throw SchemaError(where + ": missing field '" + key + "'");
        return;
      }
      if (!rec[key].is_number()) throw SchemaError(where + ": field '" + key + "' must be a number");
      into = rec[key].get<double>();
      if (into < 0) throw SchemaError(where + ": field '" + key + "' must be nonnegative");
    };
    number("tokens", m.tokens, true);
    number("python_files", m.python_files, true);
    number("typed_ratio", m.typed_ratio, true);
    number("stars", m.stars, false);
    number("downloads", m.downloads, false);
    number("mean_depth", m.mean_depth, false);
    number("distinct_types", m.distinct_types, false);
    if (m.typed_ratio > 1) throw SchemaError(where + ": typed_ratio must be in [0, 1]");
    out.push_back(std::move(m));
  }
  return out;
}

struct RankedRepo {
  RepoMetadata meta;
  ScoreComponents components;
  double score = 0;
};

/// Accepted candidates ordered by score (descending), then name.
inline std::vector<RankedRepo> rank_candidates(const std::vector<RepoMetadata>& metas, const FilterLimits& limits = {},
                                               const CurationWeights& w = {}) {
  validate(w);
  std::vector<RankedRepo> out;
  for (const auto& m : metas) {
    if (!filter_candidate(m, limits).accepted) continue;
    out.push_back({m, score_components(m), quality_score(m, w)});
  }
  std::sort(out.begin(), out.end(), [](const RankedRepo& a, const RankedRepo& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.meta.name < b.meta.name;
  });
  return out;
}

inline std::string ranked_csv(const std::vector<RankedRepo>& ranked) {
  std::ostringstream out;
  out << "rank,name,score,coverage,popularity,complexity\n";
  char buf[160];
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& r = ranked[i];
    std::string name = r.meta.name;
    if (name.find_first_of(",\"\r\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : name) {
        if (c == '"') quoted += '"';
        quoted += c;
      }
      name = quoted + "\"";
    }
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f,%.6f\n", r.score, r.components.coverage, r.components.popularity,
                  r.components.complexity);
    out << (i + 1) << ',' << name << buf;
  }
  return out.str();
}

}  // namespace typeqal
