#pragma once

// Attribute sets per type name and the Jaccard base similarity over them.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "typeqal/errors.hpp"
#include "typeqal/typeexpr.hpp"

namespace typeqal {

inline constexpr int kAttrDbVersion = 1;

/// How two qualified names are compared before attribute lookup.
enum class NameMatch {
  LastSegment,  ///< "pathlib.Path" == "Path"
  FullName,
};

class AttributeDatabase {
 public:
  using AttrSet = std::vector<std::string>;  // sorted, unique

  AttributeDatabase() = default;
  AttributeDatabase(std::set<std::string> baseline, std::map<std::string, AttrSet> types)
      : baseline_(std::move(baseline)) {
    for (auto& [name, attrs] : types) {
      AttrSet& slot = types_[detail::canonical_name(name)];
      AttrSet merged;
      std::set_union(slot.begin(), slot.end(), attrs.begin(), attrs.end(), std::back_inserter(merged));
      slot.clear();
      std::copy_if(merged.begin(), merged.end(), std::back_inserter(slot),
                   [this](const std::string& a) { return !baseline_.contains(a); });
    }
  }

  int version() const noexcept { return kAttrDbVersion; }
  const std::set<std::string>& object_baseline() const noexcept { return baseline_; }
  const std::map<std::string, AttrSet>& types() const noexcept { return types_; }

  /// Exact name first, then the last dotted segment.
  const AttrSet* find(std::string_view name) const {
    if (auto it = types_.find(std::string(name)); it != types_.end()) return &it->second;
    const auto tail = detail::last_segment(name);
    if (tail.size() != name.size()) {
      if (auto it = types_.find(std::string(tail)); it != types_.end()) return &it->second;
    }
    return nullptr;
  }

  bool contains(std::string_view name) const { return find(name) != nullptr; }

 private:
  std::set<std::string> baseline_;
  std::map<std::string, AttrSet> types_;
};

inline AttributeDatabase parse_attrdb(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("attribute database is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("attribute database must be a JSON object");
  for (const char* field : {"version", "object_baseline", "types"}) {
    if (!doc.contains(field)) throw SchemaError(std::string("attribute database missing field '") + field + "'");
  }
  if (!doc["version"].is_number_integer() || doc["version"].get<int>() != kAttrDbVersion) {
    throw SchemaError("unsupported attribute database version " + doc["version"].dump() + " (supported: " +
                      std::to_string(kAttrDbVersion) + ")");
  }
  auto read_names = [](const nlohmann::json& arr, const std::string& where) {
    if (!arr.is_array()) throw SchemaError(where + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& v : arr) {
      if (!v.is_string()) throw SchemaError(where + " contains a non-string attribute");
      out.push_back(v.get<std::string>());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  const auto baseline = read_names(doc["object_baseline"], "object_baseline");
  if (!doc["types"].is_object()) throw SchemaError("'types' must be an object");
  std::map<std::string, AttributeDatabase::AttrSet> types;
  for (const auto& [name, attrs] : doc["types"].items()) {
    if (name.empty()) throw SchemaError("empty type name");
    types[name] = read_names(attrs, "types." + name);
  }
  return AttributeDatabase({baseline.begin(), baseline.end()}, std::move(types));
}

inline AttributeDatabase load_attrdb(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read attribute database " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_attrdb(buf.str());
}

inline bool names_equal(std::string_view a, std::string_view b, NameMatch mode = NameMatch::LastSegment) {
  if (a == b) return true;
  return mode == NameMatch::LastSegment && detail::last_segment(a) == detail::last_segment(b);
}

/// Jaccard index of attribute sets. Equal names score 1, any name missing
/// from the database scores 0 against a different name.
inline double base_similarity(const AttributeDatabase& db, std::string_view a, std::string_view b,
                              NameMatch mode = NameMatch::LastSegment) {
  if (names_equal(a, b, mode)) return 1.0;
  const auto* lhs = db.find(a);
  const auto* rhs = db.find(b);
  if (!lhs || !rhs) return 0.0;
  std::size_t common = 0;
  auto i = lhs->begin();
  auto j = rhs->begin();
  while (i != lhs->end() && j != rhs->end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  const std::size_t total = lhs->size() + rhs->size() - common;
  return total == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(total);
}

}  // namespace typeqal
