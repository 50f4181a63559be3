#pragma once

// TypeSim: recursive similarity between normalized type trees.
//
//   union on either side   -> optimal matching over member sets
//   otherwise              -> s(root, root'), averaged with the ordered
//                             argument comparison when both have arguments,
//                             halved when only one side has arguments.

#include <algorithm>
#include <span>
#include <vector>

#include "typeqal/assignment.hpp"
#include "typeqal/attrdb.hpp"
#include "typeqal/typeexpr.hpp"

namespace typeqal {

class TypeSimilarity {
 public:
  explicit TypeSimilarity(const AttributeDatabase& db, NameMatch mode = NameMatch::LastSegment)
      : db_(&db), mode_(mode) {}

  double operator()(const TypeNode& a, const TypeNode& b) const {
    if (a.is_union() || b.is_union()) return set_compare(as_set(a), as_set(b));
    double score = base_similarity(*db_, a.name, b.name, mode_);
    if (a.has_args() && b.has_args()) {
      score = 0.5 * (score + list_compare(a.args(), b.args()));
    } else if (a.has_args() || b.has_args()) {
      score = score / 2.0;
    }
    return score;
  }

  /// Positional comparison; the shorter list is padded with zero scores.
  double list_compare(std::span<const TypeNode> xs, std::span<const TypeNode> ys) const {
    const std::size_t longest = std::max(xs.size(), ys.size());
    if (longest == 0) return 1.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < std::min(xs.size(), ys.size()); ++i) sum += (*this)(xs[i], ys[i]);
    return sum / static_cast<double>(longest);
  }

  /// Best one-to-one pairing of members, normalized by the larger set.
  double set_compare(std::span<const TypeNode> as, std::span<const TypeNode> bs) const {
    const std::size_t largest = std::max(as.size(), bs.size());
    if (largest == 0) return 1.0;
    // Fixed orientation so that (A, B) and (B, A) run the identical computation.
    if (oriented_before(bs, as)) std::swap(as, bs);
    WeightMatrix weights(as.size(), bs.size());
    for (std::size_t i = 0; i < as.size(); ++i) {
      for (std::size_t j = 0; j < bs.size(); ++j) weights(i, j) = (*this)(as[i], bs[j]);
    }
    std::vector<double> picked;
    for (const auto& [i, j] : max_weight_matching(weights)) picked.push_back(weights(i, j));
    return sum_ascending(std::move(picked)) / static_cast<double>(largest);
  }

  /// Order-independent float sum: depends only on the multiset of values.
  static double sum_ascending(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum;
  }

  static std::span<const TypeNode> as_set(const TypeNode& t) {
    if (t.is_union()) return t.members();
    return {&t, 1};
  }

 private:
  static bool oriented_before(std::span<const TypeNode> x, std::span<const TypeNode> y) {
    if (x.size() != y.size()) return x.size() < y.size();
    std::vector<std::string> rx, ry;
    for (const auto& t : x) rx.push_back(render(t));
    for (const auto& t : y) ry.push_back(render(t));
    return rx < ry;
  }

  const AttributeDatabase* db_;
  NameMatch mode_;
};

inline double type_similarity(const AttributeDatabase& db, const TypeNode& a, const TypeNode& b,
                              NameMatch mode = NameMatch::LastSegment) {
  return TypeSimilarity(db, mode)(a, b);
}

inline double list_compare(const AttributeDatabase& db, std::span<const TypeNode> xs,
                           std::span<const TypeNode> ys, NameMatch mode = NameMatch::LastSegment) {
  return TypeSimilarity(db, mode).list_compare(xs, ys);
}

inline double set_compare(const AttributeDatabase& db, std::span<const TypeNode> as,
                          std::span<const TypeNode> bs, NameMatch mode = NameMatch::LastSegment) {
  return TypeSimilarity(db, mode).set_compare(as, bs);
}

inline bool exact_match(const TypeNode& a, const TypeNode& b) { return render(a) == render(b); }

}  // namespace typeqal
