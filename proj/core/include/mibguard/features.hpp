#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mibguard/dataset.hpp"

namespace mibguard {

struct AttributeScore {
  std::string name;
  double score = 0.0;

  bool operator==(const AttributeScore&) const = default;
};

// Scores ordered by the ranker: descending, ties broken by schema order.
struct AttributeRanking {
  std::string evaluator;
  std::vector<AttributeScore> scores;

  bool operator==(const AttributeRanking&) const = default;
};

// Information gain of the class given each attribute, base-2 entropy after
// equal-frequency discretization into min(10, #distinct) bins. Single-class
// input yields all-zero scores; fewer than 2 records is an error.
std::vector<AttributeScore> info_gain_scores(const Dataset& ds);

struct ReliefFParams {
  int k_neighbors = 10;
  std::size_t sample_count = 0;  // 0 = use every instance, in record order
  std::uint32_t seed = 0;        // only used when sampling a subset
};

// Multi-class ReliefF weights in [-1, 1]: per sampled instance, subtract mean
// nearest-hit diffs and add prior-weighted mean nearest-miss diffs per other
// class. Attribute diffs are range-normalized internally.
std::vector<AttributeScore> relieff_scores(const Dataset& ds,
                                           const ReliefFParams& params = {});

// Prior-weighted |Pearson r| against one-vs-rest class indicators. Constant
// vectors correlate 0 by convention.
std::vector<AttributeScore> correlation_scores(const Dataset& ds);

// Ranker search: descending by score, equal scores ordered by schema index.
AttributeRanking rank(std::string evaluator,
                      const std::vector<AttributeScore>& scores,
                      const AttributeSchema& schema);

// First n names of the ranking; n must be in [1, ranking size].
std::vector<std::string> top_n(const AttributeRanking& ranking, std::size_t n);

// {evaluator, scores: [{name, score}], ranked: [names]}
std::string ranking_to_json(const AttributeRanking& ranking);
std::string ranking_to_text(const AttributeRanking& ranking);

}  // namespace mibguard
