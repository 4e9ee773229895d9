#include "mibguard/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "mibguard/error.hpp"
#include "mibguard/rng.hpp"

namespace mibguard {
namespace {

double entropy_bits(std::span<const std::size_t> counts, std::size_t total) {
  if (total == 0) return 0.0;
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

// Equal-frequency discretization into min(10, #distinct) bins. Depends only
// on the rank/tie structure of the values, so strictly monotone transforms
// leave the bins unchanged.
std::vector<int> equal_frequency_bins(const Dataset& ds, std::size_t attr) {
  const std::size_t n = ds.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ds.value(a, attr) < ds.value(b, attr);
  });

  // Distinct-value groups in sorted order.
  std::vector<std::pair<std::size_t, std::size_t>> groups;  // (start, size)
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && ds.value(order[j], attr) == ds.value(order[i], attr)) ++j;
    groups.emplace_back(i, j - i);
    i = j;
  }

  const std::size_t distinct = groups.size();
  const std::size_t bins = std::min<std::size_t>(10, distinct);
  std::vector<int> bin_of_group(distinct, 0);
  if (distinct <= bins) {
    for (std::size_t g = 0; g < distinct; ++g) bin_of_group[g] = static_cast<int>(g);
  } else {
    std::size_t remaining = n;
    std::size_t bins_left = bins;
    std::size_t acc = 0;
    int bin = 0;
    for (std::size_t g = 0; g < distinct; ++g) {
      bin_of_group[g] = bin;
      acc += groups[g].second;
      if (static_cast<std::size_t>(bin) + 1 < bins && acc * bins_left >= remaining) {
        remaining -= acc;
        acc = 0;
        --bins_left;
        ++bin;
      }
    }
  }

  std::vector<int> bin_of_record(n, 0);
  for (std::size_t g = 0; g < distinct; ++g) {
    for (std::size_t i = 0; i < groups[g].second; ++i) {
      bin_of_record[order[groups[g].first + i]] = bin_of_group[g];
    }
  }
  return bin_of_record;
}

std::array<std::size_t, kClassCount> class_counts(const Dataset& ds) {
  std::array<std::size_t, kClassCount> counts{};
  for (const Record& rec : ds.records()) ++counts[label_index(rec.label)];
  return counts;
}

std::size_t present_classes(const std::array<std::size_t, kClassCount>& counts) {
  std::size_t present = 0;
  for (std::size_t c : counts) present += (c > 0) ? 1 : 0;
  return present;
}

}  // namespace

std::vector<AttributeScore> info_gain_scores(const Dataset& ds) {
  const std::size_t n = ds.size();
  if (n < 2) throw DataError("info gain needs at least 2 records");
  const auto counts = class_counts(ds);
  const double class_entropy = entropy_bits(counts, n);

  std::vector<AttributeScore> scores;
  scores.reserve(ds.width());
  for (std::size_t a = 0; a < ds.width(); ++a) {
    AttributeScore s{ds.schema().name(a), 0.0};
    if (class_entropy > 0.0) {
      const std::vector<int> bins = equal_frequency_bins(ds, a);
      const int bin_count = *std::max_element(bins.begin(), bins.end()) + 1;
      std::vector<std::array<std::size_t, kClassCount>> table(bin_count);
      std::vector<std::size_t> bin_totals(bin_count, 0);
      for (std::size_t r = 0; r < n; ++r) {
        ++table[bins[r]][label_index(ds.label(r))];
        ++bin_totals[bins[r]];
      }
      double conditional = 0.0;
      for (int b = 0; b < bin_count; ++b) {
        const double weight =
            static_cast<double>(bin_totals[b]) / static_cast<double>(n);
        conditional += weight * entropy_bits(table[b], bin_totals[b]);
      }
      s.score = std::max(0.0, class_entropy - conditional);
    }
    scores.push_back(std::move(s));
  }
  return scores;
}

std::vector<AttributeScore> relieff_scores(const Dataset& ds,
                                           const ReliefFParams& params) {
  const std::size_t n = ds.size();
  const std::size_t d = ds.width();
  if (params.k_neighbors < 1) throw DataError("relieff needs k_neighbors >= 1");
  const auto counts = class_counts(ds);
  if (present_classes(counts) < 2) {
    throw DataError("relieff needs at least 2 classes");
  }

  std::vector<double> range(d, 0.0);
  const NormalizationStats stats = fit_normalization(ds);
  for (std::size_t a = 0; a < d; ++a) range[a] = stats.maxs[a] - stats.mins[a];

  const auto diff = [&](std::size_t a, std::size_t x, std::size_t y) {
    if (range[a] <= 0.0) return 0.0;
    return std::abs(ds.value(x, a) - ds.value(y, a)) / range[a];
  };

  std::array<std::vector<std::size_t>, kClassCount> by_class;
  for (std::size_t r = 0; r < n; ++r) by_class[label_index(ds.label(r))].push_back(r);

  // Sampled instance order: all records in order, or a seeded subset.
  std::vector<std::size_t> samples;
  if (params.sample_count == 0 || params.sample_count >= n) {
    samples.resize(n);
    std::iota(samples.begin(), samples.end(), 0);
  } else {
    samples.resize(n);
    std::iota(samples.begin(), samples.end(), 0);
    Rng rng(params.seed);
    rng.shuffle(samples);
    samples.resize(params.sample_count);
  }
  const double m = static_cast<double>(samples.size());

  const std::size_t k = static_cast<std::size_t>(params.k_neighbors);
  std::vector<double> weights(d, 0.0);
  std::vector<double> dist(n, 0.0);
  std::vector<std::pair<double, std::size_t>> candidates;
  std::vector<double> mean_diff(d, 0.0);

  for (std::size_t x : samples) {
    const std::size_t cx = label_index(ds.label(x));
    for (std::size_t y = 0; y < n; ++y) {
      double total = 0.0;
      for (std::size_t a = 0; a < d; ++a) total += diff(a, x, y);
      dist[y] = total;
    }
    for (std::size_t c = 0; c < kClassCount; ++c) {
      if (by_class[c].empty()) continue;
      candidates.clear();
      for (std::size_t y : by_class[c]) {
        if (y == x) continue;
        candidates.emplace_back(dist[y], y);
      }
      const std::size_t take = std::min(k, candidates.size());
      if (take == 0) continue;
      // Nearest first; distance ties break on record index.
      std::partial_sort(candidates.begin(), candidates.begin() + take,
                        candidates.end());
      std::fill(mean_diff.begin(), mean_diff.end(), 0.0);
      for (std::size_t i = 0; i < take; ++i) {
        for (std::size_t a = 0; a < d; ++a) {
          mean_diff[a] += diff(a, x, candidates[i].second);
        }
      }
      for (std::size_t a = 0; a < d; ++a) mean_diff[a] /= static_cast<double>(take);

      if (c == cx) {
        for (std::size_t a = 0; a < d; ++a) weights[a] -= mean_diff[a];
      } else {
        // prior(c) / (1 - prior(class(x))) reduces to count ratios.
        const double miss_weight = static_cast<double>(counts[c]) /
                                   static_cast<double>(n - counts[cx]);
        for (std::size_t a = 0; a < d; ++a) weights[a] += miss_weight * mean_diff[a];
      }
    }
  }

  std::vector<AttributeScore> scores;
  scores.reserve(d);
  for (std::size_t a = 0; a < d; ++a) {
    scores.push_back(
        {ds.schema().name(a), std::clamp(weights[a] / m, -1.0, 1.0)});
  }
  return scores;
}

std::vector<AttributeScore> correlation_scores(const Dataset& ds) {
  const std::size_t n = ds.size();
  if (n < 2) throw DataError("correlation needs at least 2 records");
  const auto counts = class_counts(ds);

  std::vector<AttributeScore> scores;
  scores.reserve(ds.width());
  for (std::size_t a = 0; a < ds.width(); ++a) {
    AttributeScore s{ds.schema().name(a), 0.0};
    double lo = ds.value(0, a);
    double hi = lo;
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double v = ds.value(r, a);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    if (hi > lo) {  // constant attributes correlate 0 by convention
      const double mean = sum / static_cast<double>(n);
      double var_x = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        const double dx = ds.value(r, a) - mean;
        var_x += dx * dx;
      }
      double total = 0.0;
      for (std::size_t c = 0; c < kClassCount; ++c) {
        if (counts[c] == 0 || counts[c] == n) continue;  // constant indicator
        const double prior =
            static_cast<double>(counts[c]) / static_cast<double>(n);
        double cov = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          const double ind = (label_index(ds.label(r)) == c) ? 1.0 : 0.0;
          cov += (ds.value(r, a) - mean) * (ind - prior);
        }
        const double var_i = static_cast<double>(counts[c]) *
                             (1.0 - prior);  // sum of squared indicator devs
        const double r_c = cov / std::sqrt(var_x * var_i);
        total += prior * std::min(1.0, std::abs(r_c));
      }
      s.score = total;
    }
    scores.push_back(std::move(s));
  }
  return scores;
}

AttributeRanking rank(std::string evaluator,
                      const std::vector<AttributeScore>& scores,
                      const AttributeSchema& schema) {
  std::set<std::string> seen;
  std::vector<std::pair<std::size_t, AttributeScore>> indexed;
  indexed.reserve(scores.size());
  for (const auto& s : scores) {
    if (!seen.insert(s.name).second) {
      throw DataError("duplicate attribute '" + s.name + "' in scores");
    }
    const auto idx = schema.index_of(s.name);
    if (!idx) throw DataError("attribute '" + s.name + "' not in schema");
    indexed.emplace_back(*idx, s);
  }
  std::sort(indexed.begin(), indexed.end(), [](const auto& a, const auto& b) {
    if (a.second.score != b.second.score) return a.second.score > b.second.score;
    return a.first < b.first;
  });

  AttributeRanking ranking;
  ranking.evaluator = std::move(evaluator);
  ranking.scores.reserve(indexed.size());
  for (auto& [idx, s] : indexed) ranking.scores.push_back(std::move(s));
  return ranking;
}

std::vector<std::string> top_n(const AttributeRanking& ranking, std::size_t n) {
  if (n < 1 || n > ranking.scores.size()) {
    throw DataError("top-n out of range: " + std::to_string(n) + " of " +
                    std::to_string(ranking.scores.size()));
  }
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) names.push_back(ranking.scores[i].name);
  return names;
}

std::string ranking_to_json(const AttributeRanking& ranking) {
  nlohmann::ordered_json doc;
  doc["evaluator"] = ranking.evaluator;
  doc["scores"] = nlohmann::ordered_json::array();
  for (const auto& s : ranking.scores) {
    doc["scores"].push_back({{"name", s.name}, {"score", s.score}});
  }
  doc["ranked"] = nlohmann::ordered_json::array();
  for (const auto& s : ranking.scores) doc["ranked"].push_back(s.name);
  return doc.dump(2) + "\n";
}

std::string ranking_to_text(const AttributeRanking& ranking) {
  std::size_t width = 9;  // "attribute"
  for (const auto& s : ranking.scores) width = std::max(width, s.name.size());

  std::ostringstream out;
  out << "evaluator: " << ranking.evaluator << "\n";
  out << "rank  attribute";
  for (std::size_t i = 9; i < width; ++i) out << ' ';
  out << "  score\n";
  char buf[64];
  for (std::size_t i = 0; i < ranking.scores.size(); ++i) {
    const auto& s = ranking.scores[i];
    std::snprintf(buf, sizeof(buf), "%-4zu  %-*s  %9.6f\n", i + 1,
                  static_cast<int>(width), s.name.c_str(), s.score);
    out << buf;
  }
  return out.str();
}

}  // namespace mibguard
