#include "mibguard/classifiers.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>

#include "mibguard/error.hpp"
#include "mibguard/rng.hpp"

namespace mibguard {
namespace {

// Gains below this are treated as zero when deciding whether a split exists.
constexpr double kGainEpsilon = 1e-12;

constexpr double kTwoPi = 6.28318530717958647692;

std::array<bool, kClassCount> present_in(const Dataset& ds) {
  std::array<bool, kClassCount> present{};
  for (const Record& rec : ds.records()) present[label_index(rec.label)] = true;
  return present;
}

std::size_t argmax_class(const ClassDistribution& dist) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kClassCount; ++c) {
    if (dist[c] > dist[best]) best = c;
  }
  return best;
}

double entropy_of(std::span<const std::uint64_t> counts, std::uint64_t total) {
  if (total == 0) return 0.0;
  double h = 0.0;
  for (std::uint64_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

int parse_positive_int(std::string_view text, std::string_view what) {
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value < 1) {
    throw DataError("classifier spec: invalid " + std::string(what) + " '" +
                    std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split_colon(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t colon = text.find(':', start);
    if (colon == std::string_view::npos) {
      parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, colon - start));
    start = colon + 1;
  }
  return parts;
}

ClassLabel majority_of(const Dataset& ds, std::span<const std::size_t> indices) {
  std::array<std::uint64_t, kClassCount> counts{};
  for (std::size_t i : indices) ++counts[label_index(ds.label(i))];
  std::size_t best = 0;
  for (std::size_t c = 1; c < kClassCount; ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return static_cast<ClassLabel>(best);
}

}  // namespace

std::string_view kind_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::Bayes: return "bayes";
    case ClassifierKind::Ibk: return "ibk";
    case ClassifierKind::Tree: return "j48";
    case ClassifierKind::Rules: return "rules";
    case ClassifierKind::Bagging: return "bagging";
  }
  return "unknown";
}

ClassifierSpec parse_classifier_spec(std::string_view text) {
  const auto parts = split_colon(text);
  ClassifierSpec spec;
  const std::string_view head = parts[0];
  if (head == "bayes") {
    spec.kind = ClassifierKind::Bayes;
    if (parts.size() > 1) throw DataError("classifier spec: bayes takes no parameters");
  } else if (head == "ibk") {
    spec.kind = ClassifierKind::Ibk;
    if (parts.size() > 2) throw DataError("classifier spec: ibk takes at most one parameter");
    if (parts.size() == 2) spec.knn_k = parse_positive_int(parts[1], "k");
  } else if (head == "j48") {
    spec.kind = ClassifierKind::Tree;
    if (parts.size() > 2) throw DataError("classifier spec: j48 takes at most one parameter");
    if (parts.size() == 2) spec.min_leaf = parse_positive_int(parts[1], "min_leaf");
  } else if (head == "rules") {
    spec.kind = ClassifierKind::Rules;
    if (parts.size() > 2) throw DataError("classifier spec: rules takes at most one parameter");
    if (parts.size() == 2) spec.min_coverage = parse_positive_int(parts[1], "min_cov");
  } else if (head == "bagging") {
    spec.kind = ClassifierKind::Bagging;
    if (parts.size() >= 2) spec.iterations = parse_positive_int(parts[1], "iterations");
    if (parts.size() >= 3) {
      std::string base_text(text.substr(head.size() + 1 + parts[1].size() + 1));
      const ClassifierSpec base = parse_classifier_spec(base_text);
      if (base.kind == ClassifierKind::Bagging) {
        throw DataError("classifier spec: bagging cannot nest bagging");
      }
      spec.base_kind = base.kind;
      switch (base.kind) {
        case ClassifierKind::Ibk: spec.base_param = base.knn_k; break;
        case ClassifierKind::Tree: spec.base_param = base.min_leaf; break;
        case ClassifierKind::Rules: spec.base_param = base.min_coverage; break;
        default: spec.base_param = 0; break;
      }
    }
  } else {
    throw DataError("unknown classifier '" + std::string(head) + "'");
  }
  return spec;
}

std::string to_string(const ClassifierSpec& spec) {
  switch (spec.kind) {
    case ClassifierKind::Bayes: return "bayes";
    case ClassifierKind::Ibk: return "ibk:" + std::to_string(spec.knn_k);
    case ClassifierKind::Tree: return "j48:" + std::to_string(spec.min_leaf);
    case ClassifierKind::Rules: return "rules:" + std::to_string(spec.min_coverage);
    case ClassifierKind::Bagging: {
      std::string base;
      switch (spec.base_kind) {
        case ClassifierKind::Bayes: base = "bayes"; break;
        case ClassifierKind::Ibk: base = "ibk:" + std::to_string(spec.base_param); break;
        case ClassifierKind::Tree: base = "j48:" + std::to_string(spec.base_param); break;
        case ClassifierKind::Rules: base = "rules:" + std::to_string(spec.base_param); break;
        default: base = "j48:2"; break;
      }
      return "bagging:" + std::to_string(spec.iterations) + ":" + base;
    }
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Model base

Model::Model(ClassifierKind kind, AttributeSchema schema,
             std::array<bool, kClassCount> trained_classes)
    : kind_(kind),
      schema_(std::move(schema)),
      trained_classes_(trained_classes) {}

void Model::check_input(std::span<const double> values) const {
  if (values.size() != schema_.size()) {
    throw DataError("schema mismatch: model expects " +
                    std::to_string(schema_.size()) + " values, got " +
                    std::to_string(values.size()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw DataError("non-finite input value");
  }
}

ClassLabel Model::predict(std::span<const double> values) const {
  check_input(values);
  return predict_impl(values);
}

ClassDistribution Model::predict_distribution(
    std::span<const double> values) const {
  check_input(values);
  return distribution_impl(values);
}

ClassLabel Model::predict_impl(std::span<const double> values) const {
  return static_cast<ClassLabel>(argmax_class(distribution_impl(values)));
}

// ---------------------------------------------------------------------------
// Gaussian Naive Bayes

BayesModel::BayesModel(AttributeSchema schema,
                       std::array<double, kClassCount> priors,
                       std::array<std::vector<double>, kClassCount> means,
                       std::array<std::vector<double>, kClassCount> variances,
                       double variance_floor)
    : Model(ClassifierKind::Bayes, std::move(schema),
            [&priors] {
              std::array<bool, kClassCount> present{};
              for (std::size_t c = 0; c < kClassCount; ++c)
                present[c] = priors[c] > 0.0;
              return present;
            }()),
      priors_(priors),
      means_(std::move(means)),
      variances_(std::move(variances)),
      variance_floor_(variance_floor) {}

ClassDistribution BayesModel::distribution_impl(
    std::span<const double> values) const {
  std::array<double, kClassCount> log_post{};
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < kClassCount; ++c) {
    if (priors_[c] <= 0.0) {
      log_post[c] = -std::numeric_limits<double>::infinity();
      continue;
    }
    double lp = std::log(priors_[c]);
    for (std::size_t a = 0; a < values.size(); ++a) {
      const double var = variances_[c][a];
      const double dx = values[a] - means_[c][a];
      lp += -0.5 * std::log(kTwoPi * var) - dx * dx / (2.0 * var);
    }
    log_post[c] = lp;
    best = std::max(best, lp);
  }

  ClassDistribution dist{};
  double total = 0.0;
  for (std::size_t c = 0; c < kClassCount; ++c) {
    if (priors_[c] <= 0.0) continue;
    dist[c] = std::exp(log_post[c] - best);
    total += dist[c];
  }
  for (double& p : dist) p /= total;
  return dist;
}

std::unique_ptr<Model> train_naive_bayes(const Dataset& ds,
                                         double variance_floor) {
  const std::size_t n = ds.size();
  if (n == 0) throw DataError("cannot train on an empty dataset");

  std::array<std::uint64_t, kClassCount> counts{};
  std::array<std::vector<double>, kClassCount> means;
  std::array<std::vector<double>, kClassCount> variances;
  for (auto& m : means) m.assign(ds.width(), 0.0);
  for (auto& v : variances) v.assign(ds.width(), 0.0);

  for (const Record& rec : ds.records()) {
    const std::size_t c = label_index(rec.label);
    ++counts[c];
    for (std::size_t a = 0; a < ds.width(); ++a) means[c][a] += rec.values[a];
  }
  for (std::size_t c = 0; c < kClassCount; ++c) {
    if (counts[c] == 0) continue;
    for (double& m : means[c]) m /= static_cast<double>(counts[c]);
  }
  for (const Record& rec : ds.records()) {
    const std::size_t c = label_index(rec.label);
    for (std::size_t a = 0; a < ds.width(); ++a) {
      const double dx = rec.values[a] - means[c][a];
      variances[c][a] += dx * dx;
    }
  }

  std::array<double, kClassCount> priors{};
  for (std::size_t c = 0; c < kClassCount; ++c) {
    if (counts[c] == 0) continue;
    priors[c] = static_cast<double>(counts[c]) / static_cast<double>(n);
    for (double& v : variances[c]) {
      v = std::max(v / static_cast<double>(counts[c]), variance_floor);
    }
  }
  return std::make_unique<BayesModel>(ds.schema(), priors, std::move(means),
                                      std::move(variances), variance_floor);
}

// ---------------------------------------------------------------------------
// Lazy IBK

IbkModel::IbkModel(AttributeSchema schema, int k, NormalizationStats stats,
                   std::vector<std::vector<double>> normalized_records,
                   std::vector<ClassLabel> labels)
    : Model(ClassifierKind::Ibk, std::move(schema),
            [&labels] {
              std::array<bool, kClassCount> present{};
              for (ClassLabel l : labels) present[label_index(l)] = true;
              return present;
            }()),
      k_(k),
      stats_(std::move(stats)),
      records_(std::move(normalized_records)),
      labels_(std::move(labels)) {
  if (records_.empty()) throw DataError("ibk model holds no records");
  if (k_ < 1 || static_cast<std::size_t>(k_) > records_.size()) {
    throw DataError("ibk k out of range");
  }
}

std::vector<std::size_t> IbkModel::neighbors(
    std::span<const double> values) const {
  const std::vector<double> query = apply_normalization(stats_, values);
  std::vector<std::pair<double, std::size_t>> by_distance;
  by_distance.reserve(records_.size());
  for (std::size_t r = 0; r < records_.size(); ++r) {
    double d2 = 0.0;
    for (std::size_t a = 0; a < query.size(); ++a) {
      const double dx = query[a] - records_[r][a];
      d2 += dx * dx;
    }
    by_distance.emplace_back(d2, r);
  }
  const std::size_t take = static_cast<std::size_t>(k_);
  // (distance, index) order pins the documented tie-breaks.
  std::partial_sort(by_distance.begin(), by_distance.begin() + take,
                    by_distance.end());
  std::vector<std::size_t> out(take);
  for (std::size_t i = 0; i < take; ++i) out[i] = by_distance[i].second;
  return out;
}

ClassDistribution IbkModel::distribution_impl(
    std::span<const double> values) const {
  const auto near = neighbors(values);
  ClassDistribution dist{};
  for (std::size_t r : near) dist[label_index(labels_[r])] += 1.0;
  for (double& p : dist) p /= static_cast<double>(near.size());
  return dist;
}

ClassLabel IbkModel::predict_impl(std::span<const double> values) const {
  const auto near = neighbors(values);
  std::array<std::uint32_t, kClassCount> votes{};
  for (std::size_t r : near) ++votes[label_index(labels_[r])];
  const std::uint32_t top = *std::max_element(votes.begin(), votes.end());
  // Vote ties break to the class of the nearest neighbor among the tied
  // classes.
  for (std::size_t r : near) {
    if (votes[label_index(labels_[r])] == top) return labels_[r];
  }
  return labels_[near.front()];
}

std::unique_ptr<Model> train_knn(const Dataset& ds, int k) {
  const std::size_t n = ds.size();
  if (n == 0) throw DataError("cannot train on an empty dataset");
  if (k < 1) throw DataError("ibk needs k >= 1");
  if (static_cast<std::size_t>(k) > n) {
    throw DataError("ibk k exceeds record count");
  }
  NormalizationStats stats = fit_normalization(ds);
  std::vector<std::vector<double>> normalized;
  std::vector<ClassLabel> labels;
  normalized.reserve(n);
  labels.reserve(n);
  for (const Record& rec : ds.records()) {
    normalized.push_back(apply_normalization(stats, rec.values));
    labels.push_back(rec.label);
  }
  return std::make_unique<IbkModel>(ds.schema(), k, std::move(stats),
                                    std::move(normalized), std::move(labels));
}

// ---------------------------------------------------------------------------
// C4.5-style tree

TreeModel::TreeModel(AttributeSchema schema, std::vector<TreeNode> nodes)
    : Model(ClassifierKind::Tree, std::move(schema),
            [&nodes] {
              std::array<bool, kClassCount> present{};
              for (const TreeNode& node : nodes) {
                if (!node.is_leaf()) continue;
                for (std::size_t c = 0; c < kClassCount; ++c) {
                  if (node.counts[c] > 0) present[c] = true;
                }
              }
              return present;
            }()),
      nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw DataError("tree model holds no nodes");
}

const TreeNode& TreeModel::route(std::span<const double> values) const {
  std::size_t at = 0;
  while (!nodes_[at].is_leaf()) {
    const TreeNode& node = nodes_[at];
    at = values[node.attribute] <= node.threshold
             ? static_cast<std::size_t>(node.left)
             : static_cast<std::size_t>(node.right);
  }
  return nodes_[at];
}

ClassDistribution TreeModel::distribution_impl(
    std::span<const double> values) const {
  const TreeNode& leaf = route(values);
  std::uint64_t total = 0;
  for (std::uint64_t c : leaf.counts) total += c;
  ClassDistribution dist{};
  for (std::size_t c = 0; c < kClassCount; ++c) {
    dist[c] = static_cast<double>(leaf.counts[c]) / static_cast<double>(total);
  }
  return dist;
}

std::size_t TreeModel::leaf_count() const {
  std::size_t leaves = 0;
  for (const TreeNode& node : nodes_) leaves += node.is_leaf() ? 1 : 0;
  return leaves;
}

std::size_t TreeModel::depth() const {
  // Iterative depth over the index-linked nodes.
  std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
  std::size_t depth = 0;
  while (!stack.empty()) {
    const auto [at, level] = stack.back();
    stack.pop_back();
    const TreeNode& node = nodes_[static_cast<std::size_t>(at)];
    if (node.is_leaf()) {
      depth = std::max(depth, level);
    } else {
      stack.emplace_back(node.left, level + 1);
      stack.emplace_back(node.right, level + 1);
    }
  }
  return depth;
}

namespace {

struct SplitCandidate {
  int attribute = -1;
  double threshold = 0.0;
  double gain = 0.0;
  double split_info = 0.0;
};

struct TreeBuilder {
  const Dataset& ds;
  int min_leaf;
  std::vector<TreeNode> nodes;

  std::int32_t build(std::vector<std::size_t>& indices) {
    const std::int32_t self = static_cast<std::int32_t>(nodes.size());
    nodes.emplace_back();

    std::array<std::uint64_t, kClassCount> counts{};
    for (std::size_t i : indices) ++counts[label_index(ds.label(i))];
    const std::uint64_t total = indices.size();

    std::size_t classes_here = 0;
    for (std::uint64_t c : counts) classes_here += (c > 0) ? 1 : 0;

    const auto make_leaf = [&] {
      nodes[self].attribute = -1;
      nodes[self].counts = counts;
      return self;
    };
    if (classes_here <= 1 ||
        indices.size() < 2 * static_cast<std::size_t>(min_leaf)) {
      return make_leaf();
    }

    const double parent_entropy = entropy_of(counts, total);
    std::vector<SplitCandidate> candidates;
    std::vector<std::size_t> sorted(indices);
    for (std::size_t a = 0; a < ds.width(); ++a) {
      std::sort(sorted.begin(), sorted.end(), [&](std::size_t x, std::size_t y) {
        const double vx = ds.value(x, a);
        const double vy = ds.value(y, a);
        if (vx != vy) return vx < vy;
        return x < y;
      });
      std::array<std::uint64_t, kClassCount> left{};
      for (std::size_t i = 1; i < sorted.size(); ++i) {
        ++left[label_index(ds.label(sorted[i - 1]))];
        const double prev = ds.value(sorted[i - 1], a);
        const double next = ds.value(sorted[i], a);
        if (prev == next) continue;
        const std::uint64_t left_n = i;
        const std::uint64_t right_n = total - i;
        if (left_n < static_cast<std::uint64_t>(min_leaf) ||
            right_n < static_cast<std::uint64_t>(min_leaf)) {
          continue;
        }
        std::array<std::uint64_t, kClassCount> right{};
        for (std::size_t c = 0; c < kClassCount; ++c) right[c] = counts[c] - left[c];
        const double wl = static_cast<double>(left_n) / static_cast<double>(total);
        const double wr = static_cast<double>(right_n) / static_cast<double>(total);
        const double gain = parent_entropy - wl * entropy_of(left, left_n) -
                            wr * entropy_of(right, right_n);
        if (gain <= kGainEpsilon) continue;
        SplitCandidate cand;
        cand.attribute = static_cast<int>(a);
        cand.threshold = prev + (next - prev) / 2.0;
        cand.gain = gain;
        cand.split_info = -(wl * std::log2(wl) + wr * std::log2(wr));
        candidates.push_back(cand);
      }
    }
    if (candidates.empty()) return make_leaf();

    double mean_gain = 0.0;
    for (const auto& cand : candidates) mean_gain += cand.gain;
    mean_gain /= static_cast<double>(candidates.size());

    // C4.5 guard: only splits with at least average gain compete on gain
    // ratio. Candidates arrive in (schema index, threshold) order and the
    // strict comparison keeps the first best, which is the documented
    // tie-break.
    const SplitCandidate* best = nullptr;
    double best_ratio = -1.0;
    for (const auto& cand : candidates) {
      if (cand.gain + kGainEpsilon < mean_gain) continue;
      const double ratio = cand.gain / cand.split_info;
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best = &cand;
      }
    }
    if (best == nullptr) return make_leaf();

    std::vector<std::size_t> left_idx;
    std::vector<std::size_t> right_idx;
    for (std::size_t i : indices) {
      (ds.value(i, best->attribute) <= best->threshold ? left_idx : right_idx)
          .push_back(i);
    }
    nodes[self].attribute = best->attribute;
    nodes[self].threshold = best->threshold;
    const std::int32_t left_node = build(left_idx);
    const std::int32_t right_node = build(right_idx);
    nodes[self].left = left_node;
    nodes[self].right = right_node;
    return self;
  }
};

}  // namespace

std::unique_ptr<Model> train_tree(const Dataset& ds, int min_leaf) {
  if (ds.size() == 0) throw DataError("cannot train on an empty dataset");
  if (min_leaf < 1) throw DataError("j48 needs min_leaf >= 1");
  TreeBuilder builder{ds, min_leaf, {}};
  std::vector<std::size_t> indices(ds.size());
  std::iota(indices.begin(), indices.end(), 0);
  builder.build(indices);
  return std::make_unique<TreeModel>(ds.schema(), std::move(builder.nodes));
}

// ---------------------------------------------------------------------------
// Sequential-covering rules

bool Rule::matches(std::span<const double> values) const {
  for (const RuleCondition& cond : conditions) {
    const double v = values[cond.attribute];
    if (cond.is_upper ? (v > cond.threshold) : (v <= cond.threshold)) {
      return false;
    }
  }
  return true;
}

RulesModel::RulesModel(AttributeSchema schema, std::vector<Rule> rules,
                       ClassLabel default_label)
    : Model(ClassifierKind::Rules, std::move(schema),
            [&rules, default_label] {
              std::array<bool, kClassCount> present{};
              for (const Rule& r : rules) present[label_index(r.label)] = true;
              present[label_index(default_label)] = true;
              return present;
            }()),
      rules_(std::move(rules)),
      default_label_(default_label) {}

ClassDistribution RulesModel::distribution_impl(
    std::span<const double> values) const {
  ClassLabel fired = default_label_;
  for (const Rule& rule : rules_) {
    if (rule.matches(values)) {
      fired = rule.label;
      break;
    }
  }
  ClassDistribution dist{};
  dist[label_index(fired)] = 1.0;
  return dist;
}

namespace {

double laplace_accuracy(std::uint64_t correct, std::uint64_t covered) {
  return static_cast<double>(correct + 1) /
         static_cast<double>(covered + kClassCount);
}

struct GrownCondition {
  RuleCondition cond;
  double laplace = -1.0;
};

// Best single refinement (A <= t or A > t) of the current covered set for the
// target class, by Laplace accuracy. Enumeration order (schema index,
// ascending threshold, <= before >) plus strict improvement pins the
// tie-break.
std::optional<GrownCondition> best_refinement(const Dataset& ds,
                                              std::span<const std::size_t> covered,
                                              ClassLabel target) {
  std::optional<GrownCondition> best;
  std::vector<std::size_t> sorted(covered.begin(), covered.end());
  for (std::size_t a = 0; a < ds.width(); ++a) {
    std::sort(sorted.begin(), sorted.end(), [&](std::size_t x, std::size_t y) {
      const double vx = ds.value(x, a);
      const double vy = ds.value(y, a);
      if (vx != vy) return vx < vy;
      return x < y;
    });
    std::uint64_t target_total = 0;
    for (std::size_t i : sorted) target_total += (ds.label(i) == target) ? 1 : 0;

    std::uint64_t target_left = 0;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      target_left += (ds.label(sorted[i - 1]) == target) ? 1 : 0;
      const double prev = ds.value(sorted[i - 1], a);
      const double next = ds.value(sorted[i], a);
      if (prev == next) continue;
      const double threshold = prev + (next - prev) / 2.0;
      const std::uint64_t left_n = i;
      const std::uint64_t right_n = sorted.size() - i;

      const double lap_le = laplace_accuracy(target_left, left_n);
      if (!best || lap_le > best->laplace) {
        best = GrownCondition{{static_cast<int>(a), true, threshold}, lap_le};
      }
      const double lap_gt = laplace_accuracy(target_total - target_left, right_n);
      if (!best || lap_gt > best->laplace) {
        best = GrownCondition{{static_cast<int>(a), false, threshold}, lap_gt};
      }
    }
  }
  return best;
}

}  // namespace

std::unique_ptr<Model> train_rules(const Dataset& ds, int min_coverage) {
  const std::size_t n = ds.size();
  if (n == 0) throw DataError("cannot train on an empty dataset");
  if (min_coverage < 1) throw DataError("rules needs min_coverage >= 1");

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  const ClassLabel global_majority = majority_of(ds, all);

  std::vector<std::size_t> uncovered = all;
  std::vector<Rule> rules;
  ClassLabel default_label = global_majority;

  for (;;) {
    if (uncovered.empty()) {
      default_label = global_majority;
      break;
    }
    const ClassLabel target = majority_of(ds, uncovered);

    // Grow one rule greedily while a refinement strictly improves Laplace
    // accuracy.
    std::vector<std::size_t> covered = uncovered;
    std::vector<RuleCondition> conditions;
    std::uint64_t correct = 0;
    for (std::size_t i : covered) correct += (ds.label(i) == target) ? 1 : 0;
    double laplace = laplace_accuracy(correct, covered.size());
    for (;;) {
      const auto refinement = best_refinement(ds, covered, target);
      if (!refinement || refinement->laplace <= laplace) break;
      conditions.push_back(refinement->cond);
      std::vector<std::size_t> kept;
      kept.reserve(covered.size());
      const RuleCondition& c = refinement->cond;
      for (std::size_t i : covered) {
        const double v = ds.value(i, c.attribute);
        if (c.is_upper ? (v <= c.threshold) : (v > c.threshold)) kept.push_back(i);
      }
      covered = std::move(kept);
      laplace = refinement->laplace;
    }

    const ClassLabel fallback = majority_of(ds, uncovered);
    std::uint64_t fallback_correct = 0;
    for (std::size_t i : uncovered) {
      fallback_correct += (ds.label(i) == fallback) ? 1 : 0;
    }
    const double fallback_laplace =
        laplace_accuracy(fallback_correct, uncovered.size());

    if (covered.size() < static_cast<std::size_t>(min_coverage) ||
        laplace <= fallback_laplace) {
      default_label = fallback;
      break;
    }

    rules.push_back(Rule{conditions, target});
    std::vector<bool> removed(n, false);
    for (std::size_t i : covered) removed[i] = true;
    std::vector<std::size_t> remaining;
    remaining.reserve(uncovered.size() - covered.size());
    for (std::size_t i : uncovered) {
      if (!removed[i]) remaining.push_back(i);
    }
    uncovered = std::move(remaining);
  }

  return std::make_unique<RulesModel>(ds.schema(), std::move(rules),
                                      default_label);
}

// ---------------------------------------------------------------------------
// Bagging

BaggingModel::BaggingModel(AttributeSchema schema,
                           std::vector<std::unique_ptr<Model>> members,
                           ClassifierSpec base, int iterations,
                           std::uint32_t seed)
    : Model(ClassifierKind::Bagging, std::move(schema),
            [&members] {
              std::array<bool, kClassCount> present{};
              for (const auto& m : members) {
                for (std::size_t c = 0; c < kClassCount; ++c) {
                  if (m->trained_classes()[c]) present[c] = true;
                }
              }
              return present;
            }()),
      members_(std::move(members)),
      base_(base),
      iterations_(iterations),
      seed_(seed) {
  if (members_.empty()) throw DataError("bagging holds no members");
}

ClassDistribution BaggingModel::distribution_impl(
    std::span<const double> values) const {
  ClassDistribution dist{};
  for (const auto& member : members_) {
    dist[label_index(member->predict(values))] += 1.0;
  }
  for (double& p : dist) p /= static_cast<double>(members_.size());
  return dist;
}

std::unique_ptr<Model> train_bagging(const Dataset& ds,
                                     const BaggingOptions& options) {
  const std::size_t n = ds.size();
  if (n == 0) throw DataError("cannot train on an empty dataset");
  if (options.iterations < 1) throw DataError("bagging needs iterations >= 1");
  if (options.base.kind == ClassifierKind::Bagging) {
    throw DataError("bagging cannot nest bagging");
  }

  std::vector<std::unique_ptr<Model>> members;
  members.reserve(options.iterations);
  for (int i = 0; i < options.iterations; ++i) {
    const std::uint32_t member_seed = options.seed + static_cast<std::uint32_t>(i);
    std::vector<Record> sample;
    sample.reserve(n);
    if (options.identity_bootstrap) {
      sample = ds.records();
    } else {
      Rng rng(member_seed);
      for (std::size_t j = 0; j < n; ++j) {
        sample.push_back(
            ds.records()[rng.below(static_cast<std::uint32_t>(n))]);
      }
    }
    Dataset member_ds(ds.schema(), std::move(sample));
    members.push_back(train(member_ds, options.base, member_seed));
  }
  return std::make_unique<BaggingModel>(ds.schema(), std::move(members),
                                        options.base, options.iterations,
                                        options.seed);
}

std::unique_ptr<Model> train(const Dataset& ds, const ClassifierSpec& spec,
                             std::uint32_t seed) {
  switch (spec.kind) {
    case ClassifierKind::Bayes:
      return train_naive_bayes(ds);
    case ClassifierKind::Ibk:
      return train_knn(ds, spec.knn_k);
    case ClassifierKind::Tree:
      return train_tree(ds, spec.min_leaf);
    case ClassifierKind::Rules:
      return train_rules(ds, spec.min_coverage);
    case ClassifierKind::Bagging: {
      BaggingOptions options;
      options.iterations = spec.iterations;
      options.seed = seed;
      options.base.kind = spec.base_kind;
      switch (spec.base_kind) {
        case ClassifierKind::Ibk: options.base.knn_k = spec.base_param; break;
        case ClassifierKind::Tree: options.base.min_leaf = spec.base_param; break;
        case ClassifierKind::Rules:
          options.base.min_coverage = spec.base_param;
          break;
        default: break;
      }
      return train_bagging(ds, options);
    }
  }
  throw DataError("unknown classifier kind");
}

}  // namespace mibguard
