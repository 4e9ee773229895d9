#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mibguard/dataset.hpp"

namespace mibguard {

enum class ClassifierKind : std::uint8_t { Bayes, Ibk, Tree, Rules, Bagging };

std::string_view kind_name(ClassifierKind kind);

// Parsed form of the spec grammar:
//   bayes | ibk[:k] | j48[:min_leaf] | rules[:min_cov] | bagging[:iters[:base]]
// where base is itself a non-bagging spec.
struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::Bayes;
  int knn_k = 1;
  int min_leaf = 2;
  int min_coverage = 2;
  int iterations = 10;
  ClassifierKind base_kind = ClassifierKind::Tree;
  int base_param = 2;

  bool operator==(const ClassifierSpec&) const = default;
};

ClassifierSpec parse_classifier_spec(std::string_view text);
std::string to_string(const ClassifierSpec& spec);

// Probability vector over the 8 labels; non-negative, sums to 1.
using ClassDistribution = std::array<double, kClassCount>;

// A trained classifier. Immutable after training; safe to share across
// threads. predict() accepts exactly the schema it was trained on.
class Model {
 public:
  virtual ~Model() = default;

  ClassifierKind kind() const { return kind_; }
  const AttributeSchema& schema() const { return schema_; }
  // Classes present in the training data.
  const std::array<bool, kClassCount>& trained_classes() const {
    return trained_classes_;
  }

  ClassLabel predict(std::span<const double> values) const;
  ClassDistribution predict_distribution(std::span<const double> values) const;

 protected:
  Model(ClassifierKind kind, AttributeSchema schema,
        std::array<bool, kClassCount> trained_classes);

  virtual ClassDistribution distribution_impl(
      std::span<const double> values) const = 0;
  // Default: argmax of the distribution, ties broken by class index.
  virtual ClassLabel predict_impl(std::span<const double> values) const;

 private:
  void check_input(std::span<const double> values) const;

  ClassifierKind kind_;
  AttributeSchema schema_;
  std::array<bool, kClassCount> trained_classes_{};
};

// Gaussian Naive Bayes: per-class prior and per-attribute mean/variance,
// variance floored to keep point-mass classes finite.
class BayesModel final : public Model {
 public:
  BayesModel(AttributeSchema schema,
             std::array<double, kClassCount> priors,
             std::array<std::vector<double>, kClassCount> means,
             std::array<std::vector<double>, kClassCount> variances,
             double variance_floor);

  const std::array<double, kClassCount>& priors() const { return priors_; }
  const std::array<std::vector<double>, kClassCount>& means() const {
    return means_;
  }
  const std::array<std::vector<double>, kClassCount>& variances() const {
    return variances_;
  }
  double variance_floor() const { return variance_floor_; }

 protected:
  ClassDistribution distribution_impl(
      std::span<const double> values) const override;

 private:
  std::array<double, kClassCount> priors_{};
  std::array<std::vector<double>, kClassCount> means_;
  std::array<std::vector<double>, kClassCount> variances_;
  double variance_floor_ = 1e-9;
};

// Lazy IBK: stores min-max-normalized training records; k nearest by
// Euclidean distance, distance ties broken by record index, vote ties by the
// class of the nearest neighbor among the tied classes.
class IbkModel final : public Model {
 public:
  IbkModel(AttributeSchema schema, int k, NormalizationStats stats,
           std::vector<std::vector<double>> normalized_records,
           std::vector<ClassLabel> labels);

  int k() const { return k_; }
  const NormalizationStats& stats() const { return stats_; }
  const std::vector<std::vector<double>>& records() const { return records_; }
  const std::vector<ClassLabel>& labels() const { return labels_; }

 protected:
  ClassDistribution distribution_impl(
      std::span<const double> values) const override;
  ClassLabel predict_impl(std::span<const double> values) const override;

 private:
  // Indices of the k nearest training records, ordered by (distance, index).
  std::vector<std::size_t> neighbors(std::span<const double> values) const;

  int k_ = 1;
  NormalizationStats stats_;
  std::vector<std::vector<double>> records_;
  std::vector<ClassLabel> labels_;
};

// Binary threshold node; attribute < 0 marks a leaf.
struct TreeNode {
  int attribute = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::array<std::uint64_t, kClassCount> counts{};  // leaf class support

  bool is_leaf() const { return attribute < 0; }
  bool operator==(const TreeNode&) const = default;
};

class TreeModel final : public Model {
 public:
  TreeModel(AttributeSchema schema, std::vector<TreeNode> nodes);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t leaf_count() const;
  std::size_t depth() const;  // single leaf -> 0

 protected:
  ClassDistribution distribution_impl(
      std::span<const double> values) const override;

 private:
  const TreeNode& route(std::span<const double> values) const;

  std::vector<TreeNode> nodes_;  // nodes_[0] is the root
};

struct RuleCondition {
  int attribute = 0;
  bool is_upper = true;  // true: value <= threshold, false: value > threshold
  double threshold = 0.0;

  bool operator==(const RuleCondition&) const = default;
};

struct Rule {
  std::vector<RuleCondition> conditions;  // empty = matches everything
  ClassLabel label = ClassLabel::Normal;

  bool matches(std::span<const double> values) const;
  bool operator==(const Rule&) const = default;
};

// Ordered decision list with a catch-all default class.
class RulesModel final : public Model {
 public:
  RulesModel(AttributeSchema schema, std::vector<Rule> rules,
             ClassLabel default_label);

  const std::vector<Rule>& rules() const { return rules_; }
  ClassLabel default_label() const { return default_label_; }

 protected:
  ClassDistribution distribution_impl(
      std::span<const double> values) const override;

 private:
  std::vector<Rule> rules_;
  ClassLabel default_label_ = ClassLabel::Normal;
};

// Bootstrap-resampled ensemble, majority vote over member predictions.
class BaggingModel final : public Model {
 public:
  BaggingModel(AttributeSchema schema, std::vector<std::unique_ptr<Model>> members,
               ClassifierSpec base, int iterations, std::uint32_t seed);

  const std::vector<std::unique_ptr<Model>>& members() const { return members_; }
  const ClassifierSpec& base() const { return base_; }
  int iterations() const { return iterations_; }
  std::uint32_t seed() const { return seed_; }

 protected:
  ClassDistribution distribution_impl(
      std::span<const double> values) const override;

 private:
  std::vector<std::unique_ptr<Model>> members_;
  ClassifierSpec base_;
  int iterations_ = 0;
  std::uint32_t seed_ = 0;
};

std::unique_ptr<Model> train_naive_bayes(const Dataset& ds,
                                         double variance_floor = 1e-9);
std::unique_ptr<Model> train_knn(const Dataset& ds, int k);
std::unique_ptr<Model> train_tree(const Dataset& ds, int min_leaf);
std::unique_ptr<Model> train_rules(const Dataset& ds, int min_coverage);

struct BaggingOptions {
  int iterations = 10;
  ClassifierSpec base{.kind = ClassifierKind::Tree, .min_leaf = 2};
  std::uint32_t seed = 0;
  // Test hook: every bootstrap sample is the identity permutation.
  bool identity_bootstrap = false;
};

std::unique_ptr<Model> train_bagging(const Dataset& ds,
                                     const BaggingOptions& options);

// Dispatch on the spec; `seed` feeds bagging's bootstrap substreams.
std::unique_ptr<Model> train(const Dataset& ds, const ClassifierSpec& spec,
                             std::uint32_t seed);

}  // namespace mibguard
