#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mibguard/classifiers.hpp"
#include "mibguard/dataset.hpp"

namespace mibguard {

// Rows = actual class, columns = predicted class.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kClassCount>, kClassCount> counts{};

  std::uint64_t total() const;
  std::uint64_t trace() const;
  std::uint64_t row_sum(std::size_t row) const;

  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(std::span<const ClassLabel> truth,
                          std::span<const ClassLabel> predicted);

// One-vs-rest counts and rates for a single class.
struct ClassMetrics {
  ClassLabel label = ClassLabel::Normal;
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
  double tp_rate = 0.0;    // == recall
  double fp_rate = 0.0;    // FP / (FP + TN)
  double precision = 0.0;  // TP / (TP + FP), 0 when undefined
  double recall = 0.0;     // TP / (TP + FN), 0 when undefined
  double f_measure = 0.0;  // harmonic mean of precision and recall
  double accuracy = 0.0;   // (TP + TN) / total
  std::uint64_t support = 0;

  bool operator==(const ClassMetrics&) const = default;
};

std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& m);

// Support-weighted averages. The weighted F-measure is the weighted mean of
// the per-class F values, not the harmonic mean of the averaged precision
// and recall.
struct WeightedMetrics {
  double tp_rate = 0.0;
  double fp_rate = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;

  bool operator==(const WeightedMetrics&) const = default;
};

WeightedMetrics weighted_average(std::span<const ClassMetrics> metrics);

struct EvalReport {
  std::string classifier;
  int folds = 0;
  std::uint32_t seed = 0;
  ConfusionMatrix matrix;
  std::vector<ClassMetrics> per_class;
  WeightedMetrics weighted;
  double accuracy = 0.0;  // trace / total

  bool operator==(const EvalReport&) const = default;
};

// Stratified k-fold cross-validation: trains on k-1 folds, predicts the
// held-out fold, pools the fold confusions, then computes metrics from the
// aggregate matrix.
EvalReport evaluate_cv(const Dataset& ds, const ClassifierSpec& spec, int k,
                       std::uint32_t seed);

// Fixed-width table, 3 decimal places.
std::string render_report_text(const EvalReport& report);

// Loss-free: report_from_json(report_to_json(r)) == r.
std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);

}  // namespace mibguard
