#include "mibguard/eval.hpp"

#include <cstdio>
#include <numeric>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "mibguard/error.hpp"

namespace mibguard {
namespace {

using ordered_json = nlohmann::ordered_json;

double ratio_or_zero(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t sum = 0;
  for (const auto& row : counts) {
    for (std::uint64_t c : row) sum += c;
  }
  return sum;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < kClassCount; ++i) sum += counts[i][i];
  return sum;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t row) const {
  std::uint64_t sum = 0;
  for (std::uint64_t c : counts[row]) sum += c;
  return sum;
}

ConfusionMatrix confusion(std::span<const ClassLabel> truth,
                          std::span<const ClassLabel> predicted) {
  if (truth.size() != predicted.size()) {
    throw DataError("confusion: truth and prediction lengths differ");
  }
  if (truth.empty()) throw DataError("confusion: no instances");
  ConfusionMatrix m;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++m.counts[label_index(truth[i])][label_index(predicted[i])];
  }
  return m;
}

std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& m) {
  const std::uint64_t total = m.total();
  if (total == 0) throw DataError("metrics need a non-empty confusion matrix");

  std::vector<ClassMetrics> out;
  out.reserve(kClassCount);
  for (std::size_t c = 0; c < kClassCount; ++c) {
    ClassMetrics cm;
    cm.label = static_cast<ClassLabel>(c);
    cm.tp = m.counts[c][c];
    std::uint64_t col = 0;
    for (std::size_t r = 0; r < kClassCount; ++r) col += m.counts[r][c];
    cm.fp = col - cm.tp;
    cm.support = m.row_sum(c);
    cm.fn = cm.support - cm.tp;
    cm.tn = total - cm.tp - cm.fp - cm.fn;
    cm.precision = ratio_or_zero(cm.tp, cm.tp + cm.fp);
    cm.recall = ratio_or_zero(cm.tp, cm.tp + cm.fn);
    cm.tp_rate = cm.recall;
    cm.fp_rate = ratio_or_zero(cm.fp, cm.fp + cm.tn);
    cm.f_measure = (cm.precision + cm.recall) > 0.0
                       ? 2.0 * cm.precision * cm.recall /
                             (cm.precision + cm.recall)
                       : 0.0;
    cm.accuracy = ratio_or_zero(cm.tp + cm.tn, total);
    out.push_back(cm);
  }
  return out;
}

WeightedMetrics weighted_average(std::span<const ClassMetrics> metrics) {
  if (metrics.empty()) throw DataError("weighted average of no metrics");
  std::uint64_t total = 0;
  for (const ClassMetrics& cm : metrics) total += cm.support;
  if (total == 0) throw DataError("weighted average needs non-zero support");

  WeightedMetrics w;
  for (const ClassMetrics& cm : metrics) {
    const double weight =
        static_cast<double>(cm.support) / static_cast<double>(total);
    w.tp_rate += weight * cm.tp_rate;
    w.fp_rate += weight * cm.fp_rate;
    w.precision += weight * cm.precision;
    w.recall += weight * cm.recall;
    // Weighted F averages the per-class F values; it is not the harmonic
    // mean of the averaged precision and recall.
    w.f_measure += weight * cm.f_measure;
  }
  return w;
}

EvalReport evaluate_cv(const Dataset& ds, const ClassifierSpec& spec, int k,
                       std::uint32_t seed) {
  const FoldAssignment folds = stratified_folds(ds, k, seed);

  ConfusionMatrix matrix;
  for (int fold = 0; fold < k; ++fold) {
    std::vector<Record> training;
    std::vector<std::size_t> held_out;
    for (std::size_t r = 0; r < ds.size(); ++r) {
      if (folds.fold_of[r] == fold) {
        held_out.push_back(r);
      } else {
        training.push_back(ds.records()[r]);
      }
    }
    if (held_out.empty()) continue;
    Dataset train_ds(ds.schema(), std::move(training));
    const auto model = train(train_ds, spec, seed);
    for (std::size_t r : held_out) {
      const ClassLabel predicted = model->predict(ds.records()[r].values);
      ++matrix.counts[label_index(ds.label(r))][label_index(predicted)];
    }
  }

  EvalReport report;
  report.classifier = to_string(spec);
  report.folds = k;
  report.seed = seed;
  report.matrix = matrix;
  report.per_class = per_class_metrics(matrix);
  report.weighted = weighted_average(report.per_class);
  report.accuracy = ratio_or_zero(matrix.trace(), matrix.total());
  return report;
}

std::string render_report_text(const EvalReport& report) {
  std::ostringstream out;
  char buf[160];

  out << "Classifier: " << report.classifier << "   Folds: " << report.folds
      << "   Seed: " << report.seed << "\n\n";

  out << "Confusion matrix (rows = actual, columns = predicted)\n";
  std::snprintf(buf, sizeof(buf), "%-12s", "");
  out << buf;
  for (std::size_t c = 0; c < kClassCount; ++c) {
    std::snprintf(buf, sizeof(buf), " %10s",
                  std::string(label_name(static_cast<ClassLabel>(c))).c_str());
    out << buf;
  }
  out << "\n";
  for (std::size_t r = 0; r < kClassCount; ++r) {
    std::snprintf(buf, sizeof(buf), "%-12s",
                  std::string(label_name(static_cast<ClassLabel>(r))).c_str());
    out << buf;
    for (std::size_t c = 0; c < kClassCount; ++c) {
      std::snprintf(buf, sizeof(buf), " %10llu",
                    static_cast<unsigned long long>(report.matrix.counts[r][c]));
      out << buf;
    }
    out << "\n";
  }

  out << "\n";
  std::snprintf(buf, sizeof(buf), "%-12s  %7s  %7s  %9s  %7s  %9s  %8s\n",
                "Class", "TP Rate", "FP Rate", "Precision", "Recall",
                "F-Measure", "Support");
  out << buf;
  for (const ClassMetrics& cm : report.per_class) {
    std::snprintf(buf, sizeof(buf),
                  "%-12s  %7.3f  %7.3f  %9.3f  %7.3f  %9.3f  %8llu\n",
                  std::string(label_name(cm.label)).c_str(), cm.tp_rate,
                  cm.fp_rate, cm.precision, cm.recall, cm.f_measure,
                  static_cast<unsigned long long>(cm.support));
    out << buf;
  }
  const std::uint64_t total = report.matrix.total();
  std::snprintf(buf, sizeof(buf),
                "%-12s  %7.3f  %7.3f  %9.3f  %7.3f  %9.3f  %8llu\n",
                "Weighted Avg", report.weighted.tp_rate, report.weighted.fp_rate,
                report.weighted.precision, report.weighted.recall,
                report.weighted.f_measure,
                static_cast<unsigned long long>(total));
  out << buf;

  std::snprintf(buf, sizeof(buf), "\nAccuracy: %.3f (%llu/%llu)\n",
                report.accuracy,
                static_cast<unsigned long long>(report.matrix.trace()),
                static_cast<unsigned long long>(total));
  out << buf;
  return out.str();
}

std::string report_to_json(const EvalReport& report) {
  ordered_json doc;
  doc["classifier"] = report.classifier;
  doc["folds"] = report.folds;
  doc["seed"] = report.seed;
  ordered_json matrix = ordered_json::array();
  for (const auto& row : report.matrix.counts) {
    matrix.push_back(std::vector<std::uint64_t>(row.begin(), row.end()));
  }
  doc["matrix"] = std::move(matrix);
  ordered_json classes = ordered_json::array();
  for (std::size_t c = 0; c < kClassCount; ++c) {
    classes.push_back(std::string(label_name(static_cast<ClassLabel>(c))));
  }
  doc["classes"] = std::move(classes);
  ordered_json per_class = ordered_json::array();
  for (const ClassMetrics& cm : report.per_class) {
    per_class.push_back({{"class", std::string(label_name(cm.label))},
                         {"tp", cm.tp},
                         {"fp", cm.fp},
                         {"tn", cm.tn},
                         {"fn", cm.fn},
                         {"tp_rate", cm.tp_rate},
                         {"fp_rate", cm.fp_rate},
                         {"precision", cm.precision},
                         {"recall", cm.recall},
                         {"f_measure", cm.f_measure},
                         {"accuracy", cm.accuracy},
                         {"support", cm.support}});
  }
  doc["per_class"] = std::move(per_class);
  doc["weighted"] = {{"tp_rate", report.weighted.tp_rate},
                     {"fp_rate", report.weighted.fp_rate},
                     {"precision", report.weighted.precision},
                     {"recall", report.weighted.recall},
                     {"f_measure", report.weighted.f_measure}};
  doc["accuracy"] = report.accuracy;
  return doc.dump(2) + "\n";
}

EvalReport report_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw DataError(std::string("report: invalid JSON: ") + e.what());
  }
  try {
    EvalReport report;
    report.classifier = doc.at("classifier").get<std::string>();
    report.folds = doc.at("folds").get<int>();
    report.seed = doc.at("seed").get<std::uint32_t>();
    const auto& matrix = doc.at("matrix");
    if (matrix.size() != kClassCount) {
      throw DataError("report: matrix must be 8x8");
    }
    for (std::size_t r = 0; r < kClassCount; ++r) {
      if (matrix[r].size() != kClassCount) {
        throw DataError("report: matrix must be 8x8");
      }
      for (std::size_t c = 0; c < kClassCount; ++c) {
        report.matrix.counts[r][c] = matrix[r][c].get<std::uint64_t>();
      }
    }
    for (const auto& entry : doc.at("per_class")) {
      ClassMetrics cm;
      const auto label = parse_label(entry.at("class").get<std::string>());
      if (!label) throw DataError("report: unknown class");
      cm.label = *label;
      cm.tp = entry.at("tp").get<std::uint64_t>();
      cm.fp = entry.at("fp").get<std::uint64_t>();
      cm.tn = entry.at("tn").get<std::uint64_t>();
      cm.fn = entry.at("fn").get<std::uint64_t>();
      cm.tp_rate = entry.at("tp_rate").get<double>();
      cm.fp_rate = entry.at("fp_rate").get<double>();
      cm.precision = entry.at("precision").get<double>();
      cm.recall = entry.at("recall").get<double>();
      cm.f_measure = entry.at("f_measure").get<double>();
      cm.accuracy = entry.at("accuracy").get<double>();
      cm.support = entry.at("support").get<std::uint64_t>();
      report.per_class.push_back(cm);
    }
    const auto& weighted = doc.at("weighted");
    report.weighted.tp_rate = weighted.at("tp_rate").get<double>();
    report.weighted.fp_rate = weighted.at("fp_rate").get<double>();
    report.weighted.precision = weighted.at("precision").get<double>();
    report.weighted.recall = weighted.at("recall").get<double>();
    report.weighted.f_measure = weighted.at("f_measure").get<double>();
    report.accuracy = doc.at("accuracy").get<double>();
    return report;
  } catch (const ordered_json::exception& e) {
    throw DataError(std::string("report: ") + e.what());
  }
}

}  // namespace mibguard
