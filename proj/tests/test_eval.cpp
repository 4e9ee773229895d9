#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "mibguard/error.hpp"
#include "mibguard/eval.hpp"
#include "mibguard/rng.hpp"
#include "mibguard/synth.hpp"
#include "test_util.hpp"

using namespace mibguard;
using testutil::make_dataset;

TEST_SUITE_BEGIN("eval");

TEST_CASE("confusion matrix basics") {
  SUBCASE("perfect predictions sit on the diagonal") {
    const std::vector<ClassLabel> truth = {
        ClassLabel::Normal, ClassLabel::Normal, ClassLabel::IcmpEcho};
    const ConfusionMatrix m = confusion(truth, truth);
    CHECK(m.counts[0][0] == 2);
    CHECK(m.counts[1][1] == 1);
    CHECK(m.trace() == 3);
    CHECK(m.total() == 3);
  }
  SUBCASE("single misprediction is one off-diagonal count") {
    const std::vector<ClassLabel> truth = {ClassLabel::Normal};
    const std::vector<ClassLabel> pred = {ClassLabel::IcmpEcho};
    const ConfusionMatrix m = confusion(truth, pred);
    CHECK(m.counts[0][1] == 1);
    CHECK(m.trace() == 0);
  }
  SUBCASE("totals are conserved for random label lists") {
    Rng rng(3);
    std::vector<ClassLabel> truth, pred;
    for (int i = 0; i < 100; ++i) {
      truth.push_back(static_cast<ClassLabel>(rng.below(8)));
      pred.push_back(static_cast<ClassLabel>(rng.below(8)));
    }
    CHECK(confusion(truth, pred).total() == 100);
  }
  SUBCASE("length mismatch is an error") {
    const std::vector<ClassLabel> a = {ClassLabel::Normal};
    const std::vector<ClassLabel> b = {};
    CHECK_THROWS_AS(confusion(a, b), DataError);
  }
}

TEST_CASE("per-class metrics reproduce the precision 0.935 case") {
  // One-vs-rest for class 1: TP=935, FP=65.
  ConfusionMatrix m;
  m.counts[1][1] = 935;
  m.counts[0][1] = 65;
  m.counts[0][0] = 9000;
  const auto metrics = per_class_metrics(m);
  CHECK(metrics[1].tp == 935);
  CHECK(metrics[1].fp == 65);
  CHECK(metrics[1].precision == 0.935);
}

TEST_CASE("per-class metrics on a diagonal matrix are all perfect") {
  ConfusionMatrix m;
  for (std::size_t c = 0; c < kClassCount; ++c) m.counts[c][c] = 10 + c;
  const auto metrics = per_class_metrics(m);
  for (const ClassMetrics& cm : metrics) {
    CHECK(cm.precision == 1.0);
    CHECK(cm.recall == 1.0);
    CHECK(cm.f_measure == 1.0);
    CHECK(cm.fp_rate == 0.0);
    CHECK(cm.tp + cm.fp + cm.tn + cm.fn == m.total());
  }
}

TEST_CASE("per-class metrics match the worked example") {
  // TP=8, FN=2, FP=1, TN=89.
  ConfusionMatrix m;
  m.counts[0][0] = 8;
  m.counts[0][1] = 2;
  m.counts[1][0] = 1;
  m.counts[1][1] = 89;
  const auto metrics = per_class_metrics(m);
  CHECK(metrics[0].recall == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(metrics[0].tp_rate == metrics[0].recall);
  CHECK(metrics[0].precision == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
  CHECK(metrics[0].f_measure == doctest::Approx(0.8421052631578948).epsilon(1e-9));
  CHECK(metrics[0].accuracy == doctest::Approx(0.97).epsilon(1e-12));
}

TEST_CASE("zero-denominator conventions yield zero metrics") {
  ConfusionMatrix m;
  m.counts[0][0] = 5;  // class 3 never occurs and is never predicted
  const auto metrics = per_class_metrics(m);
  CHECK(metrics[3].precision == 0.0);
  CHECK(metrics[3].recall == 0.0);
  CHECK(metrics[3].f_measure == 0.0);
  CHECK(metrics[3].fp_rate == 0.0);
  CHECK(metrics[3].support == 0);
}

TEST_CASE("weighted average uses support weights") {
  std::vector<ClassMetrics> metrics(2);
  metrics[0].support = 1;
  metrics[0].f_measure = 1.0;
  metrics[1].support = 3;
  metrics[1].f_measure = 0.5;
  CHECK(weighted_average(metrics).f_measure == 0.625);
}

TEST_CASE("weighted average of identical metrics ignores supports") {
  std::vector<ClassMetrics> metrics(3);
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    metrics[i].support = (i + 1) * 7;
    metrics[i].tp_rate = 0.75;
    metrics[i].fp_rate = 0.125;
    metrics[i].precision = 0.5;
    metrics[i].recall = 0.75;
    metrics[i].f_measure = 0.625;
  }
  const WeightedMetrics w = weighted_average(metrics);
  CHECK(w.tp_rate == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(w.fp_rate == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(w.precision == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w.f_measure == doctest::Approx(0.625).epsilon(1e-12));
}

TEST_CASE("weighted average is permutation-equivariant") {
  // Power-of-two supports keep the weight arithmetic exact.
  std::vector<ClassMetrics> metrics(4);
  const double f[] = {1.0, 0.5, 0.25, 0.75};
  for (std::size_t i = 0; i < 4; ++i) {
    metrics[i].support = 4;
    metrics[i].f_measure = f[i];
    metrics[i].precision = f[i];
    metrics[i].recall = f[i];
    metrics[i].tp_rate = f[i];
  }
  const WeightedMetrics a = weighted_average(metrics);
  std::reverse(metrics.begin(), metrics.end());
  const WeightedMetrics b = weighted_average(metrics);
  CHECK(a == b);

  CHECK_THROWS_AS(weighted_average(std::vector<ClassMetrics>{}), DataError);
  std::vector<ClassMetrics> empty_support(2);
  CHECK_THROWS_AS(weighted_average(empty_support), DataError);
}

TEST_CASE("metrics match a brute-force recomputation from raw pairs") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(200);
    std::vector<ClassLabel> truth, pred;
    for (std::size_t i = 0; i < n; ++i) {
      truth.push_back(static_cast<ClassLabel>(rng.below(8)));
      pred.push_back(static_cast<ClassLabel>(rng.below(8)));
    }
    const ConfusionMatrix m = confusion(truth, pred);
    const auto metrics = per_class_metrics(m);

    CHECK(m.total() == n);
    std::uint64_t tp_sum = 0;
    for (const auto& cm : metrics) tp_sum += cm.tp;
    CHECK(tp_sum == m.trace());

    for (std::size_t c = 0; c < kClassCount; ++c) {
      std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const bool actual = label_index(truth[i]) == c;
        const bool predicted = label_index(pred[i]) == c;
        if (actual && predicted) ++tp;
        else if (!actual && predicted) ++fp;
        else if (actual && !predicted) ++fn;
        else ++tn;
      }
      CHECK(metrics[c].tp == tp);
      CHECK(metrics[c].fp == fp);
      CHECK(metrics[c].fn == fn);
      CHECK(metrics[c].tn == tn);
      const double precision = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
      const double recall = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
      CHECK(std::abs(metrics[c].precision - precision) < 1e-12);
      CHECK(std::abs(metrics[c].recall - recall) < 1e-12);
      const double f = precision + recall > 0.0
                           ? 2.0 * precision * recall / (precision + recall)
                           : 0.0;
      CHECK(std::abs(metrics[c].f_measure - f) < 1e-12);
      CHECK(std::abs(metrics[c].accuracy - double(tp + tn) / double(n)) < 1e-12);
    }
  }
}

TEST_CASE("cross-validation on a single-class dataset is trivially perfect") {
  std::vector<std::pair<std::vector<double>, ClassLabel>> rows;
  for (int i = 0; i < 12; ++i) {
    rows.push_back({{double(i)}, ClassLabel::HttpFlood});
  }
  const Dataset ds = make_dataset({"x"}, std::move(rows));
  const EvalReport report =
      evaluate_cv(ds, parse_classifier_spec("bayes"), 3, 1);
  CHECK(report.accuracy == 1.0);
  for (std::size_t r = 0; r < kClassCount; ++r) {
    for (std::size_t c = 0; c < kClassCount; ++c) {
      if (r != c) CHECK(report.matrix.counts[r][c] == 0);
    }
  }
}

TEST_CASE("cross-validation predicts every record exactly once") {
  const Dataset ds = synth_generate(testutil::small_separable_spec(5, 23));
  const EvalReport report =
      evaluate_cv(ds, parse_classifier_spec("j48:2"), 7, 3);
  CHECK(report.matrix.total() == ds.size());
  CHECK(report.folds == 7);
  CHECK(report.seed == 3);
  CHECK(report.classifier == "j48:2");
}

TEST_CASE("cross-validation is perfect on a separable synthetic dataset") {
  const Dataset ds = synth_generate(testutil::small_separable_spec(6, 30));
  for (const char* spec : {"bayes", "ibk:1", "j48:2", "rules:2",
                           "bagging:5:j48:2"}) {
    const EvalReport report =
        evaluate_cv(ds, parse_classifier_spec(spec), 10, 1);
    CHECK(report.accuracy == 1.0);
  }
}

TEST_CASE("two-fold IBK trace on four records") {
  // One record per class per fold; each held-out record's nearest training
  // neighbor is its same-class partner.
  const Dataset ds = make_dataset({"x"}, {{{0.0}, ClassLabel::Normal},
                                          {{1.0}, ClassLabel::Normal},
                                          {{10.0}, ClassLabel::IcmpEcho},
                                          {{11.0}, ClassLabel::IcmpEcho}});
  const EvalReport report = evaluate_cv(ds, parse_classifier_spec("ibk:1"), 2, 9);
  CHECK(report.accuracy == 1.0);
  CHECK(report.matrix.counts[0][0] == 2);
  CHECK(report.matrix.counts[1][1] == 2);
  CHECK(report.weighted.f_measure == 1.0);
}

TEST_CASE("cross-validation is deterministic") {
  const Dataset ds = synth_generate(testutil::small_separable_spec(8, 20));
  const EvalReport a = evaluate_cv(ds, parse_classifier_spec("bagging:3:j48:2"), 4, 17);
  const EvalReport b = evaluate_cv(ds, parse_classifier_spec("bagging:3:j48:2"), 4, 17);
  CHECK(a == b);
}

TEST_CASE("report json round-trips losslessly") {
  const Dataset ds = synth_generate(testutil::small_separable_spec(9, 15));
  const EvalReport report = evaluate_cv(ds, parse_classifier_spec("bayes"), 3, 5);
  const EvalReport loaded = report_from_json(report_to_json(report));
  CHECK(loaded == report);

  CHECK_THROWS_AS(report_from_json("nope"), DataError);
  CHECK_THROWS_AS(report_from_json("{}"), DataError);
}

TEST_CASE("text report shows the per-class table and weighted row") {
  ConfusionMatrix m;
  for (std::size_t c = 0; c < kClassCount; ++c) m.counts[c][c] = 5;
  EvalReport report;
  report.classifier = "bayes";
  report.folds = 10;
  report.seed = 1;
  report.matrix = m;
  report.per_class = per_class_metrics(m);
  report.weighted = weighted_average(report.per_class);
  report.accuracy = 1.0;

  const std::string text = render_report_text(report);
  CHECK(text.find("Classifier: bayes") != std::string::npos);
  CHECK(text.find("Weighted Avg") != std::string::npos);
  CHECK(text.find("F-Measure") != std::string::npos);
  CHECK(text.find("1.000") != std::string::npos);
  CHECK(text.find("BruteForce") != std::string::npos);
  CHECK(text.find("Accuracy: 1.000 (40/40)") != std::string::npos);
}

TEST_SUITE_END();
