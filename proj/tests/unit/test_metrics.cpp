#include <gtest/gtest.h>

#include "vividet/tensor/rng.hpp"
#include "vividet/train/metrics.hpp"

using namespace vividet;

TEST(Metrics, NinetyEightPercentExample) {
  const EvalReport r = report_from_confusion({{{98, 2}, {2, 92}}});
  const auto& v = r.per_class[0];
  EXPECT_DOUBLE_EQ(v.precision, 0.98);
  EXPECT_DOUBLE_EQ(v.recall, 0.98);
  EXPECT_DOUBLE_EQ(v.f1, 0.98);
  EXPECT_EQ(v.support, 100u);
  EXPECT_EQ(r.per_class[1].support, 94u);
  EXPECT_EQ(r.total, 194u);
  EXPECT_DOUBLE_EQ(r.accuracy, 190.0 / 194.0);

  const std::string table = format_report_table(r);
  const auto pos = [&](const char* s) { return table.find(s); };
  for (const char* col : {"Precision", "Recall", "F1 score", "Video Support"}) EXPECT_NE(pos(col), std::string::npos);
  EXPECT_LT(pos("Violence"), pos("Non-Violence"));
  EXPECT_LT(pos("Non-Violence"), pos("Macro Average"));
  EXPECT_LT(pos("Macro Average"), pos("Weighted Average"));
  EXPECT_EQ(table.find('*'), std::string::npos);
}

TEST(Metrics, AllCorrect) {
  const EvalReport r = report_from_confusion({{{5, 0}, {0, 9}}});
  for (const auto& c : r.per_class) {
    EXPECT_EQ(c.precision, 1.0);
    EXPECT_EQ(c.recall, 1.0);
    EXPECT_EQ(c.f1, 1.0);
  }
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.macro_avg, (MetricTriple{1.0, 1.0, 1.0}));
}

TEST(Metrics, DegenerateClassifierUsesZeroConvention) {
  // Never predicts class 1.
  const EvalReport r = report_from_confusion({{{6, 0}, {4, 0}}});
  const auto& nv = r.per_class[1];
  EXPECT_EQ(nv.precision, 0.0);
  EXPECT_EQ(nv.recall, 0.0);
  EXPECT_EQ(nv.f1, 0.0);
  EXPECT_TRUE(nv.precision_undefined);
  EXPECT_FALSE(nv.recall_undefined);
  EXPECT_TRUE(nv.f1_undefined);
  EXPECT_FALSE(r.per_class[0].precision_undefined);
  EXPECT_DOUBLE_EQ(r.per_class[0].precision, 0.6);
  EXPECT_DOUBLE_EQ(r.weighted_avg.recall, r.accuracy);
  EXPECT_NE(format_report_table(r).find('*'), std::string::npos);

  // A class with no samples at all.
  const EvalReport empty_class = report_from_confusion({{{3, 1}, {0, 0}}});
  EXPECT_TRUE(empty_class.per_class[1].recall_undefined);
  EXPECT_EQ(empty_class.per_class[1].support, 0u);

  EXPECT_THROW(report_from_confusion({}), std::invalid_argument);
}

TEST(Metrics, IdentitiesOnRandomMatrices) {
  Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    ConfusionMatrix m{};
    for (auto& row : m)
      for (auto& v : row) v = rng.below(50);
    if (m[0][0] + m[0][1] + m[1][0] + m[1][1] == 0) m[0][0] = 1;
    const EvalReport r = report_from_confusion(m);
    const std::uint64_t total = m[0][0] + m[0][1] + m[1][0] + m[1][1];
    EXPECT_EQ(r.total, total);
    EXPECT_EQ(r.per_class[0].support + r.per_class[1].support, total);
    EXPECT_EQ(r.weighted_avg.recall, r.accuracy);
    EXPECT_EQ(r.accuracy, static_cast<double>(m[0][0] + m[1][1]) / static_cast<double>(total));
    for (const auto& c : r.per_class) {
      const double expected = c.precision + c.recall > 0 ? 2 * c.precision * c.recall / (c.precision + c.recall) : 0.0;
      EXPECT_NEAR(c.f1, expected, 1e-12);
    }
    EXPECT_NEAR(r.macro_avg.f1, (r.per_class[0].f1 + r.per_class[1].f1) / 2, 1e-12);
  }
}
