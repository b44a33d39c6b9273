#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace vividet {

/// Rows are true classes, columns predicted classes. Index 0 is Violent, 1 NonViolent.
using ConfusionMatrix = std::array<std::array<std::uint64_t, 2>, 2>;

struct MetricTriple {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  bool operator==(const MetricTriple&) const = default;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
  // Set when the metric's denominator was zero and the value was defined as 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;

  bool operator==(const ClassMetrics&) const = default;
};

struct EvalReport {
  ConfusionMatrix confusion{};
  std::array<ClassMetrics, 2> per_class{};
  MetricTriple macro_avg;
  MetricTriple weighted_avg;
  double accuracy = 0.0;
  std::uint64_t total = 0;

  bool operator==(const EvalReport&) const = default;
};

/// precision = TP/(TP+FP), recall = TP/(TP+FN), F1 = 2PR/(P+R); zero denominators give 0.
/// Throws std::invalid_argument for an all-zero matrix.
EvalReport report_from_confusion(const ConfusionMatrix& confusion);

/// Fixed-width table: rows Violence, Non-Violence, Macro Average, Weighted Average; columns
/// Precision, Recall, F1 score, Video Support. Zero-convention cells carry a trailing '*'.
std::string format_report_table(const EvalReport& report);

}  // namespace vividet
