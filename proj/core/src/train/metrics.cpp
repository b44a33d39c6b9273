#include "vividet/train/metrics.hpp"

#include <cstdio>
#include <stdexcept>

namespace vividet {

EvalReport report_from_confusion(const ConfusionMatrix& confusion) {
  EvalReport r;
  r.confusion = confusion;
  std::uint64_t correct = 0;
  for (std::size_t i = 0; i < 2; ++i) {
    correct += confusion[i][i];
    for (std::size_t j = 0; j < 2; ++j) r.total += confusion[i][j];
  }
  if (r.total == 0) throw std::invalid_argument("evaluation report: no samples");

  for (std::size_t c = 0; c < 2; ++c) {
    const std::uint64_t tp = confusion[c][c];
    const std::uint64_t fn = confusion[c][1 - c];
    const std::uint64_t fp = confusion[1 - c][c];
    ClassMetrics& m = r.per_class[c];
    m.support = tp + fn;
    if (tp + fp == 0) {
      m.precision_undefined = true;
    } else {
      m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    if (tp + fn == 0) {
      m.recall_undefined = true;
    } else {
      m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    }
    if (m.precision + m.recall == 0.0) {
      m.f1_undefined = true;
    } else {
      m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
  }

  const double total = static_cast<double>(r.total);
  r.accuracy = static_cast<double>(correct) / total;
  for (const ClassMetrics& m : r.per_class) {
    const double w = static_cast<double>(m.support) / total;
    r.macro_avg.precision += m.precision / 2.0;
    r.macro_avg.recall += m.recall / 2.0;
    r.macro_avg.f1 += m.f1 / 2.0;
    r.weighted_avg.precision += w * m.precision;
    r.weighted_avg.f1 += w * m.f1;
  }
  // sum_c (support_c / total) * (TP_c / support_c) reduces to the accuracy; computing it that
  // way keeps the identity exact instead of within rounding.
  r.weighted_avg.recall = r.accuracy;
  return r;
}

namespace {

std::string cell(double v, bool undefined) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f%s", v, undefined ? "*" : " ");
  return buf;
}

}  // namespace

std::string format_report_table(const EvalReport& report) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-18s %10s %10s %10s %14s\n", "", "Precision", "Recall", "F1 score",
                "Video Support");
  out += line;
  const char* names[2] = {"Violence", "Non-Violence"};
  bool any_undefined = false;
  for (std::size_t c = 0; c < 2; ++c) {
    const ClassMetrics& m = report.per_class[c];
    any_undefined = any_undefined || m.precision_undefined || m.recall_undefined || m.f1_undefined;
    std::snprintf(line, sizeof line, "%-18s %10s %10s %10s %14llu\n", names[c],
                  cell(m.precision, m.precision_undefined).c_str(), cell(m.recall, m.recall_undefined).c_str(),
                  cell(m.f1, m.f1_undefined).c_str(), static_cast<unsigned long long>(m.support));
    out += line;
  }
  const auto avg_row = [&](const char* name, const MetricTriple& t) {
    std::snprintf(line, sizeof line, "%-18s %10s %10s %10s %14llu\n", name, cell(t.precision, false).c_str(),
                  cell(t.recall, false).c_str(), cell(t.f1, false).c_str(),
                  static_cast<unsigned long long>(report.total));
    out += line;
  };
  avg_row("Macro Average", report.macro_avg);
  avg_row("Weighted Average", report.weighted_avg);
  std::snprintf(line, sizeof line, "\nAccuracy: %.4f (%llu samples)\n", report.accuracy,
                static_cast<unsigned long long>(report.total));
  out += line;
  std::snprintf(line, sizeof line, "Confusion (rows true, cols predicted): [[%llu, %llu], [%llu, %llu]]\n",
                static_cast<unsigned long long>(report.confusion[0][0]),
                static_cast<unsigned long long>(report.confusion[0][1]),
                static_cast<unsigned long long>(report.confusion[1][0]),
                static_cast<unsigned long long>(report.confusion[1][1]));
  out += line;
  if (any_undefined) out += "* zero denominator; value defined as 0\n";
  return out;
}

}  // namespace vividet
