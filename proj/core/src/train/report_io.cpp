#include "vividet/train/report_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "vividet/tensor/tensor.hpp"

namespace vividet {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_double(const std::string& field, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size()) {
    throw FormatError("history line " + std::to_string(line) + ": bad number '" + field + "'");
  }
  return v;
}

using nlohmann::json;

json class_json(const ClassMetrics& m) {
  return json{{"precision", m.precision},
              {"recall", m.recall},
              {"f1", m.f1},
              {"support", m.support},
              {"precision_undefined", m.precision_undefined},
              {"recall_undefined", m.recall_undefined},
              {"f1_undefined", m.f1_undefined}};
}

json triple_json(const MetricTriple& t) { return json{{"precision", t.precision}, {"recall", t.recall}, {"f1", t.f1}}; }

}  // namespace

std::string history_csv(const std::vector<EpochRecord>& history) {
  std::string out = "epoch,train_loss,train_acc,val_loss,val_acc\n";
  char line[160];
  for (const EpochRecord& r : history) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g\n", r.epoch, r.train_loss, r.train_acc, r.val_loss,
                  r.val_acc);
    out += line;
  }
  return out;
}

void export_history(const std::vector<EpochRecord>& history, const std::filesystem::path& path) {
  write_text(path, history_csv(history));
}

std::vector<EpochRecord> read_history(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || line != "epoch,train_loss,train_acc,val_loss,val_acc") {
    throw FormatError("history '" + path.string() + "': missing or unexpected header");
  }
  std::vector<EpochRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string item;
    while (std::getline(ls, item, ',')) f.push_back(item);
    if (f.size() != 5) throw FormatError("history line " + std::to_string(lineno) + ": expected 5 fields");
    EpochRecord r;
    r.epoch = static_cast<std::size_t>(parse_double(f[0], lineno));
    r.train_loss = parse_double(f[1], lineno);
    r.train_acc = parse_double(f[2], lineno);
    r.val_loss = parse_double(f[3], lineno);
    r.val_acc = parse_double(f[4], lineno);
    out.push_back(r);
  }
  return out;
}

std::string report_json(const EvalReport& report) {
  json j;
  j["format"] = "vividet-report";
  j["confusion"] = {{report.confusion[0][0], report.confusion[0][1]}, {report.confusion[1][0], report.confusion[1][1]}};
  j["classes"] = {{"violence", class_json(report.per_class[0])}, {"non_violence", class_json(report.per_class[1])}};
  j["macro_avg"] = triple_json(report.macro_avg);
  j["weighted_avg"] = triple_json(report.weighted_avg);
  j["accuracy"] = report.accuracy;
  j["total"] = report.total;
  return j.dump(2) + "\n";
}

EvalReport parse_report_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != "vividet-report") throw FormatError("not a vividet report");
    EvalReport r;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t k = 0; k < 2; ++k) r.confusion[i][k] = j.at("confusion").at(i).at(k).get<std::uint64_t>();
    const char* keys[2] = {"violence", "non_violence"};
    for (std::size_t c = 0; c < 2; ++c) {
      const json& m = j.at("classes").at(keys[c]);
      ClassMetrics& cm = r.per_class[c];
      cm.precision = m.at("precision").get<double>();
      cm.recall = m.at("recall").get<double>();
      cm.f1 = m.at("f1").get<double>();
      cm.support = m.at("support").get<std::uint64_t>();
      cm.precision_undefined = m.at("precision_undefined").get<bool>();
      cm.recall_undefined = m.at("recall_undefined").get<bool>();
      cm.f1_undefined = m.at("f1_undefined").get<bool>();
    }
    const auto triple = [&](const char* key) {
      const json& t = j.at(key);
      return MetricTriple{t.at("precision").get<double>(), t.at("recall").get<double>(), t.at("f1").get<double>()};
    };
    r.macro_avg = triple("macro_avg");
    r.weighted_avg = triple("weighted_avg");
    r.accuracy = j.at("accuracy").get<double>();
    r.total = j.at("total").get<std::uint64_t>();
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  }
}

void export_report(const EvalReport& report, const std::filesystem::path& json_path,
                   const std::filesystem::path& table_path) {
  write_text(json_path, report_json(report));
  if (!table_path.empty()) write_text(table_path, format_report_table(report));
}

EvalReport read_report(const std::filesystem::path& json_path) { return parse_report_json(read_text(json_path)); }

}  // namespace vividet
