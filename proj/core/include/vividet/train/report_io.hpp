#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vividet/train/metrics.hpp"
#include "vividet/train/trainer.hpp"

namespace vividet {

/// CSV with header `epoch,train_loss,train_acc,val_loss,val_acc` and one row per epoch.
/// Values use 17 significant digits so a re-read is exact.
std::string history_csv(const std::vector<EpochRecord>& history);
void export_history(const std::vector<EpochRecord>& history, const std::filesystem::path& path);
/// Throws FormatError on a malformed file.
std::vector<EpochRecord> read_history(const std::filesystem::path& path);

std::string report_json(const EvalReport& report);
EvalReport parse_report_json(const std::string& text);

/// Writes the JSON form to `json_path` and, when non-empty, the table to `table_path`.
/// Throws std::runtime_error if a file cannot be written.
void export_report(const EvalReport& report, const std::filesystem::path& json_path,
                   const std::filesystem::path& table_path = {});
EvalReport read_report(const std::filesystem::path& json_path);

}  // namespace vividet
