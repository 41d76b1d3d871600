#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "run_config.hpp"

namespace optomech::cli {

using Cell = std::variant<double, std::string>;

struct Column {
  std::string name;
  std::string unit;  // "1" for dimensionless, "-" for labels
};

struct Table {
  std::string name;  // file stem
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

struct PlotEntry {
  std::string title;
  std::string table;  // file stem
  std::string x;
  std::vector<std::string> y;
  std::string group_by;  // optional label column splitting the curves
  bool log_x = false;
  bool log_y = false;
};

/// Collects output files for one run and writes the plot manifest last.
class Artifacts {
 public:
  Artifacts(std::filesystem::path dir, Formats formats);

  /// Writes <name>.csv and/or <name>.json according to the formats.
  void table(const Table& t);
  void json(const std::string& file, const nlohmann::json& j);
  void plot(PlotEntry p) { plots_.push_back(std::move(p)); }
  std::filesystem::path path(const std::string& file) const { return dir_ / file; }
  void note_file(const std::string& file) { files_.push_back(file); }

  void write_manifest(const RunConfig& rc);

 private:
  std::filesystem::path dir_;
  Formats formats_;
  std::vector<PlotEntry> plots_;
  std::vector<std::string> files_;
};

/// Fixed-format number text shared by every CSV.
std::string format_number(double v);

}  // namespace optomech::cli
