#include "artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "optomech/errors.hpp"

namespace optomech::cli {

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::IoError, "cannot write " + p.string());
  f << text;
  if (!f) throw Error(Errc::IoError, "write failed for " + p.string());
}

nlohmann::json cell_json(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  const double v = std::get<double>(c);
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw Error(Errc::InvalidParameter, "row width mismatch in " + name);
  rows.push_back(std::move(row));
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Artifacts::Artifacts(std::filesystem::path dir, Formats formats) : dir_(std::move(dir)), formats_(formats) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + dir_.string() + ": " + ec.message());
}

void Artifacts::table(const Table& t) {
  if (formats_.csv) {
    std::string out = "# units:";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
      out += (i ? ", " : " ") + t.columns[i].name + " [" + t.columns[i].unit + "]";
    out += "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i].name;
    out += "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        if (const auto* s = std::get_if<std::string>(&row[i])) out += *s;
        else out += format_number(std::get<double>(row[i]));
      }
      out += "\n";
    }
    write_file(dir_ / (t.name + ".csv"), out);
    files_.push_back(t.name + ".csv");
  }
  if (formats_.json) {
    nlohmann::json j;
    j["units"] = nlohmann::json::object();
    j["columns"] = nlohmann::json::object();
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      j["units"][t.columns[c].name] = t.columns[c].unit;
      auto col = nlohmann::json::array();
      for (const auto& row : t.rows) col.push_back(cell_json(row[c]));
      j["columns"][t.columns[c].name] = std::move(col);
    }
    json(t.name + ".table.json", j);
  }
}

void Artifacts::json(const std::string& file, const nlohmann::json& j) {
  write_file(dir_ / file, j.dump(2) + "\n");
  files_.push_back(file);
}

void Artifacts::write_manifest(const RunConfig& rc) {
  nlohmann::json m;
  m["task"] = task_name(rc.task);
  m["seed"] = rc.seed;
  m["files"] = files_;
  auto plots = nlohmann::json::array();
  for (const auto& p : plots_) {
    nlohmann::json e;
    e["title"] = p.title;
    e["file"] = formats_.csv ? p.table + ".csv" : p.table + ".table.json";
    e["x"] = p.x;
    e["y"] = p.y;
    if (!p.group_by.empty()) e["group_by"] = p.group_by;
    e["log_x"] = p.log_x;
    e["log_y"] = p.log_y;
    plots.push_back(std::move(e));
  }
  m["plots"] = std::move(plots);
  write_file(dir_ / "plot_manifest.json", m.dump(2) + "\n");
}

}  // namespace optomech::cli
