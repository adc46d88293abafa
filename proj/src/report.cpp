#include "tcs/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "tcs/error.hpp"

namespace tcs {
namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string md_field(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') {
      out += "\\|";
    } else if (c == '\n' || c == '\r') {
      out += ' ';
    } else {
      out += c;
    }
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out << body;
  if (!out) throw Error(Errc::Io, "write failed: " + path.string());
}

}  // namespace

void EvalReport::add_row(std::string key, std::vector<Cell> cells) {
  if (cells.size() != columns.size())
    throw Error(Errc::InvalidArgument, "row '" + key + "' has " + std::to_string(cells.size()) +
                                           " cells, report has " + std::to_string(columns.size()) +
                                           " columns");
  for (const auto& r : rows)
    if (r.first == key) throw Error(Errc::InvalidArgument, "duplicate row key '" + key + "'");
  rows.emplace_back(std::move(key), std::move(cells));
}

std::size_t EvalReport::column_index(std::string_view column) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == column) return i;
  throw Error(Errc::InvalidArgument, "no column '" + std::string(column) + "'");
}

const Cell& EvalReport::at(std::string_view row_key, std::string_view column) const {
  const std::size_t c = column_index(column);
  for (const auto& r : rows)
    if (r.first == row_key) return r.second[c];
  throw Error(Errc::InvalidArgument, "no row '" + std::string(row_key) + "'");
}

std::string format_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<V, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<V, double>) {
          if (!std::isfinite(v)) return "ERR";
          char buf[64];
          std::snprintf(buf, sizeof buf, "%.2f", v);
          std::string s(buf);
          if (s == "-0.00") s = "0.00";
          return s;
        } else {
          return "ERR";
        }
      },
      cell);
}

std::string render_report(const EvalReport& report, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::Csv) {
    auto line = [&](const std::string& key, auto&& cells) {
      out += csv_field(key);
      for (const auto& c : cells) {
        out += ',';
        out += csv_field(c);
      }
      out += "\r\n";
    };
    line(report.key_column, report.columns);
    for (const auto& [key, cells] : report.rows) {
      std::vector<std::string> text;
      for (const auto& c : cells) text.push_back(format_cell(c));
      line(key, text);
    }
    return out;
  }

  auto line = [&](const std::string& key, auto&& cells) {
    out += "| " + md_field(key) + " |";
    for (const auto& c : cells) out += " " + md_field(c) + " |";
    out += '\n';
  };
  line(report.key_column, report.columns);
  out += "|---|";
  for (std::size_t i = 0; i < report.columns.size(); ++i) out += "---:|";
  out += '\n';
  for (const auto& [key, cells] : report.rows) {
    std::vector<std::string> text;
    for (const auto& c : cells) text.push_back(format_cell(c));
    line(key, text);
  }
  if (!report.metadata.empty()) {
    out += '\n';
    for (const auto& [k, v] : report.metadata) out += "- " + k + ": " + md_field(v) + '\n';
  }
  return out;
}

void write_report(const EvalReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::Io, "cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / (report.name + ".csv"), render_report(report, ReportFormat::Csv));
  write_file(dir / (report.name + ".md"), render_report(report, ReportFormat::Markdown));
}

}  // namespace tcs
