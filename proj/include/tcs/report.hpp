#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace tcs {

/// A cell whose computation failed; renders as "ERR".
struct CellError {
  std::string message;
};

/// Reals render with two decimals; NaN renders as "ERR".
using Cell = std::variant<std::string, std::int64_t, double, CellError>;

struct EvalReport {
  std::string name;
  std::string key_column = "Inquiry";
  std::vector<std::string> columns;
  std::vector<std::pair<std::string, std::vector<Cell>>> rows;
  std::map<std::string, std::string> metadata;

  /// Throws InvalidArgument on a width mismatch or a repeated key.
  void add_row(std::string key, std::vector<Cell> cells);

  const Cell& at(std::string_view row_key, std::string_view column) const;
  std::size_t column_index(std::string_view column) const;
};

enum class ReportFormat { Csv, Markdown };

std::string format_cell(const Cell& cell);

/// CSV follows RFC 4180 (CRLF, quoting as needed). Markdown is a pipe table
/// followed by the metadata as a bullet list.
std::string render_report(const EvalReport& report, ReportFormat format);

/// Writes <dir>/<name>.csv and <dir>/<name>.md, creating dir if needed.
void write_report(const EvalReport& report, const std::filesystem::path& dir);

}  // namespace tcs
