#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace lmgd::cli {

enum class Format { csv, json };

/// A flat table. Doubles are printed with 17 significant digits in CSV and
/// as exact JSON numbers (NaN/inf become null).
class Table {
 public:
  using Cell = std::variant<double, long long, std::string>;

  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<Cell> row);
  std::size_t size() const { return rows_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }

  void write_csv(std::ostream& os) const;
  void write_json(std::ostream& os) const;

  /// Writes `<stem>.csv` or `<stem>.json` under dir and returns the file name.
  std::string save(const std::filesystem::path& dir, const std::string& stem, Format fmt) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

std::string format_double(double v);

/// Entry point shared by the executable and the tests.
/// Exit codes: 0 success, 1 domain or runtime failure, 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lmgd::cli
