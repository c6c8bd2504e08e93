#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "lmgd/cli.hpp"

namespace lmgd::cli {
namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) throw std::logic_error("table row width mismatch");
  rows_.push_back(std::move(row));
}

void Table::write_csv(std::ostream& os) const {
  for (std::size_t c = 0; c < columns_.size(); ++c) os << (c ? "," : "") << columns_[c];
  os << '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      std::visit(
          [&os](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) os << format_double(v);
            else if constexpr (std::is_same_v<T, long long>) os << v;
            else os << csv_escape(v);
          },
          row[c]);
    }
    os << '\n';
  }
}

void Table::write_json(std::ostream& os) const {
  auto doc = nlohmann::ordered_json::array();
  for (const auto& row : rows_) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              if (std::isfinite(v)) obj[columns_[c]] = v;
              else obj[columns_[c]] = nullptr;
            } else {
              obj[columns_[c]] = v;
            }
          },
          row[c]);
    }
    doc.push_back(std::move(obj));
  }
  os << doc.dump(1) << '\n';
}

std::string Table::save(const std::filesystem::path& dir, const std::string& stem, Format fmt) const {
  const std::string name = stem + (fmt == Format::csv ? ".csv" : ".json");
  std::ofstream os(dir / name, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
  if (fmt == Format::csv) write_csv(os);
  else write_json(os);
  return name;
}

}  // namespace lmgd::cli
