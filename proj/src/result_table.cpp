#include "qmelab/result_table.hpp"

#include <cstdio>
#include <istream>
#include <sstream>

#include "qmelab/errors.hpp"
#include "qmelab/version.hpp"

namespace qmelab {

void ResultTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns.size())
    throw Error("ResultTable: row width does not match column count");
  rows.push_back(std::move(cells));
}

void ResultTable::write_csv(std::ostream& out) const {
  for (const std::string& line : provenance) out << "# " << line << "\n";
  out << "# columns: ";
  for (size_t i = 0; i < columns.size(); ++i)
    out << columns[i] << (i + 1 < columns.size() ? "," : "");
  out << "\n";
  for (size_t i = 0; i < columns.size(); ++i)
    out << columns[i] << (i + 1 < columns.size() ? "," : "");
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? "," : "");
    out << "\n";
  }
}

std::string ResultTable::to_csv() const {
  std::ostringstream out;
  write_csv(out);
  return out.str();
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  char buffer[20];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(value));
  return buffer;
}

std::vector<std::string> provenance_header(const std::string& command,
                                           const std::string& canonical_json,
                                           std::uint64_t seed,
                                           const std::string& extra) {
  std::vector<std::string> header;
  header.push_back(std::string("qmelab ") + kVersion);
  header.push_back("command: " + command);
  header.push_back("config-hash: fnv1a64:" + hex64(fnv1a64(canonical_json)));
  header.push_back("seed: " + std::to_string(seed));
  if (!extra.empty()) header.push_back(extra);
  return header;
}

std::string validate_csv_provenance(std::istream& in) {
  bool saw_version = false, saw_hash = false, saw_columns = false;
  std::string columns_line;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      const std::string body = line.substr(2);
      if (body.rfind("qmelab ", 0) == 0) saw_version = true;
      if (body.rfind("config-hash: fnv1a64:", 0) == 0) {
        if (body.size() != std::string("config-hash: fnv1a64:").size() + 16)
          return "config-hash is malformed";
        saw_hash = true;
      }
      if (body.rfind("columns: ", 0) == 0) {
        saw_columns = true;
        columns_line = body.substr(std::string("columns: ").size());
      }
      continue;
    }
    // first non-comment line must repeat the declared column list
    if (!saw_version) return "missing provenance version line";
    if (!saw_hash) return "missing config-hash line";
    if (!saw_columns) return "missing columns line";
    if (line != columns_line)
      return "csv header does not match declared columns";
    return "";
  }
  return "no data rows found";
}

}  // namespace qmelab
