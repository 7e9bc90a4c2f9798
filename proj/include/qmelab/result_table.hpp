#ifndef QMELAB_RESULT_TABLE_HPP
#define QMELAB_RESULT_TABLE_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace qmelab {

// Rectangular table with a '#'-prefixed provenance header. All cells are
// preformatted strings so that output is byte-reproducible.
struct ResultTable {
  std::vector<std::string> provenance;  // emitted as "# <line>"
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells);
  void write_csv(std::ostream& out) const;
  std::string to_csv() const;
};

std::string format_double(double value);
std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t value);

// provenance header shared by all subcommands
std::vector<std::string> provenance_header(const std::string& command,
                                           const std::string& canonical_json,
                                           std::uint64_t seed,
                                           const std::string& extra);

// validates that a CSV produced by write_csv still carries its provenance
// header; returns an empty string when valid, else a description
std::string validate_csv_provenance(std::istream& in);

}  // namespace qmelab

#endif
