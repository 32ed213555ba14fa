#pragma once

/**
 * RFC-4180 CSV reading/writing (UTF-8, no BOM) with canonical number
 * formatting: doubles are serialized via std::to_chars shortest
 * round-trip form, so write -> read -> write reproduces identical bytes.
 */

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wmlab {

/// Quotes a field when it contains a comma, quote, CR, or LF.
std::string csv_escape(std::string_view field);

void write_csv_row(std::ostream& out, std::span<const std::string> fields);

struct CsvParseError {
  std::size_t row = 0;  // 1-based, counting the header
  std::string message;
};

/// Parses a whole CSV document (quoted fields may span lines).
/// Throws std::runtime_error with the row number on malformed input.
std::vector<std::vector<std::string>> read_csv(std::istream& in);

/// Canonical number formatting used across the toolkit.
std::string format_double(double value);
std::string format_bool(bool value);
std::string format_optional_double(const std::optional<double>& value);
std::string format_optional_bool(const std::optional<bool>& value);

double parse_double(std::string_view text);        // throws on garbage
bool parse_bool(std::string_view text);            // "true" / "false"
std::optional<double> parse_optional_double(std::string_view text);
std::optional<bool> parse_optional_bool(std::string_view text);

}  // namespace wmlab
