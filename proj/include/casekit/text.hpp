#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace casekit::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

// Lowercase alphanumeric tokenization: any run of [a-z0-9] after lowering.
// Everything else separates tokens.
std::vector<std::string> tokenize(std::string_view s);
std::vector<std::string> tokenize(std::string_view s,
                                  const std::unordered_set<std::string>& stopwords);

// A numeric literal as it appears inside a program string. `value` carries the
// number before any percent scaling; `normalized` is the surface form with
// currency signs and thousands separators stripped (percent sign retained).
struct ParsedLiteral {
  double value = 0.0;
  bool percent = false;
  std::string normalized;
};

// Accepts forms like "10", "-3.5", "$5,000", "5%", "1.2e-3". Returns nullopt
// when the token is not a plain numeric literal.
std::optional<ParsedLiteral> parse_numeric_literal(std::string_view token);

// Parses a table cell using financial-table conventions: "$" and "," and
// inner spaces stripped, trailing "%" divides by 100, "(5)" reads as -5.
std::optional<double> parse_cell_number(std::string_view cell);

// Shortest round-trip decimal rendering (std::to_chars).
std::string canonical_number(double v);

std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

}  // namespace casekit::text
