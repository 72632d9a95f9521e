#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace poldqc::text {

/// 17 significant digits, enough for a bit-exact round trip of any double.
std::string format_double(double v);

/// Strict parse of a whole token; throws ParseError(line) on failure.
double parse_double(std::string_view token, std::size_t line);
long long parse_integer(std::string_view token, std::size_t line);

std::vector<std::string> split_whitespace(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);
std::string trim(std::string_view s);

/// Line reader that tracks 1-based line numbers.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}
  bool next(std::string& line);
  std::size_t line_number() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

/// Hex SHA-256 digest of a file's bytes.
std::string sha256_file(const std::string& path);

}  // namespace poldqc::text
