#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace roadnet::csv {

/// Reads RFC 4180 records (quoted fields, doubled quotes, CRLF tolerated).
class Reader {
public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Reads the next record into `fields`. Returns false at end of input.
  bool next(std::vector<std::string>& fields);

  /// 1-based physical line on which the last returned record started.
  std::size_t line() const { return record_line_; }

private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

/// Quotes a field only when it contains a comma, quote, or line break.
std::string escape(std::string_view field);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

/// Parses a full-field double; returns false on trailing garbage or empty text.
bool parse_double(std::string_view text, double& out);

std::string join(const std::vector<std::string>& fields);

} // namespace roadnet::csv
