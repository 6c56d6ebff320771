#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pfe {

// Minimal delimiter-separated reader: configurable single-char delimiter,
// double-quote quoting with "" escapes, LF or CRLF line ends. Fields may
// contain embedded newlines when quoted.
class CsvReader {
public:
  CsvReader(std::istream& in, char delimiter = ',');

  // Reads the next record into `fields`. Returns false at end of input.
  bool next(std::vector<std::string>& fields);

  // 1-based line number where the last record started.
  long line() const { return record_line_; }

private:
  std::istream& in_;
  char delim_;
  long current_line_ = 1;
  long record_line_ = 0;
};

// Quotes a field if it contains the delimiter, a quote, or a newline.
std::string csv_quote(std::string_view field, char delimiter);

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields,
                   char delimiter = ',');

}  // namespace pfe
