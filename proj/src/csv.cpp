#include "perceptfe/csv.hpp"

#include <istream>
#include <ostream>

namespace pfe {

CsvReader::CsvReader(std::istream& in, char delimiter) : in_(in), delim_(delimiter) {}

bool CsvReader::next(std::vector<std::string>& fields) {
  fields.clear();
  int c = in_.get();
  if (c == std::istream::traits_type::eof()) return false;
  record_line_ = current_line_;

  std::string field;
  bool quoted = false;
  bool any = false;
  while (true) {
    if (c == std::istream::traits_type::eof()) {
      fields.push_back(std::move(field));
      return true;
    }
    char ch = static_cast<char>(c);
    any = true;
    if (quoted) {
      if (ch == '"') {
        int peek = in_.peek();
        if (peek == '"') {
          field.push_back('"');
          in_.get();
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++current_line_;
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty()) {
      quoted = true;
    } else if (ch == delim_) {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      ++current_line_;
      if (!field.empty() && field.back() == '\r') field.pop_back();
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(ch);
    }
    c = in_.get();
  }
  (void)any;
}

std::string csv_quote(std::string_view field, char delimiter) {
  bool needs = false;
  for (char c : field) {
    if (c == delimiter || c == '"' || c == '\n' || c == '\r') {
      needs = true;
      break;
    }
  }
  if (!needs) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields,
                   char delimiter) {
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out.put(delimiter);
    out << csv_quote(fields[i], delimiter);
  }
  out.put('\n');
}

}  // namespace pfe
