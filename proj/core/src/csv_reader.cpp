#include "csv_reader.hpp"

#include <string>

#include "gamecat/error.hpp"

namespace gamecat::detail {

bool CsvReader::next(CsvRecord& record) {
  record.fields.clear();
  record.line = line_;
  if (in_.peek() == std::char_traits<char>::eof()) return false;

  std::string field;
  bool quoted = false;
  bool field_was_quoted = false;
  for (;;) {
    const int ch = in_.get();
    if (ch == std::char_traits<char>::eof()) {
      if (quoted) {
        throw DataError("line " + std::to_string(record.line) +
                        ": unterminated quoted field");
      }
      record.fields.push_back(std::move(field));
      return true;
    }
    const char c = static_cast<char>(ch);
    if (quoted) {
      if (c == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line_;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case ',':
        record.fields.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
        break;
      case '"':
        if (!field.empty() || field_was_quoted) {
          throw DataError("line " + std::to_string(line_) +
                          ": unexpected quote inside unquoted field");
        }
        quoted = true;
        field_was_quoted = true;
        break;
      case '\r':
        if (in_.peek() == '\n') break;
        field.push_back(c);
        break;
      case '\n':
        ++line_;
        record.fields.push_back(std::move(field));
        return true;
      default:
        if (field_was_quoted) {
          throw DataError("line " + std::to_string(line_) +
                          ": text after closing quote");
        }
        field.push_back(c);
    }
  }
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace gamecat::detail
