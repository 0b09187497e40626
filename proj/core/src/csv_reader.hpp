#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

namespace gamecat::detail {

struct CsvRecord {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

// RFC 4180 reader: quoted fields may contain separators, doubled quotes and
// line breaks. Accepts both LF and CRLF record terminators.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Returns false at end of input. Throws DataError on an unterminated
  // quoted field or stray quote.
  bool next(CsvRecord& record);

 private:
  std::istream& in_;
  std::size_t line_ = 1;
};

std::string csv_escape(const std::string& field);

}  // namespace gamecat::detail
