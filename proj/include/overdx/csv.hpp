#pragma once

#include <istream>
#include <string>
#include <vector>

namespace overdx::csv {

struct Row {
  std::vector<std::string> fields;
  std::size_t line_number = 0;  // 1-based, line of the first character
};

// RFC-4180-ish reader: quoted fields, embedded commas/newlines, "" escapes.
std::vector<Row> read(std::istream& in);

std::string escape(const std::string& field);
std::string join(const std::vector<std::string>& fields);

}  // namespace overdx::csv
