#include "overdx/csv.hpp"

#include "overdx/error.hpp"

namespace overdx::csv {

std::vector<Row> read(std::istream& in) {
  std::vector<Row> rows;
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());

  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool row_open = false;
  std::size_t line = 1;
  std::size_t row_line = 1;

  auto end_field = [&]() {
    fields.push_back(field);
    field.clear();
  };
  auto end_row = [&]() {
    end_field();
    rows.push_back(Row{std::move(fields), row_line});
    fields = {};
    row_open = false;
  };

  for (std::size_t i = 0; i < data.size(); ++i) {
    char c = data[i];
    if (!row_open) {
      row_open = true;
      row_line = line;
    }
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r') {
      // swallowed; \r\n handled at the \n
    } else if (c == '\n') {
      ++line;
      end_row();
    } else {
      field.push_back(c);
    }
  }
  if (in_quotes) throw ValidationError("csv: unterminated quoted field");
  if (row_open || !field.empty() || !fields.empty()) end_row();
  return rows;
}

std::string escape(const std::string& field) {
  bool needs = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  return out;
}

}  // namespace overdx::csv
