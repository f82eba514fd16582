#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "scriptaffect/errors.hpp"

namespace scriptaffect::csv {

using Row = std::vector<std::string>;

inline std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Rows are terminated with '\n' regardless of platform.
class Writer {
 public:
  void row(const Row& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ += ',';
      out_ += escape(fields[i]);
    }
    out_ += '\n';
  }
  const std::string& str() const noexcept { return out_; }

 private:
  std::string out_;
};

struct Record {
  std::size_t line;  // 1-based line where the record starts
  Row fields;
};

// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
// newlines. Blank lines are skipped.
inline std::vector<Record> parse(std::string_view text) {
  std::vector<Record> records;
  Row fields;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t record_line = 1;

  auto end_field = [&] {
    fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = fields.size() == 1 && fields[0].empty();
    if (!blank) records.push_back({record_line, std::move(fields)});
    fields.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) {
          throw FormatError("line " + std::to_string(line) + ": stray quote in unquoted field");
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw FormatError("line " + std::to_string(record_line) + ": unterminated quote");
  if (field_started || !field.empty() || !fields.empty()) end_record();
  return records;
}

}  // namespace scriptaffect::csv
