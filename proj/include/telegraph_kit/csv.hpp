#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace telegraph_kit::csv {

/// A cell holds text or a number; numbers are written with 17 significant digits.
using Cell = std::variant<std::string, double>;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;
};

/// Tables separated by one empty line.
using Document = std::vector<Table>;

std::string format_number(double value);

/// RFC-4180 style: fields with ',', '"', CR or LF are quoted, quotes doubled, CRLF-free output with '\n'.
void write(std::ostream& out, const Document& doc);
std::string to_string(const Document& doc);

/// Inverse of write. Unquoted fields that parse completely as numbers become
/// doubles; everything else stays text. Throws std::runtime_error on malformed input.
Document parse(const std::string& text);

}  // namespace telegraph_kit::csv
