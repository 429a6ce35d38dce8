#include "telegraph_kit/csv.hpp"

#include <charconv>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace telegraph_kit::csv {

namespace {

bool needs_quotes(const std::string& s) { return s.find_first_of(",\"\r\n") != std::string::npos; }

void write_field(std::ostream& out, const std::string& s) {
    if (!needs_quotes(s)) {
        out << s;
        return;
    }
    out << '"';
    for (char ch : s) {
        if (ch == '"') {
            out << '"';
        }
        out << ch;
    }
    out << '"';
}

void write_row(std::ostream& out, const std::vector<Cell>& row) {
    if (row.size() == 1 && std::holds_alternative<std::string>(row[0]) && std::get<std::string>(row[0]).empty()) {
        // A bare empty line would read back as a table separator.
        out << "\"\"\n";
        return;
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) {
            out << ',';
        }
        if (const auto* number = std::get_if<double>(&row[i])) {
            out << format_number(*number);
        } else {
            write_field(out, std::get<std::string>(row[i]));
        }
    }
    out << '\n';
}

struct Field {
    std::string text;
    bool quoted = false;
};

// Splits one logical record starting at pos; advances pos past the newline.
std::vector<Field> read_record(const std::string& text, std::size_t& pos) {
    std::vector<Field> fields(1);
    while (pos < text.size()) {
        const char ch = text[pos];
        Field& f = fields.back();
        if (ch == '"' && f.text.empty() && !f.quoted) {
            f.quoted = true;
            ++pos;
            for (;;) {
                if (pos >= text.size()) {
                    throw std::runtime_error("csv: unterminated quoted field");
                }
                if (text[pos] == '"') {
                    if (pos + 1 < text.size() && text[pos + 1] == '"') {
                        f.text.push_back('"');
                        pos += 2;
                        continue;
                    }
                    ++pos;
                    break;
                }
                f.text.push_back(text[pos++]);
            }
            if (pos < text.size() && text[pos] != ',' && text[pos] != '\n') {
                throw std::runtime_error("csv: text after closing quote");
            }
            continue;
        }
        if (ch == ',') {
            fields.emplace_back();
            ++pos;
            continue;
        }
        if (ch == '\n') {
            ++pos;
            return fields;
        }
        if (f.quoted) {
            throw std::runtime_error("csv: text after closing quote");
        }
        f.text.push_back(ch);
        ++pos;
    }
    return fields;
}

Cell to_cell(const Field& f) {
    if (f.quoted || f.text.empty()) {
        return f.text;
    }
    double value = 0.0;
    const char* first = f.text.data();
    const char* last = first + f.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc() && ptr == last && format_number(value) == f.text) {
        return value;
    }
    return f.text;
}

}  // namespace

std::string format_number(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
    return std::string(buffer, result.ptr);
}

void write(std::ostream& out, const Document& doc) {
    for (std::size_t t = 0; t < doc.size(); ++t) {
        if (t > 0) {
            out << '\n';
        }
        std::vector<Cell> header(doc[t].header.begin(), doc[t].header.end());
        write_row(out, header);
        for (const auto& row : doc[t].rows) {
            write_row(out, row);
        }
    }
}

std::string to_string(const Document& doc) {
    std::ostringstream out;
    write(out, doc);
    return out.str();
}

Document parse(const std::string& text) {
    Document doc;
    std::size_t pos = 0;
    bool start_table = true;
    while (pos < text.size()) {
        if (text[pos] == '\n') {
            if (start_table) {
                throw std::runtime_error("csv: empty table");
            }
            start_table = true;
            ++pos;
            continue;
        }
        const std::vector<Field> fields = read_record(text, pos);
        if (start_table) {
            Table table;
            for (const Field& f : fields) {
                table.header.push_back(f.text);
            }
            doc.push_back(std::move(table));
            start_table = false;
            continue;
        }
        std::vector<Cell> row;
        row.reserve(fields.size());
        for (const Field& f : fields) {
            row.push_back(to_cell(f));
        }
        if (row.size() != doc.back().header.size()) {
            throw std::runtime_error("csv: row width differs from header");
        }
        doc.back().rows.push_back(std::move(row));
    }
    return doc;
}

}  // namespace telegraph_kit::csv
