#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

// Minimal RFC 4180 reading and writing. Fields are quoted only when they
// contain a comma, quote, or line break.
namespace newsflow::csv {

std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Parses one logical line (no embedded newlines supported).
std::vector<std::string> parse_line(std::string_view line);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  // source line of each row
};

// Reads a headered CSV, checking the header against `expected_header` when it is non-empty.
Table read(std::istream& in, const std::vector<std::string>& expected_header = {});
Table read_file(const std::string& path, const std::vector<std::string>& expected_header = {});

// Round-trippable decimal rendering of a double.
std::string format_double(double v);

double parse_double(std::string_view field, std::size_t line);
long long parse_int(std::string_view field, std::size_t line);

}  // namespace newsflow::csv
