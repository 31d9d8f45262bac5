#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace actirehab::csv {

// Minimal reader for the comma-separated formats used by this project:
// no quoting, '.' decimal separator, mandatory header row.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    // 1-based line number of each row in the source file.
    std::vector<std::size_t> line_numbers;

    // Index of a named column, or throws ParseError.
    std::size_t column(std::string_view name) const;
};

std::vector<std::string> split_line(std::string_view line);

// Throws MissingFile if the path does not exist. An empty file yields an
// empty Table (no header).
Table read_file(const std::filesystem::path& path);

// Strict number parsing; throws ParseError mentioning `what`.
double parse_double(std::string_view text, std::string_view what);
long parse_int(std::string_view text, std::string_view what);

// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

}  // namespace actirehab::csv
