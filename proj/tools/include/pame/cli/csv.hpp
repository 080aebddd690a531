#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace pame::cli {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text);

/// Header-first comma separated table; fields never contain commas or quotes.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Throws std::out_of_range if the column does not exist.
    [[nodiscard]] std::size_t column(std::string_view name) const;
};

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::string_view text);

} // namespace pame::cli
