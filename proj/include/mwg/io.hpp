#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mwg::io {

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

/// Parses a double, throwing std::invalid_argument on trailing garbage.
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);
std::string trim(std::string_view s);

/// Reads a CSV file, checks the header line equals `expected_header`, and
/// returns the remaining rows split on commas.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               std::string_view expected_header);

/// Writes `content` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, std::string_view content);
std::string read_text(const std::filesystem::path& path);

}  // namespace mwg::io
