#pragma once
// Small text/file helpers shared by the readers and report writers.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace actorgauss::io {

std::vector<std::string_view> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

// Reads every line of a file; throws std::runtime_error if it cannot be opened.
std::vector<std::string> read_lines(const std::filesystem::path& path);

// Writes to "<path>.tmp" and renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

int parse_int(std::string_view token, std::string_view what);
double parse_double(std::string_view token, std::string_view what);

// Shortest decimal that round-trips the double.
std::string format_double(double v);

}  // namespace actorgauss::io
