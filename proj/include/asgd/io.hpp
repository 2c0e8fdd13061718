#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "asgd/linalg.hpp"

namespace asgd {

// 17 significant digits, '.' decimal point; round-trips every double.
std::string format_double(double value);
std::string format_vector(const Vector& v, char sep = ',');

// Strict parsers: the whole (trimmed) text must be consumed. Throw ConfigError.
double parse_double(std::string_view text);
std::uint64_t parse_uint(std::string_view text);
bool parse_bool(std::string_view text);
Vector parse_vector(std::string_view text, char sep = ',');
std::vector<std::string> split(std::string_view text, char sep);
std::string trim(std::string_view text);

// 64-bit FNV-1a digest rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace asgd
